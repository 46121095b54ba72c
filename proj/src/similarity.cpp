#include "cemb/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "cemb/error.hpp"
#include "cemb/text_io.hpp"

namespace cemb {

namespace {

constexpr double kNormFloor = 1e-12;

// Depth in nodes (root = 1) via memoized DFS over parent edges; flags the
// first edge that closes a cycle.
struct DepthComputer {
    const std::vector<std::vector<int>>& parents;
    const std::vector<std::string>& ids;
    std::vector<int> depth;       // 0 = unknown
    std::vector<char> on_stack;

    int run(int node) {
        if (depth[node] != 0) return depth[node];
        on_stack[node] = 1;
        int best = 1;
        for (int p : parents[node]) {
            if (on_stack[p]) {
                throw ValidationError("cycle through is-a edge " + ids[node] + " -> " + ids[p]);
            }
            best = std::max(best, run(p) + 1);
        }
        on_stack[node] = 0;
        depth[node] = best;
        return best;
    }
};

}  // namespace

double cosine(const Vec& u, const Vec& v) {
    if (u.size() != v.size()) {
        throw ValidationError("cosine: dimension mismatch (" + std::to_string(u.size()) +
                              " vs " + std::to_string(v.size()) + ")");
    }
    double dot = 0.0;
    double nu2 = 0.0;
    double nv2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu2 += u[i] * u[i];
        nv2 += v[i] * v[i];
    }
    if (nu2 < kNormFloor * kNormFloor || nv2 < kNormFloor * kNormFloor) return 0.0;
    // sqrt(nu2 * nv2) instead of sqrt(nu2) * sqrt(nv2): for u == v the
    // denominator collapses to the dot product exactly, so cos(u,u) == 1.
    return std::clamp(dot / std::sqrt(nu2 * nv2), -1.0, 1.0);
}

double sim_eq2(const Vec& u, const Vec& v, double beta) {
    const double c = cosine(u, v);
    if (c <= 0.0) return 0.0;
    return beta * c * c;
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
    std::vector<std::string> lines = read_lines(path);
    const std::string name = path.string();

    Taxonomy tax;
    auto intern = [&tax](const std::string& id) {
        auto [it, inserted] = tax.index.emplace(id, static_cast<int>(tax.ids.size()));
        if (inserted) {
            tax.ids.push_back(id);
            tax.neighbors.emplace_back();
            tax.parents.emplace_back();
        }
        return it->second;
    };

    std::vector<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_tabs(line);
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            throw ParseError(name, i + 1, "malformed line, expected \"<child>\\t<parent>\"");
        }
        if (fields[0] == fields[1]) {
            throw ParseError(name, i + 1,
                             "cycle through is-a edge " + fields[0] + " -> " + fields[1]);
        }
        int child = intern(fields[0]);
        int parent = intern(fields[1]);
        edges.emplace_back(child, parent);
    }

    // Edge set semantics: repeated lines collapse to one edge.
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (auto [child, parent] : edges) {
        tax.parents[child].push_back(parent);
        tax.neighbors[child].push_back(parent);
        tax.neighbors[parent].push_back(child);
    }

    DepthComputer dc{tax.parents, tax.ids, std::vector<int>(tax.ids.size(), 0),
                     std::vector<char>(tax.ids.size(), 0)};
    int max_depth = 0;
    for (int node = 0; node < static_cast<int>(tax.ids.size()); ++node) {
        max_depth = std::max(max_depth, dc.run(node));
    }
    tax.max_depth = max_depth;
    return tax;
}

std::optional<int> path_length(const Taxonomy& tax, const std::string& c1,
                               const std::string& c2) {
    auto a = tax.node(c1);
    auto b = tax.node(c2);
    if (!a || !b) return std::nullopt;
    if (*a == *b) return 1;

    std::vector<int> dist(tax.ids.size(), -1);
    std::deque<int> queue;
    dist[*a] = 0;
    queue.push_back(*a);
    while (!queue.empty()) {
        int node = queue.front();
        queue.pop_front();
        if (node == *b) return dist[node] + 1;  // edges -> nodes
        for (int next : tax.neighbors[node]) {
            if (dist[next] < 0) {
                dist[next] = dist[node] + 1;
                queue.push_back(next);
            }
        }
    }
    return std::nullopt;
}

double sim_leacock(const Taxonomy& tax, const std::string& c1, const std::string& c2,
                   bool raw) {
    if (tax.empty() || tax.max_depth < 1) return 0.0;
    auto len = path_length(tax, c1, c2);
    if (!len) return 0.0;
    // -ln(len / 2D), written as a difference so len = 1 scores exactly
    // ln(2D) and the normalized value exactly 1.
    const double two_d = 2.0 * static_cast<double>(tax.max_depth);
    const double score = std::log(two_d) - std::log(static_cast<double>(*len));
    if (raw) return score;
    return std::clamp(score / std::log(two_d), 0.0, 1.0);
}

double sim_dispatch(const SimilarityConfig& cfg, const std::string& c1, const std::string& c2,
                    const ConceptVectorSet* vectors, const Taxonomy* tax) {
    switch (cfg.kind) {
        case SimilarityConfig::Kind::NoSim:
            return c1 == c2 ? 1.0 : 0.0;
        case SimilarityConfig::Kind::Eq2: {
            if (vectors == nullptr) {
                throw ValidationError("eq2 similarity requires concept vectors");
            }
            const Vec* u = vectors->find(c1);
            const Vec* v = vectors->find(c2);
            if (u == nullptr || v == nullptr) return 0.0;
            return sim_eq2(*u, *v, cfg.beta);
        }
        case SimilarityConfig::Kind::Leacock:
            if (tax == nullptr) {
                throw ValidationError("leacock similarity requires a taxonomy");
            }
            return sim_leacock(*tax, c1, c2, cfg.leacock_raw);
    }
    throw ValidationError("unknown similarity kind");
}

SimilarityFn make_similarity(const SimilarityConfig& cfg, const ConceptVectorSet* vectors,
                             const Taxonomy* tax) {
    if (cfg.kind == SimilarityConfig::Kind::Eq2 && vectors == nullptr) {
        throw ValidationError("eq2 similarity requires concept vectors");
    }
    if (cfg.kind == SimilarityConfig::Kind::Leacock && tax == nullptr) {
        throw ValidationError("leacock similarity requires a taxonomy");
    }
    return [cfg, vectors, tax](const std::string& c1, const std::string& c2) {
        return sim_dispatch(cfg, c1, c2, vectors, tax);
    };
}

}  // namespace cemb
