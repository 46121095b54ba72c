#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cemb/embedder.hpp"

namespace cemb {

/// is-a edge set over concept ids. Edges are directed child -> parent and
/// must be acyclic; path queries treat them as undirected.
struct Taxonomy {
    std::vector<std::string> ids;                  // node index -> id
    std::unordered_map<std::string, int> index;    // id -> node index
    std::vector<std::vector<int>> neighbors;       // undirected adjacency
    std::vector<std::vector<int>> parents;         // child -> parents
    int max_depth = 0;  // longest root-to-node path in nodes; 0 when empty

    bool empty() const { return ids.empty(); }

    std::optional<int> node(const std::string& id) const {
        auto it = index.find(id);
        if (it == index.end()) return std::nullopt;
        return it->second;
    }
};

struct SimilarityConfig {
    enum class Kind { Eq2, Leacock, NoSim };
    Kind kind = Kind::NoSim;
    double beta = 0.5;
    bool leacock_raw = false;  // skip the ln(2D) normalization
};

/// dot(u,v) / (|u| |v|); 0 when either norm falls below 1e-12.
double cosine(const Vec& u, const Vec& v);

/// 0 when the cosine is non-positive, beta * cos^2 otherwise. Bounded by
/// beta, symmetric, invariant under positive scaling of either argument.
double sim_eq2(const Vec& u, const Vec& v, double beta);

/// TSV "<child>\t<parent>" with "#" comments. Rejects cycles, naming one
/// offending edge.
Taxonomy load_taxonomy(const std::filesystem::path& path);

/// Number of nodes on the shortest undirected path; 1 for a concept and
/// itself; nullopt when either id is unknown or no path exists.
std::optional<int> path_length(const Taxonomy& tax, const std::string& c1,
                               const std::string& c2);

/// Normalized Leacock score 1 - ln(len)/ln(2D), clamped to [0,1]; 0 when
/// no path exists. With raw = true returns the unscaled -ln(len/(2D)),
/// which exceeds 1 for short paths.
double sim_leacock(const Taxonomy& tax, const std::string& c1, const std::string& c2,
                   bool raw = false);

/// Similarity evaluator over concept ids: (query concept, doc concept) -> score.
using SimilarityFn = std::function<double(const std::string&, const std::string&)>;

/// Eq2 over the two concept vectors (missing vector scores 0), Leacock over
/// the taxonomy, or exact match. Throws when the configured kind lacks its
/// resource.
double sim_dispatch(const SimilarityConfig& cfg, const std::string& c1,
                    const std::string& c2, const ConceptVectorSet* vectors,
                    const Taxonomy* tax);

/// Binds cfg and resources after validating them once.
SimilarityFn make_similarity(const SimilarityConfig& cfg, const ConceptVectorSet* vectors,
                             const Taxonomy* tax);

}  // namespace cemb
