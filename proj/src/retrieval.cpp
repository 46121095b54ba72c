#include "cemb/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <unordered_set>

#include "cemb/error.hpp"
#include "cemb/text_io.hpp"

namespace cemb {

namespace {

void sort_ranking(std::vector<ScoredDoc>& ranked) {
    std::sort(ranked.begin(), ranked.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
}

std::vector<ScoredDoc> rank_scores(const std::vector<ConceptDoc>& docs,
                                   const std::vector<double>& scores, int k) {
    std::vector<ScoredDoc> ranked;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (scores[i] > 0.0) ranked.push_back({docs[i].doc_id, scores[i]});
    }
    sort_ranking(ranked);
    if (static_cast<int>(ranked.size()) > k) ranked.resize(static_cast<std::size_t>(k));
    return ranked;
}

SimilarityFn with_min_sim(SimilarityFn sim, double min_sim) {
    if (min_sim <= 0.0) return sim;
    return [sim = std::move(sim), min_sim](const std::string& a, const std::string& b) {
        const double s = sim(a, b);
        return s >= min_sim ? s : 0.0;
    };
}

void check_queries(const std::vector<ConceptDoc>& queries) {
    std::unordered_set<std::string> seen;
    for (const ConceptDoc& q : queries) {
        if (!seen.insert(q.doc_id).second) {
            throw ValidationError("duplicate query id " + q.doc_id);
        }
    }
}

}  // namespace

WeightingConfig::Kind parse_weighting(const std::string& name) {
    if (name == "piv") return WeightingConfig::Kind::Pivoted;
    if (name == "bm25") return WeightingConfig::Kind::BM25;
    throw ValidationError("unknown weighting \"" + name + "\", expected piv|bm25");
}

std::vector<ConceptDoc> load_concept_docs(const std::filesystem::path& path) {
    std::vector<std::string> lines = read_lines(path);
    const std::string name = path.string();

    std::vector<ConceptDoc> docs;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        if (fields.empty() || fields[0].empty() || fields.size() > 2) {
            throw ParseError(name, i + 1,
                             "malformed line, expected \"<id>\\t<concept> <concept> ...\"");
        }
        ConceptDoc doc;
        doc.doc_id = fields[0];
        if (fields.size() == 2) {
            for (const std::string& cid : split_whitespace(fields[1])) {
                ++doc.tf[cid];
                ++doc.length;
            }
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

void save_concept_docs(const std::vector<ConceptDoc>& docs,
                       const std::filesystem::path& path) {
    std::string out;
    for (const ConceptDoc& doc : docs) {
        out += doc.doc_id;
        out += '\t';
        bool first = true;
        for (const auto& [cid, tf] : doc.tf) {
            for (int i = 0; i < tf; ++i) {
                if (!first) out += ' ';
                out += cid;
                first = false;
            }
        }
        out += '\n';
    }
    atomic_write(path, out);
}

ConceptIndex build_index(std::vector<ConceptDoc> docs) {
    if (docs.empty()) throw ValidationError("empty document collection");

    ConceptIndex idx;
    idx.docs = std::move(docs);

    std::unordered_set<std::string> ids;
    std::int64_t total_length = 0;
    for (std::size_t pos = 0; pos < idx.docs.size(); ++pos) {
        const ConceptDoc& doc = idx.docs[pos];
        if (!ids.insert(doc.doc_id).second) {
            throw ValidationError("duplicate doc id " + doc.doc_id);
        }
        total_length += doc.length;
        for (const auto& [cid, tf] : doc.tf) {
            ++idx.df[cid];
            idx.postings[cid].emplace_back(static_cast<int>(pos), tf);
        }
    }
    idx.avdl = static_cast<double>(total_length) / static_cast<double>(idx.docs.size());
    return idx;
}

double doc_weight(const WeightingConfig& cfg, const ConceptIndex& idx,
                  const std::string& concept_id, const ConceptDoc& doc) {
    auto it = doc.tf.find(concept_id);
    const int tf = it == doc.tf.end() ? 0 : it->second;
    if (tf < 1) {
        throw ValidationError("doc_weight: concept " + concept_id + " not in document " +
                              doc.doc_id);
    }
    const double dl = static_cast<double>(doc.length);
    if (cfg.kind == WeightingConfig::Kind::Pivoted) {
        const double num = 1.0 + std::log(1.0 + std::log(static_cast<double>(tf)));
        return num / ((1.0 - cfg.s) + cfg.s * dl / idx.avdl);
    }
    const double n = static_cast<double>(idx.doc_count());
    auto dit = idx.df.find(concept_id);
    const double df = dit == idx.df.end() ? 0.0 : static_cast<double>(dit->second);
    const double tf_part = ((cfg.k1 + 1.0) * tf) /
                           (cfg.k1 * ((1.0 - cfg.b) + cfg.b * dl / idx.avdl) + tf);
    const double idf = std::log((n - df + 0.5) / (df + 0.5));
    return tf_part * std::max(0.0, idf);
}

double query_weight(const WeightingConfig& cfg, const ConceptIndex& idx,
                    const std::string& concept_id, int qtf) {
    if (qtf < 1) throw ValidationError("query_weight: qtf must be positive");
    if (cfg.kind == WeightingConfig::Kind::BM25) {
        return ((cfg.k3 + 1.0) * qtf) / (cfg.k3 + qtf);
    }
    const double n = static_cast<double>(idx.doc_count());
    auto it = idx.df.find(concept_id);
    // Concepts the index never saw get the poorest idf, df = N.
    const double df = it == idx.df.end() ? n : static_cast<double>(it->second);
    return qtf * std::log((n + 1.0) / std::max(df, 1.0));
}

std::optional<BestMatch> best_match(const std::string& concept_id, const ConceptDoc& doc,
                                    const SimilarityFn& sim) {
    if (doc.tf.contains(concept_id)) return BestMatch{concept_id, 1.0};

    // tf iterates in id order, so keeping strict improvements resolves ties
    // toward the lexicographically smallest id.
    std::optional<BestMatch> best;
    for (const auto& [cid, tf] : doc.tf) {
        const double s = sim(concept_id, cid);
        if (s > 0.0 && (!best || s > best->sim)) best = BestMatch{cid, s};
    }
    return best;
}

double score_rsv(const ConceptDoc& query, const ConceptDoc& doc, const ConceptIndex& idx,
                 const WeightingConfig& wcfg, const SimilarityFn& sim) {
    double rsv = 0.0;
    for (const auto& [cid, qtf] : query.tf) {
        auto match = best_match(cid, doc, sim);
        if (!match) continue;
        rsv += query_weight(wcfg, idx, cid, qtf) * match->sim *
               doc_weight(wcfg, idx, match->concept_id, doc);
    }
    return rsv;
}

RankedRun run_queries(const std::vector<ConceptDoc>& queries, const ConceptIndex& idx,
                      const WeightingConfig& wcfg, const SimilarityConfig& scfg,
                      const ConceptVectorSet* vectors, const Taxonomy* tax, int k,
                      double min_sim) {
    check_queries(queries);
    const SimilarityFn sim = with_min_sim(make_similarity(scfg, vectors, tax), min_sim);

    RankedRun run;
    std::vector<double> scores(idx.docs.size());
    for (const ConceptDoc& query : queries) {
        if (query.tf.empty()) {
            std::cerr << "warning: query " << query.doc_id
                      << " is not mapped to any concept, emitting empty ranking\n";
            run.rankings[query.doc_id] = {};
            continue;
        }

#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(idx.docs.size()); ++i) {
            scores[i] = score_rsv(query, idx.docs[i], idx, wcfg, sim);
        }

        run.rankings[query.doc_id] = rank_scores(idx.docs, scores, k);
    }
    return run;
}

RankedRun run_queries_serial(const std::vector<ConceptDoc>& queries, const ConceptIndex& idx,
                             const WeightingConfig& wcfg, const SimilarityConfig& scfg,
                             const ConceptVectorSet* vectors, const Taxonomy* tax, int k,
                             double min_sim) {
    check_queries(queries);
    const SimilarityFn sim = with_min_sim(make_similarity(scfg, vectors, tax), min_sim);

    RankedRun run;
    std::vector<double> scores(idx.docs.size());
    for (const ConceptDoc& query : queries) {
        if (query.tf.empty()) {
            std::cerr << "warning: query " << query.doc_id
                      << " is not mapped to any concept, emitting empty ranking\n";
            run.rankings[query.doc_id] = {};
            continue;
        }
        for (std::size_t i = 0; i < idx.docs.size(); ++i) {
            scores[i] = score_rsv(query, idx.docs[i], idx, wcfg, sim);
        }
        run.rankings[query.doc_id] = rank_scores(idx.docs, scores, k);
    }
    return run;
}

}  // namespace cemb
