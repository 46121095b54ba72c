#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cemb/run.hpp"
#include "cemb/similarity.hpp"

namespace cemb {

/// Concept-annotated document (or query): concept id -> occurrence count.
struct ConceptDoc {
    std::string doc_id;
    std::map<std::string, int> tf;
    std::int64_t length = 0;  // sum of counts
};

struct ConceptIndex {
    std::vector<ConceptDoc> docs;
    std::unordered_map<std::string, int> df;
    // concept id -> (position in docs, tf)
    std::unordered_map<std::string, std::vector<std::pair<int, int>>> postings;
    double avdl = 0.0;

    std::int64_t doc_count() const { return static_cast<std::int64_t>(docs.size()); }
};

struct WeightingConfig {
    enum class Kind { Pivoted, BM25 };
    Kind kind = Kind::Pivoted;
    double s = 0.2;
    double k1 = 1.2;
    double b = 0.75;
    double k3 = 1000.0;
};

WeightingConfig::Kind parse_weighting(const std::string& name);

/// One document per line: "<id>\t<concept> <concept> ..."; repeating a
/// concept encodes its tf. A line with no concepts is a valid empty
/// document/query.
std::vector<ConceptDoc> load_concept_docs(const std::filesystem::path& path);

/// Canonical re-emission of the same format: concepts sorted, counts as
/// repetitions. Input order of documents is preserved.
void save_concept_docs(const std::vector<ConceptDoc>& docs,
                       const std::filesystem::path& path);

/// Computes df, postings and avdl. Rejects an empty collection and
/// duplicate doc ids.
ConceptIndex build_index(std::vector<ConceptDoc> docs);

/// Pivoted:  (1 + ln(1 + ln(tf))) / ((1-s) + s * dl/avdl)
/// BM25:     (k1+1) tf / (k1 ((1-b) + b dl/avdl) + tf) * max(0, ln((N-df+0.5)/(df+0.5)))
/// The BM25 idf is clamped at zero so similarity-weighted sums stay
/// non-negative. Requires tf >= 1 in doc.
double doc_weight(const WeightingConfig& cfg, const ConceptIndex& idx,
                  const std::string& concept_id, const ConceptDoc& doc);

/// Pivoted: qtf * ln((N+1)/df), with df = N for concepts unseen in the
/// index. BM25: (k3+1) qtf / (k3 + qtf), df-free.
double query_weight(const WeightingConfig& cfg, const ConceptIndex& idx,
                    const std::string& concept_id, int qtf);

struct BestMatch {
    std::string concept_id;
    double sim = 0.0;
};

/// The document concept closest to the query concept: an exact match wins
/// with similarity 1; otherwise the highest-similarity document concept,
/// ties to the lexicographically smallest id; nullopt when nothing scores
/// above zero.
std::optional<BestMatch> best_match(const std::string& concept_id, const ConceptDoc& doc,
                                    const SimilarityFn& sim);

/// RSV(d,q): sum over distinct query concepts of
/// query_weight(c) * sim(c, c*) * doc_weight(c*). Query concepts without a
/// best match contribute 0.
double score_rsv(const ConceptDoc& query, const ConceptDoc& doc, const ConceptIndex& idx,
                 const WeightingConfig& wcfg, const SimilarityFn& sim);

/// Scores every document for every query (documents in parallel), drops
/// zero scores, sorts by score descending then doc id ascending, keeps the
/// top k. A query with no concepts yields an empty ranking and a warning.
/// Candidate similarities below min_sim are ignored (0 = exhaustive).
RankedRun run_queries(const std::vector<ConceptDoc>& queries, const ConceptIndex& idx,
                      const WeightingConfig& wcfg, const SimilarityConfig& scfg,
                      const ConceptVectorSet* vectors, const Taxonomy* tax, int k,
                      double min_sim = 0.0);

/// Single-threaded reference with identical output.
RankedRun run_queries_serial(const std::vector<ConceptDoc>& queries,
                             const ConceptIndex& idx, const WeightingConfig& wcfg,
                             const SimilarityConfig& scfg, const ConceptVectorSet* vectors,
                             const Taxonomy* tax, int k, double min_sim = 0.0);

}  // namespace cemb
