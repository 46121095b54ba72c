#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cemb/run.hpp"

namespace cemb {

/// Relevance judgments: (query id, doc id) -> integer grade, grade > 0
/// meaning relevant.
struct QrelSet {
    std::map<std::string, std::map<std::string, int>> by_query;

    std::set<std::string> relevant(const std::string& qid) const;
};

/// TREC qrels lines "<qid> 0 <docid> <grade>".
QrelSet load_qrels(const std::filesystem::path& path);

/// Sum of precision@r over ranks holding a relevant doc, divided by the
/// total number of relevant docs. Requires a non-empty relevant set.
double average_precision(const std::vector<std::string>& ranked,
                         const std::set<std::string>& relevant);

/// |relevant among the top k| / k; the denominator stays k even when fewer
/// than k documents were retrieved.
double precision_at_k(const std::vector<std::string>& ranked,
                      const std::set<std::string>& relevant, int k);

struct QueryScores {
    double ap = 0.0;
    double p10 = 0.0;
};

struct EvalReport {
    std::map<std::string, QueryScores> per_query;
    double map = 0.0;
    double mean_p10 = 0.0;
    int evaluated = 0;
};

/// Evaluates every qrels query with at least one relevant document; a query
/// the run retrieved nothing for scores 0. Run queries without such
/// judgments are skipped with a warning. Errors when nothing is evaluable.
EvalReport evaluate_run(const RankedRun& run, const QrelSet& qrels);

struct SignificanceResult {
    double observed = 0.0;  // mean per-query difference a - b, signed
    double p_value = 1.0;
    bool exact = false;
    std::uint64_t permutations = 0;  // assignments evaluated, observed included
    std::uint64_t seed = 0;
};

/// Two-sided sign-flip randomization test on paired per-query differences.
/// The statistic is |mean(a - b)|; the null distribution flips the sign of
/// each difference independently. All 2^Q assignments are enumerated when
/// Q <= max_exact; otherwise Monte Carlo with the observed assignment
/// always included, so p >= 1/(samples+1). Sampling is parallel but the
/// (seed, sample) -> flips mapping is fixed, so results are reproducible.
SignificanceResult fisher_randomization(const std::vector<double>& a,
                                        const std::vector<double>& b, int max_exact = 20,
                                        std::uint64_t samples = 100000,
                                        std::uint64_t seed = 0);

/// Single-threaded reference with identical output.
SignificanceResult fisher_randomization_serial(const std::vector<double>& a,
                                               const std::vector<double>& b,
                                               int max_exact = 20,
                                               std::uint64_t samples = 100000,
                                               std::uint64_t seed = 0);

}  // namespace cemb
