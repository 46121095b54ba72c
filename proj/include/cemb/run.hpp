#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cemb {

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;
};

/// Per-query ranked document lists, scores non-increasing within a query.
struct RankedRun {
    std::map<std::string, std::vector<ScoredDoc>> rankings;
};

/// TREC run format: "<qid> Q0 <docid> <rank> <score> <tag>", ranks starting
/// at 1. Reading validates rank sequence, score monotonicity and doc
/// uniqueness per query.
RankedRun read_run(const std::filesystem::path& path);

/// Scores are printed with 6 decimal places; queries with empty rankings
/// produce no lines.
void write_run(const RankedRun& run, const std::filesystem::path& path,
               const std::string& tag = "cemb");

}  // namespace cemb
