#include "cemb/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "cemb/error.hpp"
#include "cemb/rng.hpp"
#include "cemb/text_io.hpp"

namespace cemb {

namespace {

struct Diffs {
    std::vector<double> d;
    double statistic = 0.0;  // |mean(d)|
    double observed = 0.0;   // mean(d), signed
};

Diffs make_diffs(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw ValidationError("fisher_randomization: length mismatch (" +
                              std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    if (a.size() < 2) {
        throw ValidationError("fisher_randomization: need at least 2 paired values");
    }
    Diffs out;
    out.d.resize(a.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.d[i] = a[i] - b[i];
        sum += out.d[i];
    }
    out.observed = sum / static_cast<double>(a.size());
    out.statistic = std::abs(out.observed);
    return out;
}

double flipped_mean(const std::vector<double>& d, std::uint64_t mask) {
    double sum = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        sum += (mask >> i) & 1ULL ? -d[i] : d[i];
    }
    return sum / static_cast<double>(d.size());
}

// Sign-flipped mean with flips drawn from a per-sample RNG stream. The
// stream depends only on (seed, sample index), so iteration order cannot
// change the outcome.
double sampled_flipped_mean(const std::vector<double>& d, std::uint64_t seed,
                            std::uint64_t sample) {
    SplitMix64 rng(stream_seed(seed, sample));
    double sum = 0.0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if ((i & 63) == 0) bits = rng.next();
        sum += (bits >> (i & 63)) & 1ULL ? -d[i] : d[i];
    }
    return sum / static_cast<double>(d.size());
}

bool use_exact(std::size_t q, int max_exact) {
    return static_cast<long long>(q) <= static_cast<long long>(max_exact) && q <= 62;
}

SignificanceResult fisher_impl(const std::vector<double>& a, const std::vector<double>& b,
                               int max_exact, std::uint64_t samples, std::uint64_t seed,
                               bool parallel) {
    Diffs diffs = make_diffs(a, b);
    const std::size_t q = diffs.d.size();

    SignificanceResult result;
    result.observed = diffs.observed;
    result.seed = seed;

    if (use_exact(q, max_exact)) {
        const std::uint64_t total = 1ULL << q;
        std::uint64_t hits = 0;
        if (parallel) {
#pragma omp parallel for schedule(static) reduction(+ : hits)
            for (long long mask = 0; mask < static_cast<long long>(total); ++mask) {
                if (std::abs(flipped_mean(diffs.d, static_cast<std::uint64_t>(mask))) >=
                    diffs.statistic) {
                    ++hits;
                }
            }
        } else {
            for (std::uint64_t mask = 0; mask < total; ++mask) {
                if (std::abs(flipped_mean(diffs.d, mask)) >= diffs.statistic) ++hits;
            }
        }
        result.exact = true;
        result.permutations = total;
        result.p_value = static_cast<double>(hits) / static_cast<double>(total);
        return result;
    }

    if (samples < 1) throw ValidationError("fisher_randomization: samples must be positive");
    std::uint64_t hits = 0;
    if (parallel) {
#pragma omp parallel for schedule(static) reduction(+ : hits)
        for (long long j = 0; j < static_cast<long long>(samples); ++j) {
            if (std::abs(sampled_flipped_mean(diffs.d, seed, static_cast<std::uint64_t>(j))) >=
                diffs.statistic) {
                ++hits;
            }
        }
    } else {
        for (std::uint64_t j = 0; j < samples; ++j) {
            if (std::abs(sampled_flipped_mean(diffs.d, seed, j)) >= diffs.statistic) ++hits;
        }
    }
    result.exact = false;
    result.permutations = samples + 1;  // the observed assignment is always counted
    result.p_value =
        static_cast<double>(hits + 1) / static_cast<double>(samples + 1);
    return result;
}

}  // namespace

std::set<std::string> QrelSet::relevant(const std::string& qid) const {
    std::set<std::string> docs;
    auto it = by_query.find(qid);
    if (it == by_query.end()) return docs;
    for (const auto& [docid, grade] : it->second) {
        if (grade > 0) docs.insert(docid);
    }
    return docs;
}

QrelSet load_qrels(const std::filesystem::path& path) {
    std::vector<std::string> lines = read_lines(path);
    const std::string name = path.string();

    QrelSet qrels;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty()) continue;
        auto fields = split_whitespace(line);
        long long grade = 0;
        if (fields.size() != 4 || !parse_int(fields[3], grade)) {
            throw ParseError(name, i + 1,
                             "malformed line, expected \"<qid> 0 <docid> <grade>\"");
        }
        auto& docs = qrels.by_query[fields[0]];
        if (!docs.emplace(fields[2], static_cast<int>(grade)).second) {
            throw ParseError(name, i + 1,
                             "duplicate judgment for (" + fields[0] + ", " + fields[2] + ")");
        }
    }
    return qrels;
}

double average_precision(const std::vector<std::string>& ranked,
                         const std::set<std::string>& relevant) {
    if (relevant.empty()) {
        throw ValidationError("average_precision: empty relevant set");
    }
    double sum = 0.0;
    int hits = 0;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
        if (relevant.contains(ranked[r])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
    }
    return sum / static_cast<double>(relevant.size());
}

double precision_at_k(const std::vector<std::string>& ranked,
                      const std::set<std::string>& relevant, int k) {
    if (k < 1) throw ValidationError("precision_at_k: k must be positive");
    int hits = 0;
    const std::size_t top = std::min(ranked.size(), static_cast<std::size_t>(k));
    for (std::size_t r = 0; r < top; ++r) {
        if (relevant.contains(ranked[r])) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

EvalReport evaluate_run(const RankedRun& run, const QrelSet& qrels) {
    EvalReport report;
    double ap_sum = 0.0;
    double p10_sum = 0.0;

    for (const auto& [qid, judged] : qrels.by_query) {
        std::set<std::string> rel = qrels.relevant(qid);
        if (rel.empty()) {
            std::cerr << "warning: query " << qid << " has no relevant documents, skipped\n";
            continue;
        }
        std::vector<std::string> ranked;
        auto it = run.rankings.find(qid);
        if (it != run.rankings.end()) {
            ranked.reserve(it->second.size());
            for (const ScoredDoc& doc : it->second) ranked.push_back(doc.doc_id);
        }
        QueryScores scores;
        scores.ap = average_precision(ranked, rel);
        scores.p10 = precision_at_k(ranked, rel, 10);
        report.per_query.emplace(qid, scores);
        ap_sum += scores.ap;
        p10_sum += scores.p10;
    }

    for (const auto& [qid, ranking] : run.rankings) {
        if (!report.per_query.contains(qid)) {
            std::cerr << "warning: query " << qid
                      << " has no relevant documents in the qrels, skipped\n";
        }
    }

    report.evaluated = static_cast<int>(report.per_query.size());
    if (report.evaluated == 0) {
        throw ValidationError("no evaluable queries (no query has relevant judgments)");
    }
    report.map = ap_sum / report.evaluated;
    report.mean_p10 = p10_sum / report.evaluated;
    return report;
}

SignificanceResult fisher_randomization(const std::vector<double>& a,
                                        const std::vector<double>& b, int max_exact,
                                        std::uint64_t samples, std::uint64_t seed) {
    return fisher_impl(a, b, max_exact, samples, seed, /*parallel=*/true);
}

SignificanceResult fisher_randomization_serial(const std::vector<double>& a,
                                               const std::vector<double>& b, int max_exact,
                                               std::uint64_t samples, std::uint64_t seed) {
    return fisher_impl(a, b, max_exact, samples, seed, /*parallel=*/false);
}

}  // namespace cemb
