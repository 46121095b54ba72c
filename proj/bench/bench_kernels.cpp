// Times the OpenMP kernels against their serial reference implementations
// and verifies that both produce identical output.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cemb/embedder.hpp"
#include "cemb/eval.hpp"
#include "cemb/retrieval.hpp"

using namespace cemb;

namespace {

template <typename Fn>
double time_of(Fn&& fn) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    fn();
    return std::chrono::duration<double>(clock::now() - start).count();
}

std::vector<ConceptRecord> synthetic_lexicon(std::mt19937_64& rng, int concepts,
                                             int vocabulary) {
    std::vector<ConceptRecord> lexicon;
    lexicon.reserve(static_cast<std::size_t>(concepts));
    for (int c = 0; c < concepts; ++c) {
        ConceptRecord rec{"C" + std::to_string(c), {}};
        const int terms = 1 + static_cast<int>(rng() % 3);
        for (int t = 0; t < terms; ++t) {
            TermRecord term{"L" + std::to_string(t), {}};
            const int strings = 1 + static_cast<int>(rng() % 3);
            for (int s = 0; s < strings; ++s) {
                StringRecord str{"S" + std::to_string(s), "", {}};
                const int words = 1 + static_cast<int>(rng() % 4);
                for (int w = 0; w < words; ++w) {
                    const std::string token =
                        "w" + std::to_string(rng() % static_cast<std::uint64_t>(vocabulary));
                    if (std::find(str.words.begin(), str.words.end(), token) ==
                        str.words.end()) {
                        str.words.push_back(token);
                    }
                }
                term.strings.push_back(std::move(str));
            }
            rec.terms.push_back(std::move(term));
        }
        lexicon.push_back(std::move(rec));
    }
    return lexicon;
}

EmbeddingTable synthetic_table(std::mt19937_64& rng, int vocabulary, std::size_t dim) {
    EmbeddingTable table;
    table.dim = dim;
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int w = 0; w < vocabulary; ++w) {
        Vec v(dim);
        for (double& x : v) x = dist(rng);
        table.entries.emplace("w" + std::to_string(w), std::move(v));
    }
    return table;
}

struct BenchRow {
    std::string name;
    double serial_s = 0.0;
    double parallel_s = 0.0;
    bool identical = false;
};

void print_row(const BenchRow& row) {
    std::printf("%-24s %10.3f s %10.3f s %8.2fx   %s\n", row.name.c_str(), row.serial_s,
                row.parallel_s, row.serial_s / row.parallel_s,
                row.identical ? "identical" : "MISMATCH");
}

BenchRow bench_embedding(std::mt19937_64& rng, int scale) {
    const int concepts = 3000 * scale;
    const int vocabulary = 4000;
    auto lexicon = synthetic_lexicon(rng, concepts, vocabulary);
    auto table = synthetic_table(rng, vocabulary, 64);

    BenchRow row{"concept embedding"};
    ConceptVectorSet serial;
    ConceptVectorSet parallel;
    row.serial_s = time_of([&] {
        serial = build_concept_vectors_serial(lexicon, EmbedMethod::HEmb, table, nullptr);
    });
    row.parallel_s = time_of(
        [&] { parallel = build_concept_vectors(lexicon, EmbedMethod::HEmb, table, nullptr); });
    row.identical = serial.vectors == parallel.vectors;
    return row;
}

BenchRow bench_retrieval(std::mt19937_64& rng, int scale) {
    const int n_docs = 2000 * scale;
    const int vocabulary = 400;

    std::vector<ConceptDoc> docs;
    docs.reserve(static_cast<std::size_t>(n_docs));
    for (int d = 0; d < n_docs; ++d) {
        ConceptDoc doc;
        doc.doc_id = "d" + std::to_string(d);
        const int len = 4 + static_cast<int>(rng() % 12);
        for (int i = 0; i < len; ++i) {
            ++doc.tf["K" + std::to_string(rng() % static_cast<std::uint64_t>(vocabulary))];
            ++doc.length;
        }
        docs.push_back(std::move(doc));
    }
    auto idx = build_index(std::move(docs));

    std::vector<ConceptDoc> queries;
    for (int q = 0; q < 8; ++q) {
        ConceptDoc query;
        query.doc_id = "q" + std::to_string(q);
        for (int i = 0; i < 6; ++i) {
            ++query.tf["K" + std::to_string(rng() % static_cast<std::uint64_t>(vocabulary))];
            ++query.length;
        }
        queries.push_back(std::move(query));
    }

    ConceptVectorSet vectors;
    vectors.dim = 32;
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int k = 0; k < vocabulary; ++k) {
        Vec v(vectors.dim);
        for (double& x : v) x = dist(rng);
        vectors.vectors.emplace("K" + std::to_string(k), std::move(v));
    }

    const WeightingConfig wcfg{WeightingConfig::Kind::BM25, 0.2, 1.2, 0.75, 1000.0};
    const SimilarityConfig scfg{SimilarityConfig::Kind::Eq2, 0.5, false};

    BenchRow row{"retrieval scoring"};
    RankedRun serial;
    RankedRun parallel;
    row.serial_s = time_of(
        [&] { serial = run_queries_serial(queries, idx, wcfg, scfg, &vectors, nullptr, 1000); });
    row.parallel_s = time_of(
        [&] { parallel = run_queries(queries, idx, wcfg, scfg, &vectors, nullptr, 1000); });

    row.identical = true;
    for (const auto& [qid, ranked] : serial.rankings) {
        const auto& other = parallel.rankings.at(qid);
        if (ranked.size() != other.size()) row.identical = false;
        for (std::size_t i = 0; row.identical && i < ranked.size(); ++i) {
            if (ranked[i].doc_id != other[i].doc_id || ranked[i].score != other[i].score) {
                row.identical = false;
            }
        }
    }
    return row;
}

BenchRow bench_fisher(std::mt19937_64& rng, int scale) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> a(40);
    std::vector<double> b(40);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = dist(rng);
        b[i] = dist(rng);
    }
    const std::uint64_t samples = 2000000ULL * static_cast<std::uint64_t>(scale);

    BenchRow row{"fisher sampling"};
    SignificanceResult serial;
    SignificanceResult parallel;
    row.serial_s =
        time_of([&] { serial = fisher_randomization_serial(a, b, 20, samples, 17); });
    row.parallel_s = time_of([&] { parallel = fisher_randomization(a, b, 20, samples, 17); });
    row.identical = serial.p_value == parallel.p_value;
    return row;
}

}  // namespace

int main(int argc, char** argv) {
    const int scale = argc > 1 ? std::max(1, std::atoi(argv[1])) : 1;
#ifdef _OPENMP
    std::printf("openmp threads: %d, scale: %d\n\n", omp_get_max_threads(), scale);
#else
    std::printf("openmp: disabled (serial build), scale: %d\n\n", scale);
#endif
    std::printf("%-24s %12s %12s %9s   %s\n", "kernel", "serial", "parallel", "speedup",
                "check");

    std::mt19937_64 rng(12345);
    BenchRow rows[] = {
        bench_embedding(rng, scale),
        bench_retrieval(rng, scale),
        bench_fisher(rng, scale),
    };
    bool all_identical = true;
    for (const BenchRow& row : rows) {
        print_row(row);
        all_identical = all_identical && row.identical;
    }
    return all_identical ? 0 : 1;
}
