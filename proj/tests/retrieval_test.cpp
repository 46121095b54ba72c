#include "cemb/retrieval.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cemb/error.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cemb;
using testutil::TempDir;
using testutil::write_file;

namespace {

ConceptDoc make_doc(const std::string& id, const std::vector<std::string>& concepts) {
    ConceptDoc doc;
    doc.doc_id = id;
    for (const std::string& c : concepts) {
        ++doc.tf[c];
        ++doc.length;
    }
    return doc;
}

SimilarityFn constant_sim(std::map<std::pair<std::string, std::string>, double> table) {
    return [table = std::move(table)](const std::string& a, const std::string& b) {
        auto it = table.find({a, b});
        return it == table.end() ? 0.0 : it->second;
    };
}

struct RandomCollection {
    std::vector<ConceptDoc> docs;
    std::vector<ConceptDoc> queries;
    ConceptVectorSet vectors;
};

RandomCollection random_collection(std::mt19937_64& rng, int max_docs = 50,
                                   int vocabulary = 20, int max_query_concepts = 5) {
    RandomCollection out;
    const int n_docs = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_docs - 1));
    for (int d = 0; d < n_docs; ++d) {
        std::vector<std::string> concepts;
        const int len = 1 + static_cast<int>(rng() % 12);
        for (int i = 0; i < len; ++i) {
            concepts.push_back("K" + std::to_string(rng() % static_cast<std::uint64_t>(vocabulary)));
        }
        out.docs.push_back(make_doc("d" + std::to_string(d), concepts));
    }
    const int n_queries = 1 + static_cast<int>(rng() % 4);
    for (int q = 0; q < n_queries; ++q) {
        std::vector<std::string> concepts;
        const int len = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_query_concepts));
        for (int i = 0; i < len; ++i) {
            // Mix indexed and out-of-index concepts.
            const int id = static_cast<int>(rng() % static_cast<std::uint64_t>(vocabulary + 3));
            concepts.push_back("K" + std::to_string(id));
        }
        out.queries.push_back(make_doc("q" + std::to_string(q), concepts));
    }
    out.vectors.dim = 6;
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int k = 0; k < vocabulary + 3; ++k) {
        Vec v(6);
        for (double& x : v) x = dist(rng);
        out.vectors.vectors.emplace("K" + std::to_string(k), std::move(v));
    }
    return out;
}

}  // namespace

TEST(LoadConceptDocs, ParsesRepetitionsAsTf) {
    TempDir dir;
    auto docs = load_concept_docs(
        write_file(dir.file("docs.tsv"), "d1\tc1 c1 c2\nd2\tc2\nq\t\nplain\n"));
    ASSERT_EQ(docs.size(), 4u);
    EXPECT_EQ(docs[0].tf.at("c1"), 2);
    EXPECT_EQ(docs[0].tf.at("c2"), 1);
    EXPECT_EQ(docs[0].length, 3);
    EXPECT_TRUE(docs[2].tf.empty());
    EXPECT_TRUE(docs[3].tf.empty());
}

TEST(LoadConceptDocs, RejectsMalformed) {
    TempDir dir;
    EXPECT_THROW(load_concept_docs(write_file(dir.file("a"), "\tc1\n")), ParseError);
    EXPECT_THROW(load_concept_docs(write_file(dir.file("b"), "d1\tc1\tc2\n")), ParseError);
}

TEST(SaveConceptDocs, CanonicalRoundTrip) {
    std::mt19937_64 rng(3);
    auto coll = random_collection(rng);
    TempDir dir;
    save_concept_docs(coll.docs, dir.file("docs.tsv"));
    auto loaded = load_concept_docs(dir.file("docs.tsv"));
    ASSERT_EQ(loaded.size(), coll.docs.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        EXPECT_EQ(loaded[i].doc_id, coll.docs[i].doc_id);
        EXPECT_EQ(loaded[i].tf, coll.docs[i].tf);
        EXPECT_EQ(loaded[i].length, coll.docs[i].length);
    }
    // Re-saving the canonical form is byte-stable.
    save_concept_docs(loaded, dir.file("again.tsv"));
    EXPECT_EQ(testutil::slurp(dir.file("docs.tsv")), testutil::slurp(dir.file("again.tsv")));
}

TEST(BuildIndex, ComputesStatistics) {
    auto idx = build_index({make_doc("d1", {"c1", "c2"}),
                            make_doc("d2", {"c2", "c2", "c3", "c4"})});
    EXPECT_EQ(idx.doc_count(), 2);
    EXPECT_EQ(idx.avdl, 3.0);
    EXPECT_EQ(idx.df.at("c2"), 2);
    EXPECT_EQ(idx.df.at("c1"), 1);
    ASSERT_EQ(idx.postings.at("c2").size(), 2u);
    EXPECT_EQ(idx.postings.at("c2")[1], (std::pair<int, int>{1, 2}));
}

TEST(BuildIndex, RejectsDuplicateAndEmpty) {
    EXPECT_THROW(build_index({make_doc("d1", {"c1"}), make_doc("d1", {"c2"})}),
                 ValidationError);
    EXPECT_THROW(build_index({}), ValidationError);
}

TEST(DocWeight, PivotedByHand) {
    auto idx = build_index({make_doc("d1", {"c1", "c2", "c3"}),
                            make_doc("d2", {"c2", "c2", "c3"})});  // avdl = 3
    const WeightingConfig piv{WeightingConfig::Kind::Pivoted, 0.2, 1.2, 0.75, 1000.0};
    // tf=1, dl=avdl -> 1.0
    EXPECT_NEAR(doc_weight(piv, idx, "c1", idx.docs[0]), 1.0, 1e-12);
    // tf=2, dl=avdl -> 1 + ln(1 + ln 2)
    EXPECT_NEAR(doc_weight(piv, idx, "c2", idx.docs[1]), 1.5265890341390445, 1e-12);
}

TEST(DocWeight, Bm25ByHand) {
    std::vector<ConceptDoc> docs;
    docs.push_back(make_doc("d0", {"c1", "x1", "x2"}));
    for (int i = 1; i < 10; ++i) {
        docs.push_back(make_doc("d" + std::to_string(i), {"x1", "x2", "x3"}));
    }
    auto idx = build_index(std::move(docs));  // N=10, avdl=3, df(c1)=1
    const WeightingConfig bm25{WeightingConfig::Kind::BM25, 0.2, 1.2, 0.75, 1000.0};
    EXPECT_NEAR(doc_weight(bm25, idx, "c1", idx.docs[0]), 1.8458266904983307, 1e-12);
}

TEST(DocWeight, Bm25IdfClampedAtZero) {
    // df = N makes the raw idf negative; the clamp keeps the weight at 0.
    auto idx = build_index({make_doc("d1", {"c1"}), make_doc("d2", {"c1"})});
    const WeightingConfig bm25{WeightingConfig::Kind::BM25, 0.2, 1.2, 0.75, 1000.0};
    EXPECT_EQ(doc_weight(bm25, idx, "c1", idx.docs[0]), 0.0);
}

TEST(DocWeight, MissingConceptThrows) {
    auto idx = build_index({make_doc("d1", {"c1"})});
    const WeightingConfig piv{};
    EXPECT_THROW(doc_weight(piv, idx, "c9", idx.docs[0]), ValidationError);
}

TEST(QueryWeight, PivotedAndBm25ByHand) {
    std::vector<ConceptDoc> docs;
    docs.push_back(make_doc("d0", {"c1", "x1"}));
    docs.push_back(make_doc("d1", {"c1", "x1"}));
    for (int i = 2; i < 10; ++i) docs.push_back(make_doc("d" + std::to_string(i), {"x1"}));
    auto idx = build_index(std::move(docs));  // N=10, df(c1)=2

    const WeightingConfig piv{WeightingConfig::Kind::Pivoted, 0.2, 1.2, 0.75, 1000.0};
    const WeightingConfig bm25{WeightingConfig::Kind::BM25, 0.2, 1.2, 0.75, 1000.0};
    EXPECT_NEAR(query_weight(piv, idx, "c1", 1), 1.7047480922384253, 1e-12);  // ln 5.5
    EXPECT_NEAR(query_weight(bm25, idx, "c1", 1), 1.0, 1e-12);  // 1001/1001
    // Unseen concept: df falls back to N.
    EXPECT_NEAR(query_weight(piv, idx, "unseen", 1), 0.09531017980432493, 1e-12);
    EXPECT_THROW(query_weight(piv, idx, "c1", 0), ValidationError);
}

TEST(BestMatch, ExactMatchWinsRegardlessOfBackend) {
    auto doc = make_doc("d1", {"c1", "c2"});
    // A back-end that would score c2 higher cannot override an exact match.
    auto sim = constant_sim({{{"c1", "c2"}, 0.9}});
    auto match = best_match("c1", doc, sim);
    ASSERT_TRUE(match.has_value());
    EXPECT_EQ(match->concept_id, "c1");
    EXPECT_EQ(match->sim, 1.0);
}

TEST(BestMatch, NoSimMissesWhenAbsent) {
    auto doc = make_doc("d1", {"c2", "c3"});
    auto nosim = [](const std::string& a, const std::string& b) {
        return a == b ? 1.0 : 0.0;
    };
    EXPECT_EQ(best_match("c1", doc, nosim), std::nullopt);
}

TEST(BestMatch, TiesBreakToSmallestId) {
    auto doc = make_doc("d1", {"c3", "c2"});
    auto sim = constant_sim({{{"c1", "c2"}, 0.3}, {{"c1", "c3"}, 0.3}});
    auto match = best_match("c1", doc, sim);
    ASSERT_TRUE(match.has_value());
    EXPECT_EQ(match->concept_id, "c2");
    EXPECT_EQ(match->sim, 0.3);
}

TEST(ScoreRsv, ExactMatchTerm) {
    auto idx = build_index({make_doc("d1", {"c1", "c2"}), make_doc("d2", {"c2"})});
    const WeightingConfig piv{};
    auto query = make_doc("q", {"c1"});
    auto nosim = [](const std::string& a, const std::string& b) {
        return a == b ? 1.0 : 0.0;
    };
    const double expected = query_weight(piv, idx, "c1", 1) * 1.0 *
                            doc_weight(piv, idx, "c1", idx.docs[0]);
    EXPECT_EQ(score_rsv(query, idx.docs[0], idx, piv, nosim), expected);
    EXPECT_EQ(score_rsv(query, idx.docs[1], idx, piv, nosim), 0.0);
}

TEST(ScoreRsv, SubstitutionTermByHand) {
    auto idx = build_index({make_doc("d1", {"c2", "c3"}), make_doc("d2", {"c1"})});
    const WeightingConfig piv{};
    auto query = make_doc("q", {"c1", "c2"});
    auto sim = constant_sim({{{"c1", "c3"}, 0.2}, {{"c1", "c2"}, 0.1}});
    // c1 -> best doc concept c3 (0.2 beats 0.1); c2 -> exact.
    const ConceptDoc& doc = idx.docs[0];
    const double expected =
        query_weight(piv, idx, "c1", 1) * 0.2 * doc_weight(piv, idx, "c3", doc) +
        query_weight(piv, idx, "c2", 1) * 1.0 * doc_weight(piv, idx, "c2", doc);
    EXPECT_NEAR(score_rsv(query, doc, idx, piv, sim), expected, 1e-15);
}

TEST(ScoreRsv, MatchesBruteForceOracleNoSim) {
    std::mt19937_64 rng(71);
    auto nosim = [](const std::string& a, const std::string& b) {
        return a == b ? 1.0 : 0.0;
    };
    for (int trial = 0; trial < 30; ++trial) {
        auto coll = random_collection(rng);
        auto idx = build_index(coll.docs);
        for (auto kind : {WeightingConfig::Kind::Pivoted, WeightingConfig::Kind::BM25}) {
            WeightingConfig cfg;
            cfg.kind = kind;
            for (const auto& q : coll.queries) {
                for (const auto& d : idx.docs) {
                    EXPECT_NEAR(score_rsv(q, d, idx, cfg, nosim),
                                oracle::rsv(q, d, idx, cfg, nosim), 1e-10);
                }
            }
        }
    }
}

TEST(ScoreRsv, MatchesBruteForceOracleEq2) {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 20; ++trial) {
        auto coll = random_collection(rng);
        auto idx = build_index(coll.docs);
        SimilarityConfig scfg{SimilarityConfig::Kind::Eq2, 0.5, false};
        SimilarityFn sim = make_similarity(scfg, &coll.vectors, nullptr);
        for (auto kind : {WeightingConfig::Kind::Pivoted, WeightingConfig::Kind::BM25}) {
            WeightingConfig cfg;
            cfg.kind = kind;
            for (const auto& q : coll.queries) {
                for (const auto& d : idx.docs) {
                    EXPECT_NEAR(score_rsv(q, d, idx, cfg, sim),
                                oracle::rsv(q, d, idx, cfg, sim), 1e-10);
                }
            }
        }
    }
}

TEST(ScoreRsv, MonotoneInSimilarityBackend) {
    // Raising beta dominates pointwise, so no score may decrease.
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 20; ++trial) {
        auto coll = random_collection(rng);
        auto idx = build_index(coll.docs);
        SimilarityFn low = make_similarity({SimilarityConfig::Kind::Eq2, 0.3, false},
                                           &coll.vectors, nullptr);
        SimilarityFn high = make_similarity({SimilarityConfig::Kind::Eq2, 0.5, false},
                                            &coll.vectors, nullptr);
        const WeightingConfig cfg{};
        for (const auto& q : coll.queries) {
            for (const auto& d : idx.docs) {
                EXPECT_LE(score_rsv(q, d, idx, cfg, low),
                          score_rsv(q, d, idx, cfg, high) + 1e-12);
            }
        }
    }
}

TEST(ScoreRsv, NonNegativeAndZeroIffNoMatch) {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 20; ++trial) {
        auto coll = random_collection(rng);
        auto idx = build_index(coll.docs);
        SimilarityFn sim = make_similarity({SimilarityConfig::Kind::Eq2, 0.5, false},
                                           &coll.vectors, nullptr);
        const WeightingConfig cfg{};
        for (const auto& q : coll.queries) {
            for (const auto& d : idx.docs) {
                const double rsv = score_rsv(q, d, idx, cfg, sim);
                EXPECT_GE(rsv, 0.0);
                bool any_match = false;
                for (const auto& [c, tf] : q.tf) {
                    if (best_match(c, d, sim)) any_match = true;
                }
                EXPECT_EQ(rsv > 0.0, any_match);
            }
        }
    }
}

TEST(ScoreRsv, Eq2InvariantUnderUniformVectorScaling) {
    std::mt19937_64 rng(89);
    auto coll = random_collection(rng);
    auto idx = build_index(coll.docs);

    ConceptVectorSet scaled = coll.vectors;
    for (auto& [id, v] : scaled.vectors) {
        for (double& x : v) x *= 4.0;  // power of two keeps division exact
    }

    SimilarityFn sim = make_similarity({SimilarityConfig::Kind::Eq2, 0.5, false},
                                       &coll.vectors, nullptr);
    SimilarityFn sim_scaled = make_similarity({SimilarityConfig::Kind::Eq2, 0.5, false},
                                              &scaled, nullptr);
    const WeightingConfig cfg{};
    for (const auto& q : coll.queries) {
        for (const auto& d : idx.docs) {
            EXPECT_EQ(score_rsv(q, d, idx, cfg, sim), score_rsv(q, d, idx, cfg, sim_scaled));
        }
    }
}

TEST(RunQueries, NoSimReturnsOnlySharedConceptDocs) {
    auto idx = build_index({make_doc("d1", {"c1"}), make_doc("d2", {"c2"}),
                            make_doc("d3", {"c1", "c3"})});
    auto run = run_queries({make_doc("q1", {"c1"})}, idx, WeightingConfig{},
                           {SimilarityConfig::Kind::NoSim, 0.5, false}, nullptr, nullptr, 10);
    const auto& ranked = run.rankings.at("q1");
    ASSERT_EQ(ranked.size(), 2u);
    EXPECT_EQ(ranked[0].doc_id, "d1");  // shorter doc scores higher under pivoted
    EXPECT_EQ(ranked[1].doc_id, "d3");
}

TEST(RunQueries, TiedScoresOrderByDocId) {
    auto idx = build_index({make_doc("db", {"c1"}), make_doc("da", {"c1"})});
    auto run = run_queries({make_doc("q1", {"c1"})}, idx, WeightingConfig{},
                           {SimilarityConfig::Kind::NoSim, 0.5, false}, nullptr, nullptr, 10);
    const auto& ranked = run.rankings.at("q1");
    ASSERT_EQ(ranked.size(), 2u);
    EXPECT_EQ(ranked[0].score, ranked[1].score);
    EXPECT_EQ(ranked[0].doc_id, "da");
    EXPECT_EQ(ranked[1].doc_id, "db");
}

TEST(RunQueries, TruncatesToK) {
    std::vector<ConceptDoc> docs;
    for (int i = 0; i < 30; ++i) docs.push_back(make_doc("d" + std::to_string(i), {"c1"}));
    auto idx = build_index(std::move(docs));
    auto run = run_queries({make_doc("q1", {"c1"})}, idx, WeightingConfig{},
                           {SimilarityConfig::Kind::NoSim, 0.5, false}, nullptr, nullptr, 7);
    EXPECT_EQ(run.rankings.at("q1").size(), 7u);
}

TEST(RunQueries, EmptyQueryGivesEmptyRanking) {
    auto idx = build_index({make_doc("d1", {"c1"})});
    testing::internal::CaptureStderr();
    auto run = run_queries({make_doc("q1", {})}, idx, WeightingConfig{},
                           {SimilarityConfig::Kind::NoSim, 0.5, false}, nullptr, nullptr, 10);
    const std::string warning = testing::internal::GetCapturedStderr();
    EXPECT_NE(warning.find("q1"), std::string::npos);
    ASSERT_TRUE(run.rankings.contains("q1"));
    EXPECT_TRUE(run.rankings.at("q1").empty());
}

TEST(RunQueries, RejectsDuplicateQueryIdsAndMissingResources) {
    auto idx = build_index({make_doc("d1", {"c1"})});
    EXPECT_THROW(run_queries({make_doc("q1", {"c1"}), make_doc("q1", {"c2"})}, idx,
                             WeightingConfig{}, {SimilarityConfig::Kind::NoSim, 0.5, false},
                             nullptr, nullptr, 10),
                 ValidationError);
    EXPECT_THROW(run_queries({make_doc("q1", {"c1"})}, idx, WeightingConfig{},
                             {SimilarityConfig::Kind::Eq2, 0.5, false}, nullptr, nullptr, 10),
                 ValidationError);
}

TEST(RunQueries, SerialMatchesParallelBitwise) {
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 10; ++trial) {
        auto coll = random_collection(rng);
        auto idx = build_index(coll.docs);
        SimilarityConfig scfg{SimilarityConfig::Kind::Eq2, 0.5, false};
        auto parallel =
            run_queries(coll.queries, idx, WeightingConfig{}, scfg, &coll.vectors, nullptr, 100);
        auto serial = run_queries_serial(coll.queries, idx, WeightingConfig{}, scfg,
                                         &coll.vectors, nullptr, 100);
        ASSERT_EQ(parallel.rankings.size(), serial.rankings.size());
        for (const auto& [qid, ranked] : parallel.rankings) {
            const auto& other = serial.rankings.at(qid);
            ASSERT_EQ(ranked.size(), other.size());
            for (std::size_t i = 0; i < ranked.size(); ++i) {
                EXPECT_EQ(ranked[i].doc_id, other[i].doc_id);
                EXPECT_EQ(ranked[i].score, other[i].score);
            }
        }
    }
}

TEST(RunQueries, InvariantUnderDocumentPermutation) {
    std::mt19937_64 rng(101);
    auto coll = random_collection(rng);
    auto idx = build_index(coll.docs);
    auto shuffled_docs = coll.docs;
    std::shuffle(shuffled_docs.begin(), shuffled_docs.end(), rng);
    auto idx2 = build_index(shuffled_docs);

    SimilarityConfig scfg{SimilarityConfig::Kind::Eq2, 0.5, false};
    auto a = run_queries(coll.queries, idx, WeightingConfig{}, scfg, &coll.vectors, nullptr, 50);
    auto b = run_queries(coll.queries, idx2, WeightingConfig{}, scfg, &coll.vectors, nullptr, 50);
    ASSERT_EQ(a.rankings.size(), b.rankings.size());
    for (const auto& [qid, ranked] : a.rankings) {
        const auto& other = b.rankings.at(qid);
        ASSERT_EQ(ranked.size(), other.size()) << qid;
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            EXPECT_EQ(ranked[i].doc_id, other[i].doc_id);
            EXPECT_NEAR(ranked[i].score, other[i].score, 1e-12);
        }
    }
}

TEST(RunQueries, MinSimThresholdPrunesWeakMatches) {
    auto idx = build_index({make_doc("d1", {"c2"})});
    ConceptVectorSet vectors;
    vectors.dim = 2;
    vectors.vectors = {{"c1", {1.0, 0.0}}, {"c2", {1.0, 1.0}}};  // eq2 sim = 0.25
    SimilarityConfig scfg{SimilarityConfig::Kind::Eq2, 0.5, false};

    auto loose = run_queries({make_doc("q1", {"c1"})}, idx, WeightingConfig{}, scfg, &vectors,
                             nullptr, 10, 0.0);
    EXPECT_EQ(loose.rankings.at("q1").size(), 1u);

    auto strict = run_queries({make_doc("q1", {"c1"})}, idx, WeightingConfig{}, scfg, &vectors,
                              nullptr, 10, 0.3);
    EXPECT_TRUE(strict.rankings.at("q1").empty());
}
