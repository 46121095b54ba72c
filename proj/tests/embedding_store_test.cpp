#include "cemb/embedding_store.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cemb/error.hpp"
#include "test_util.hpp"

using namespace cemb;
using testutil::TempDir;
using testutil::write_file;

namespace {

EmbeddingTable table_from(const std::string& content, std::uint64_t seed = 0) {
    TempDir dir;
    return load_word_vectors(write_file(dir.file("vec.txt"), content), seed);
}

}  // namespace

TEST(LoadWordVectors, ParsesSmallFile) {
    EmbeddingTable table = table_from("2 3\na 1 0 0\nb 0 1 0\n");
    EXPECT_EQ(table.dim, 3u);
    ASSERT_EQ(table.entries.size(), 2u);
    EXPECT_EQ(*table.find("a"), (Vec{1, 0, 0}));
    EXPECT_EQ(*table.find("b"), (Vec{0, 1, 0}));
}

TEST(LoadWordVectors, RejectsWrongComponentCount) {
    try {
        table_from("1 2\na 1 0 0\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("component count"), std::string::npos);
    }
}

TEST(LoadWordVectors, RejectsDuplicateToken) {
    try {
        table_from("2 2\na 1 0\na 0 1\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("duplicate token a"), std::string::npos);
    }
}

TEST(LoadWordVectors, RejectsMalformedHeader) {
    EXPECT_THROW(table_from("two 3\na 1 0 0\n"), ParseError);
    EXPECT_THROW(table_from(""), ParseError);
    EXPECT_THROW(table_from("2 0\n"), ParseError);
}

TEST(LoadWordVectors, RejectsNonFiniteComponent) {
    EXPECT_THROW(table_from("1 2\na inf 0\n"), ParseError);
    EXPECT_THROW(table_from("1 2\na nan 0\n"), ParseError);
    EXPECT_THROW(table_from("1 2\na 1e999 0\n"), ParseError);
}

TEST(LoadWordVectors, RejectsEntryCountMismatch) {
    EXPECT_THROW(table_from("3 2\na 1 0\nb 0 1\n"), ParseError);
    EXPECT_THROW(table_from("1 2\na 1 0\nb 0 1\n"), ParseError);
}

TEST(VectorOf, ReturnsStoredVector) {
    EmbeddingTable table = table_from("2 3\na 1 0 0\nb 0 1 0\n");
    EXPECT_EQ(vector_of(table, "a"), (Vec{1, 0, 0}));
}

TEST(VectorOf, MissingWordIsStable) {
    EmbeddingTable table = table_from("2 3\na 1 0 0\nb 0 1 0\n");
    Vec first = vector_of(table, "zzz");
    Vec second = vector_of(table, "zzz");
    EXPECT_EQ(first, second);
    EXPECT_EQ(first.size(), 3u);
}

TEST(VectorOf, MissingWordAgreesAcrossTables) {
    EmbeddingTable t1 = table_from("1 4\na 1 0 0 0\n", 7);
    EmbeddingTable t2 = table_from("1 4\nb 0 1 0 0\n", 7);
    EXPECT_EQ(vector_of(t1, "zzz"), vector_of(t2, "zzz"));
}

TEST(FallbackVector, Deterministic) {
    EXPECT_EQ(fallback_vector("x", 4, 0), fallback_vector("x", 4, 0));
}

TEST(FallbackVector, DistinctWordsDiffer) {
    EXPECT_NE(fallback_vector("x", 4, 0), fallback_vector("y", 4, 0));
}

TEST(FallbackVector, DistinctSeedsDiffer) {
    EXPECT_NE(fallback_vector("x", 4, 0), fallback_vector("x", 4, 1));
}

TEST(FallbackVector, ComponentsWithinRange) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t dim = 1 + rng() % 64;
        const Vec v = fallback_vector("word" + std::to_string(trial), dim, rng());
        ASSERT_EQ(v.size(), dim);
        bool nonzero = false;
        for (double c : v) {
            EXPECT_LE(std::abs(c), 0.5 / static_cast<double>(dim));
            if (c != 0.0) nonzero = true;
        }
        EXPECT_TRUE(nonzero);
    }
}

TEST(LoadDfTable, ParsesSmallFile) {
    TempDir dir;
    DfTable dfs = load_df_table(write_file(dir.file("df.txt"), "10\ncancer\t2\n"));
    EXPECT_EQ(dfs.total_docs, 10);
    EXPECT_EQ(dfs.df.at("cancer"), 2);
}

TEST(LoadDfTable, RejectsDfAboveN) {
    TempDir dir;
    try {
        load_df_table(write_file(dir.file("df.txt"), "10\ncancer\t11\n"));
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("df exceeds N"), std::string::npos);
    }
}

TEST(LoadDfTable, RejectsNonPositiveN) {
    TempDir dir;
    try {
        load_df_table(write_file(dir.file("df.txt"), "0\n"));
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("N must be positive"), std::string::npos);
    }
}

TEST(LoadDfTable, RejectsDfBelowOneAndMalformed) {
    TempDir dir;
    EXPECT_THROW(load_df_table(write_file(dir.file("a"), "10\ncancer\t0\n")), ParseError);
    EXPECT_THROW(load_df_table(write_file(dir.file("b"), "10\ncancer 2\n")), ParseError);
    EXPECT_THROW(load_df_table(write_file(dir.file("c"), "10\ncancer\ttwo\n")), ParseError);
    EXPECT_THROW(load_df_table(write_file(dir.file("d"), "10\ncancer\t2\ncancer\t3\n")),
                 ParseError);
}

TEST(IdfWeight, KnownWord) {
    DfTable dfs{10, {{"cancer", 2}}};
    EXPECT_NEAR(idf_weight(dfs, "cancer"), 1.7047480922384253, 1e-12);
}

TEST(IdfWeight, UnknownWordScoresAsNEqualsN) {
    DfTable dfs{10, {{"cancer", 2}}};
    EXPECT_NEAR(idf_weight(dfs, "unseen"), 0.09531017980432493, 1e-12);
}

TEST(IdfWeight, BoundaryNEqualsNMatchesUnknown) {
    DfTable dfs{10, {{"common", 10}}};
    EXPECT_EQ(idf_weight(dfs, "common"), idf_weight(dfs, "unseen"));
    EXPECT_NEAR(idf_weight(dfs, "common"), std::log(1.1), 1e-15);
}

TEST(IdfWeight, StrictlyDecreasingInDfAndPositive) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::int64_t n = 2 + static_cast<std::int64_t>(rng() % 1000);
        DfTable dfs;
        dfs.total_docs = n;
        double previous = std::numeric_limits<double>::infinity();
        for (std::int64_t df = 1; df <= n; df += 1 + static_cast<std::int64_t>(rng() % 7)) {
            dfs.df["w"] = df;
            const double w = idf_weight(dfs, "w");
            EXPECT_LT(w, previous);
            EXPECT_GT(w, 0.0);
            previous = w;
        }
    }
}

TEST(SaveWordVectors, RoundTripsWithinTolerance) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    EmbeddingTable table;
    table.dim = 7;
    for (int i = 0; i < 40; ++i) {
        Vec v(7);
        for (double& x : v) x = dist(rng);
        table.entries.emplace("w" + std::to_string(i), std::move(v));
    }

    TempDir dir;
    save_word_vectors(table, dir.file("out.txt"));
    EmbeddingTable loaded = load_word_vectors(dir.file("out.txt"));

    EXPECT_EQ(loaded.dim, table.dim);
    ASSERT_EQ(loaded.entries.size(), table.entries.size());
    for (const auto& [token, v] : table.entries) {
        const Vec* u = loaded.find(token);
        ASSERT_NE(u, nullptr);
        for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR((*u)[i], v[i], 1e-6);
    }
}

TEST(SaveWordVectors, HeaderIsCountThenDim) {
    EmbeddingTable table;
    table.dim = 3;
    table.entries.emplace("a", Vec{1, 2, 3});
    table.entries.emplace("b", Vec{4, 5, 6});
    TempDir dir;
    save_word_vectors(table, dir.file("out.txt"));
    const std::string content = testutil::slurp(dir.file("out.txt"));
    EXPECT_EQ(content.substr(0, content.find('\n')), "2 3");
}
