#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cemb {

using Vec = std::vector<double>;

/// Token -> dense vector table in the word2vec text format. Immutable after
/// load; concurrent readers are safe.
struct EmbeddingTable {
    std::size_t dim = 0;
    std::uint64_t fallback_seed = 0;
    std::unordered_map<std::string, Vec> entries;

    const Vec* find(const std::string& token) const {
        auto it = entries.find(token);
        return it == entries.end() ? nullptr : &it->second;
    }
};

/// Corpus document-frequency statistics backing the idf weights.
struct DfTable {
    std::int64_t total_docs = 0;  // N
    std::unordered_map<std::string, std::int64_t> df;
};

/// Parses the text format: header "<count> <dim>", then one
/// "<token> <v1> ... <vdim>" line per entry. Rejects malformed headers,
/// wrong component counts, duplicate tokens and non-finite components,
/// naming the offending line.
EmbeddingTable load_word_vectors(const std::filesystem::path& path,
                                 std::uint64_t fallback_seed = 0);

/// Writes the same text format, tokens sorted, components with 9
/// significant digits (round-trips within 1e-6 per component).
void save_word_vectors(const EmbeddingTable& table, const std::filesystem::path& path);

/// Shared writer for anything stored in the word-vector format.
void write_vector_file(const std::filesystem::path& path, std::size_t dim,
                       const std::vector<std::pair<std::string, const Vec*>>& rows);

/// Deterministic vector for an out-of-vocabulary word: splitmix64 seeded
/// with fnv1a(word) ^ seed, components i.i.d. uniform in
/// [-0.5/dim, +0.5/dim]. Purely a function of (word bytes, dim, seed).
Vec fallback_vector(std::string_view word, std::size_t dim, std::uint64_t seed);

/// Stored vector when present, fallback_vector otherwise.
Vec vector_of(const EmbeddingTable& table, const std::string& word);

/// First line "<N>", then "<token>\t<df>" lines with 1 <= df <= N.
DfTable load_df_table(const std::filesystem::path& path);

/// ln((N+1)/n). Unknown words score as if n = N, the poorest idf.
double idf_weight(const DfTable& dfs, const std::string& word);

}  // namespace cemb
