#include "cemb/embedding_store.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cemb/error.hpp"
#include "cemb/rng.hpp"
#include "cemb/text_io.hpp"

namespace cemb {

EmbeddingTable load_word_vectors(const std::filesystem::path& path,
                                 std::uint64_t fallback_seed) {
    std::vector<std::string> lines = read_lines(path);
    const std::string name = path.string();
    if (lines.empty()) throw ParseError(name, 1, "malformed header: empty file");

    auto header = split_whitespace(lines[0]);
    long long count = 0;
    long long dim = 0;
    if (header.size() != 2 || !parse_int(header[0], count) || !parse_int(header[1], dim) ||
        count < 0 || dim < 1) {
        throw ParseError(name, 1, "malformed header, expected \"<count> <dim>\"");
    }

    EmbeddingTable table;
    table.dim = static_cast<std::size_t>(dim);
    table.fallback_seed = fallback_seed;
    table.entries.reserve(static_cast<std::size_t>(count));

    std::size_t seen = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split_whitespace(lines[i]);
        if (fields.size() != static_cast<std::size_t>(dim) + 1) {
            throw ParseError(name, i + 1, "wrong component count (expected " +
                                              std::to_string(dim) + " components)");
        }
        Vec vec(static_cast<std::size_t>(dim));
        for (std::size_t c = 0; c < vec.size(); ++c) {
            if (!parse_double(fields[c + 1], vec[c])) {
                throw ParseError(name, i + 1, "unparsable component \"" + fields[c + 1] + "\"");
            }
            if (!std::isfinite(vec[c])) {
                throw ParseError(name, i + 1, "non-finite component \"" + fields[c + 1] + "\"");
            }
        }
        if (!table.entries.emplace(fields[0], std::move(vec)).second) {
            throw ParseError(name, i + 1, "duplicate token " + fields[0]);
        }
        ++seen;
    }
    if (seen != static_cast<std::size_t>(count)) {
        throw ParseError(name, "header promises " + std::to_string(count) + " entries, found " +
                                   std::to_string(seen));
    }
    return table;
}

void write_vector_file(const std::filesystem::path& path, std::size_t dim,
                       const std::vector<std::pair<std::string, const Vec*>>& rows) {
    std::string out;
    out += std::to_string(rows.size());
    out += ' ';
    out += std::to_string(dim);
    out += '\n';
    for (const auto& [token, vec] : rows) {
        out += token;
        for (double v : *vec) {
            out += ' ';
            out += format_component(v);
        }
        out += '\n';
    }
    atomic_write(path, out);
}

void save_word_vectors(const EmbeddingTable& table, const std::filesystem::path& path) {
    std::vector<std::pair<std::string, const Vec*>> rows;
    rows.reserve(table.entries.size());
    for (const auto& [token, vec] : table.entries) rows.emplace_back(token, &vec);
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    write_vector_file(path, table.dim, rows);
}

Vec fallback_vector(std::string_view word, std::size_t dim, std::uint64_t seed) {
    SplitMix64 rng(fnv1a64(word) ^ seed);
    Vec vec(dim);
    const double half_width = 0.5 / static_cast<double>(dim);
    bool all_zero = true;
    for (double& v : vec) {
        v = (rng.next_double() - 0.5) / static_cast<double>(dim);
        if (v != 0.0) all_zero = false;
    }
    if (all_zero && dim > 0) vec[0] = half_width;
    return vec;
}

Vec vector_of(const EmbeddingTable& table, const std::string& word) {
    if (const Vec* stored = table.find(word)) return *stored;
    return fallback_vector(word, table.dim, table.fallback_seed);
}

DfTable load_df_table(const std::filesystem::path& path) {
    std::vector<std::string> lines = read_lines(path);
    const std::string name = path.string();
    if (lines.empty()) throw ParseError(name, 1, "empty file, expected \"<N>\" header");

    DfTable table;
    long long n_docs = 0;
    if (!parse_int(lines[0], n_docs) || n_docs < 1) {
        throw ParseError(name, 1, "N must be positive");
    }
    table.total_docs = n_docs;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split_tabs(lines[i]);
        long long df = 0;
        if (fields.size() != 2 || fields[0].empty() || !parse_int(fields[1], df)) {
            throw ParseError(name, i + 1, "malformed line, expected \"<token>\\t<df>\"");
        }
        if (df < 1) throw ParseError(name, i + 1, "df below 1 for token " + fields[0]);
        if (df > table.total_docs) {
            throw ParseError(name, i + 1, "df exceeds N for token " + fields[0]);
        }
        if (!table.df.emplace(fields[0], df).second) {
            throw ParseError(name, i + 1, "duplicate token " + fields[0]);
        }
    }
    return table;
}

double idf_weight(const DfTable& dfs, const std::string& word) {
    auto it = dfs.df.find(word);
    const double n = it == dfs.df.end() ? static_cast<double>(dfs.total_docs)
                                        : static_cast<double>(it->second);
    return std::log((static_cast<double>(dfs.total_docs) + 1.0) / n);
}

}  // namespace cemb
