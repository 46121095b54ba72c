#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cemb/embedding_store.hpp"
#include "cemb/lexicon.hpp"

namespace cemb {

enum class EmbedMethod { FEmb, HEmb, WEmb };

EmbedMethod parse_embed_method(const std::string& name);
std::string to_string(EmbedMethod method);

struct ConceptVectorSet {
    std::size_t dim = 0;
    EmbedMethod method = EmbedMethod::FEmb;
    std::map<std::string, Vec> vectors;  // concept id -> vector

    const Vec* find(const std::string& concept_id) const {
        auto it = vectors.find(concept_id);
        return it == vectors.end() ? nullptr : &it->second;
    }
};

/// Flat embedding: component-wise mean of the word vectors over the
/// concept's word union. Missing words contribute their fallback vectors.
Vec embed_femb(const ConceptRecord& rec, const EmbeddingTable& table);

/// Hierarchical embedding: mean of word vectors per string, mean of string
/// vectors per term, mean of term vectors per concept. A word appearing in
/// several strings is revisited once per string.
Vec embed_hemb(const ConceptRecord& rec, const EmbeddingTable& table);

/// Weighted embedding: (1/l) * sum of idf(w) * vec(w) over the l words of
/// the concept's word union. The divisor is the word count l, not the
/// weight sum; cosine-based similarity is scale-invariant either way.
Vec embed_wemb(const ConceptRecord& rec, const EmbeddingTable& table,
               const DfTable& dfs);

/// One vector per concept, embedded in parallel across concepts; the
/// assembled set does not depend on completion order. dfs is required for
/// WEmb and ignored otherwise.
ConceptVectorSet build_concept_vectors(const std::vector<ConceptRecord>& lexicon,
                                       EmbedMethod method, const EmbeddingTable& table,
                                       const DfTable* dfs);

/// Plain single-threaded loop; reference for tests and the benchmark.
ConceptVectorSet build_concept_vectors_serial(const std::vector<ConceptRecord>& lexicon,
                                              EmbedMethod method,
                                              const EmbeddingTable& table,
                                              const DfTable* dfs);

/// Word-vector text format with concept ids as tokens, so concept and word
/// vectors live in one comparable space.
void save_concept_vectors(const ConceptVectorSet& set, const std::filesystem::path& path);

/// Distinct words across the lexicon that the table does not contain.
std::size_t count_missing_words(const std::vector<ConceptRecord>& lexicon,
                                const EmbeddingTable& table);

}  // namespace cemb
