#include "cemb/embedder.hpp"

#include <atomic>
#include <unordered_set>
#include <utility>

#include "cemb/error.hpp"

namespace cemb {

namespace {

void accumulate(Vec& acc, const Vec& v) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
}

void divide_by(Vec& v, double count) {
    for (double& x : v) x /= count;
}

Vec mean_of_words(const std::vector<std::string>& words, const EmbeddingTable& table) {
    Vec acc(table.dim, 0.0);
    for (const std::string& w : words) accumulate(acc, vector_of(table, w));
    divide_by(acc, static_cast<double>(words.size()));
    return acc;
}

Vec embed_one(const ConceptRecord& rec, EmbedMethod method, const EmbeddingTable& table,
              const DfTable* dfs) {
    switch (method) {
        case EmbedMethod::FEmb:
            return embed_femb(rec, table);
        case EmbedMethod::HEmb:
            return embed_hemb(rec, table);
        case EmbedMethod::WEmb:
            return embed_wemb(rec, table, *dfs);
    }
    throw ValidationError("unknown embedding method");
}

void check_wemb_resources(EmbedMethod method, const DfTable* dfs) {
    if (method == EmbedMethod::WEmb && dfs == nullptr) {
        throw ValidationError("wemb requires document-frequency statistics");
    }
}

ConceptVectorSet assemble(std::size_t dim, EmbedMethod method,
                          const std::vector<ConceptRecord>& lexicon,
                          std::vector<Vec>&& results) {
    ConceptVectorSet set;
    set.dim = dim;
    set.method = method;
    for (std::size_t i = 0; i < lexicon.size(); ++i) {
        if (!set.vectors.emplace(lexicon[i].concept_id, std::move(results[i])).second) {
            throw ValidationError("duplicate concept id " + lexicon[i].concept_id);
        }
    }
    return set;
}

}  // namespace

EmbedMethod parse_embed_method(const std::string& name) {
    if (name == "femb") return EmbedMethod::FEmb;
    if (name == "hemb") return EmbedMethod::HEmb;
    if (name == "wemb") return EmbedMethod::WEmb;
    throw ValidationError("unknown method \"" + name + "\", expected femb|hemb|wemb");
}

std::string to_string(EmbedMethod method) {
    switch (method) {
        case EmbedMethod::FEmb: return "femb";
        case EmbedMethod::HEmb: return "hemb";
        case EmbedMethod::WEmb: return "wemb";
    }
    return "?";
}

Vec embed_femb(const ConceptRecord& rec, const EmbeddingTable& table) {
    std::vector<std::string> words = concept_word_union(rec);
    if (words.empty()) {
        throw ValidationError("concept " + rec.concept_id + " has an empty word union");
    }
    return mean_of_words(words, table);
}

Vec embed_hemb(const ConceptRecord& rec, const EmbeddingTable& table) {
    if (rec.terms.empty()) {
        throw ValidationError("concept " + rec.concept_id + " has no terms");
    }
    Vec concept_acc(table.dim, 0.0);
    for (const TermRecord& term : rec.terms) {
        if (term.strings.empty()) {
            throw ValidationError("concept " + rec.concept_id + ": term " + term.term_id +
                                  " has no strings");
        }
        Vec term_acc(table.dim, 0.0);
        for (const StringRecord& str : term.strings) {
            if (str.words.empty()) {
                throw ValidationError("concept " + rec.concept_id + ": string " +
                                      str.string_id + " has no words");
            }
            accumulate(term_acc, mean_of_words(str.words, table));
        }
        divide_by(term_acc, static_cast<double>(term.strings.size()));
        accumulate(concept_acc, term_acc);
    }
    divide_by(concept_acc, static_cast<double>(rec.terms.size()));
    return concept_acc;
}

Vec embed_wemb(const ConceptRecord& rec, const EmbeddingTable& table, const DfTable& dfs) {
    std::vector<std::string> words = concept_word_union(rec);
    if (words.empty()) {
        throw ValidationError("concept " + rec.concept_id + " has an empty word union");
    }
    Vec acc(table.dim, 0.0);
    for (const std::string& w : words) {
        const double alpha = idf_weight(dfs, w);
        Vec v = vector_of(table, w);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += alpha * v[i];
    }
    divide_by(acc, static_cast<double>(words.size()));
    return acc;
}

ConceptVectorSet build_concept_vectors(const std::vector<ConceptRecord>& lexicon,
                                       EmbedMethod method, const EmbeddingTable& table,
                                       const DfTable* dfs) {
    check_wemb_resources(method, dfs);
    const std::size_t n = lexicon.size();
    std::vector<Vec> results(n);
    std::vector<std::string> errors(n);
    std::atomic<bool> failed{false};

#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            results[i] = embed_one(lexicon[i], method, table, dfs);
        } catch (const std::exception& e) {
            errors[i] = e.what();
            failed.store(true, std::memory_order_relaxed);
        }
    }

    if (failed.load()) {
        for (const std::string& err : errors) {
            if (!err.empty()) throw ValidationError(err);
        }
    }
    return assemble(table.dim, method, lexicon, std::move(results));
}

ConceptVectorSet build_concept_vectors_serial(const std::vector<ConceptRecord>& lexicon,
                                              EmbedMethod method, const EmbeddingTable& table,
                                              const DfTable* dfs) {
    check_wemb_resources(method, dfs);
    std::vector<Vec> results(lexicon.size());
    for (std::size_t i = 0; i < lexicon.size(); ++i) {
        results[i] = embed_one(lexicon[i], method, table, dfs);
    }
    return assemble(table.dim, method, lexicon, std::move(results));
}

void save_concept_vectors(const ConceptVectorSet& set, const std::filesystem::path& path) {
    std::vector<std::pair<std::string, const Vec*>> rows;
    rows.reserve(set.vectors.size());
    for (const auto& [id, vec] : set.vectors) rows.emplace_back(id, &vec);
    write_vector_file(path, set.dim, rows);
}

std::size_t count_missing_words(const std::vector<ConceptRecord>& lexicon,
                                const EmbeddingTable& table) {
    std::unordered_set<std::string> missing;
    for (const ConceptRecord& rec : lexicon) {
        for (const TermRecord& term : rec.terms) {
            for (const StringRecord& str : term.strings) {
                for (const std::string& w : str.words) {
                    if (table.find(w) == nullptr) missing.insert(w);
                }
            }
        }
    }
    return missing.size();
}

}  // namespace cemb
