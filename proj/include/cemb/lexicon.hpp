#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cemb {

/// One lexical variant of a term, kept with its tokenization.
struct StringRecord {
    std::string string_id;
    std::string text;
    std::vector<std::string> words;  // unique, first-appearance order
};

/// One textual form of a concept.
struct TermRecord {
    std::string term_id;
    std::vector<StringRecord> strings;
};

/// Concept -> terms -> strings hierarchy.
struct ConceptRecord {
    std::string concept_id;
    std::vector<TermRecord> terms;
};

/// Lowercases ASCII letters, keeps alphanumeric runs as tokens (bytes >=
/// 0x80 count as token characters so non-ASCII words survive intact),
/// drops empty fragments, removes duplicates keeping the first occurrence.
std::vector<std::string> tokenize(const std::string& text);

/// 4-column TSV: concept_id, term_id, string_id, text. "#"-prefixed lines
/// are comments. Rows for one concept need not be contiguous; grouping is
/// by first appearance. Strings whose tokenization is empty are dropped
/// with a warning (a term left empty goes with them); a concept with no
/// usable string is an error, as is a duplicate (concept, term, string)
/// triple.
std::vector<ConceptRecord> load_lexicon(const std::filesystem::path& path);

/// Union of all string word lists, duplicates removed, first-appearance
/// order.
std::vector<std::string> concept_word_union(const ConceptRecord& rec);

}  // namespace cemb
