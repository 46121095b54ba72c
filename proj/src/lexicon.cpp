#include "cemb/lexicon.hpp"

#include <iostream>
#include <unordered_map>
#include <unordered_set>

#include "cemb/error.hpp"
#include "cemb/text_io.hpp"

namespace cemb {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::unordered_set<std::string> seen;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            if (seen.insert(current).second) tokens.push_back(current);
            current.clear();
        }
    };
    for (unsigned char c : text) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
            current.push_back(static_cast<char>(c));
        } else if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::vector<ConceptRecord> load_lexicon(const std::filesystem::path& path) {
    std::vector<std::string> lines = read_lines(path);
    const std::string name = path.string();

    std::vector<ConceptRecord> concepts;
    std::unordered_map<std::string, std::size_t> concept_pos;
    std::unordered_set<std::string> triples;
    std::vector<std::string> row_concepts;  // first-appearance order, dropped rows included
    std::unordered_set<std::string> row_concepts_seen;

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_tabs(line);
        if (fields.size() != 4 || fields[0].empty() || fields[1].empty() ||
            fields[2].empty() || fields[3].empty()) {
            throw ParseError(name, i + 1,
                             "malformed line, expected "
                             "\"<concept_id>\\t<term_id>\\t<string_id>\\t<text>\"");
        }
        const std::string& cid = fields[0];
        const std::string& tid = fields[1];
        const std::string& sid = fields[2];
        const std::string& text = fields[3];

        std::string triple = cid + '\t' + tid + '\t' + sid;
        if (!triples.insert(triple).second) {
            throw ParseError(name, i + 1,
                             "duplicate (" + cid + ", " + tid + ", " + sid + ") triple");
        }
        if (row_concepts_seen.insert(cid).second) row_concepts.push_back(cid);

        std::vector<std::string> words = tokenize(text);
        if (words.empty()) {
            std::cerr << "warning: " << name << ":" << (i + 1) << ": string " << sid
                      << " of concept " << cid << " tokenizes to nothing, dropped\n";
            continue;
        }

        auto [cit, inserted] = concept_pos.emplace(cid, concepts.size());
        if (inserted) concepts.push_back(ConceptRecord{cid, {}});
        ConceptRecord& rec = concepts[cit->second];

        TermRecord* term = nullptr;
        for (TermRecord& t : rec.terms) {
            if (t.term_id == tid) {
                term = &t;
                break;
            }
        }
        if (term == nullptr) {
            rec.terms.push_back(TermRecord{tid, {}});
            term = &rec.terms.back();
        }
        term->strings.push_back(StringRecord{sid, text, std::move(words)});
    }

    // A concept only enters the output once a string survives tokenization,
    // so a gap between row ids and output ids means every string was dropped.
    for (const std::string& cid : row_concepts) {
        if (!concept_pos.contains(cid)) {
            throw ParseError(name, "concept " + cid + " has no usable strings");
        }
    }
    return concepts;
}

std::vector<std::string> concept_word_union(const ConceptRecord& rec) {
    std::vector<std::string> words;
    std::unordered_set<std::string> seen;
    for (const TermRecord& term : rec.terms) {
        for (const StringRecord& str : term.strings) {
            for (const std::string& w : str.words) {
                if (seen.insert(w).second) words.push_back(w);
            }
        }
    }
    return words;
}

}  // namespace cemb
