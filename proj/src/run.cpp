#include "cemb/run.hpp"

#include <unordered_map>
#include <unordered_set>

#include "cemb/error.hpp"
#include "cemb/text_io.hpp"

namespace cemb {

RankedRun read_run(const std::filesystem::path& path) {
    std::vector<std::string> lines = read_lines(path);
    const std::string name = path.string();

    RankedRun run;
    std::unordered_map<std::string, std::unordered_set<std::string>> seen_docs;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty()) continue;
        auto fields = split_whitespace(line);
        long long rank = 0;
        double score = 0.0;
        if (fields.size() != 6 || fields[1] != "Q0" || !parse_int(fields[3], rank) ||
            !parse_double(fields[4], score)) {
            throw ParseError(name, i + 1,
                             "malformed line, expected \"<qid> Q0 <docid> <rank> <score> <tag>\"");
        }
        const std::string& qid = fields[0];
        const std::string& docid = fields[2];

        auto& ranking = run.rankings[qid];
        if (rank != static_cast<long long>(ranking.size()) + 1) {
            throw ParseError(name, i + 1,
                             "rank " + std::to_string(rank) + " breaks the sequence for query " +
                                 qid + " (expected " + std::to_string(ranking.size() + 1) + ")");
        }
        if (!ranking.empty() && score > ranking.back().score) {
            throw ParseError(name, i + 1, "scores out of non-increasing order for query " + qid);
        }
        if (!seen_docs[qid].insert(docid).second) {
            throw ParseError(name, i + 1, "duplicate document " + docid + " for query " + qid);
        }
        ranking.push_back({docid, score});
    }
    return run;
}

void write_run(const RankedRun& run, const std::filesystem::path& path,
               const std::string& tag) {
    std::string out;
    for (const auto& [qid, ranking] : run.rankings) {
        int rank = 1;
        for (const ScoredDoc& doc : ranking) {
            out += qid;
            out += " Q0 ";
            out += doc.doc_id;
            out += ' ';
            out += std::to_string(rank++);
            out += ' ';
            out += format_score(doc.score);
            out += ' ';
            out += tag;
            out += '\n';
        }
    }
    atomic_write(path, out);
}

}  // namespace cemb
