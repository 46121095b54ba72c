// Command-line front end: build concept vectors from word vectors, index
// concept-annotated documents, rank with a similarity-aware retrieval model,
// evaluate runs and compare them with a randomization test.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cemb/embedder.hpp"
#include "cemb/embedding_store.hpp"
#include "cemb/error.hpp"
#include "cemb/eval.hpp"
#include "cemb/lexicon.hpp"
#include "cemb/retrieval.hpp"
#include "cemb/run.hpp"
#include "cemb/similarity.hpp"

namespace {

using namespace cemb;

constexpr double kAlpha = 0.05;

struct BuildVectorsOpts {
    std::string method;
    std::string word_vectors;
    std::string lexicon;
    std::string df;
    std::string out;
    std::uint64_t seed = 0;
};

struct IndexOpts {
    std::string docs;
    std::string out;
};

struct SearchOpts {
    std::string index;
    std::string queries;
    std::string sim;
    std::string weighting;
    std::string concept_vectors;
    std::string taxonomy;
    std::string out;
    std::string tag = "cemb";
    double beta = 0.5;
    double s = 0.2;
    double k1 = 1.2;
    double b = 0.75;
    double k3 = 1000.0;
    double min_sim = 0.0;
    int k = 1000;
    bool leacock_raw = false;
};

struct EvaluateOpts {
    std::string run;
    std::string qrels;
};

struct CompareOpts {
    std::string run_a;
    std::string run_b;
    std::string qrels;
    std::string metric = "map";
    int max_exact = 20;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
};

ConceptVectorSet load_concept_vector_set(const std::string& path) {
    EmbeddingTable table = load_word_vectors(path);
    ConceptVectorSet set;
    set.dim = table.dim;
    for (auto& [id, vec] : table.entries) set.vectors.emplace(id, std::move(vec));
    return set;
}

void run_build_vectors(const BuildVectorsOpts& opt) {
    const EmbedMethod method = parse_embed_method(opt.method);
    if (method == EmbedMethod::WEmb && opt.df.empty()) {
        throw ValidationError("--method wemb requires --df");
    }
    if (method != EmbedMethod::WEmb && !opt.df.empty()) {
        throw ValidationError("--df is only used with --method wemb");
    }

    const EmbeddingTable table = load_word_vectors(opt.word_vectors, opt.seed);
    const std::vector<ConceptRecord> lexicon = load_lexicon(opt.lexicon);
    DfTable dfs;
    const DfTable* dfs_ptr = nullptr;
    if (!opt.df.empty()) {
        dfs = load_df_table(opt.df);
        dfs_ptr = &dfs;
    }

    const ConceptVectorSet set = build_concept_vectors(lexicon, method, table, dfs_ptr);
    save_concept_vectors(set, opt.out);
    std::cout << "concepts: " << set.vectors.size() << "\n"
              << "dim: " << set.dim << "\n"
              << "missing words: " << count_missing_words(lexicon, table) << "\n"
              << "wrote " << opt.out << "\n";
}

void run_index(const IndexOpts& opt) {
    const ConceptIndex idx = build_index(load_concept_docs(opt.docs));
    save_concept_docs(idx.docs, opt.out);
    std::cout << "documents: " << idx.doc_count() << "\n"
              << "distinct concepts: " << idx.df.size() << "\n"
              << "avdl: " << idx.avdl << "\n"
              << "wrote " << opt.out << "\n";
}

void run_search(const SearchOpts& opt) {
    SimilarityConfig scfg;
    scfg.beta = opt.beta;
    scfg.leacock_raw = opt.leacock_raw;
    if (opt.sim == "eq2") {
        scfg.kind = SimilarityConfig::Kind::Eq2;
        if (opt.concept_vectors.empty()) {
            throw ValidationError("--sim eq2 requires --concept-vectors");
        }
    } else if (opt.sim == "leacock") {
        scfg.kind = SimilarityConfig::Kind::Leacock;
        if (opt.taxonomy.empty()) {
            throw ValidationError("--sim leacock requires --taxonomy");
        }
    } else {
        scfg.kind = SimilarityConfig::Kind::NoSim;
    }

    WeightingConfig wcfg;
    wcfg.kind = parse_weighting(opt.weighting);
    wcfg.s = opt.s;
    wcfg.k1 = opt.k1;
    wcfg.b = opt.b;
    wcfg.k3 = opt.k3;

    const ConceptIndex idx = build_index(load_concept_docs(opt.index));
    const std::vector<ConceptDoc> queries = load_concept_docs(opt.queries);

    ConceptVectorSet vectors;
    const ConceptVectorSet* vectors_ptr = nullptr;
    if (!opt.concept_vectors.empty()) {
        vectors = load_concept_vector_set(opt.concept_vectors);
        vectors_ptr = &vectors;
    }
    Taxonomy tax;
    const Taxonomy* tax_ptr = nullptr;
    if (!opt.taxonomy.empty()) {
        tax = load_taxonomy(opt.taxonomy);
        tax_ptr = &tax;
    }

    const RankedRun run =
        run_queries(queries, idx, wcfg, scfg, vectors_ptr, tax_ptr, opt.k, opt.min_sim);
    write_run(run, opt.out, opt.tag);
    std::cout << "queries: " << run.rankings.size() << "\n"
              << "wrote " << opt.out << "\n";
}

void print_report(const EvalReport& report) {
    std::printf("%-12s %8s %8s\n", "query", "AP", "P@10");
    for (const auto& [qid, scores] : report.per_query) {
        std::printf("%-12s %8.4f %8.4f\n", qid.c_str(), scores.ap, scores.p10);
    }
    std::printf("%-12s %8.4f %8.4f   (%d queries)\n", "all", report.map, report.mean_p10,
                report.evaluated);
    std::printf("\n");
    for (const auto& [qid, scores] : report.per_query) {
        std::printf("ap\t%s\t%.6f\n", qid.c_str(), scores.ap);
        std::printf("p10\t%s\t%.6f\n", qid.c_str(), scores.p10);
    }
    std::printf("map\tall\t%.6f\n", report.map);
    std::printf("p10\tall\t%.6f\n", report.mean_p10);
}

void run_evaluate(const EvaluateOpts& opt) {
    const RankedRun run = read_run(opt.run);
    const QrelSet qrels = load_qrels(opt.qrels);
    print_report(evaluate_run(run, qrels));
}

void run_compare(const CompareOpts& opt) {
    const QrelSet qrels = load_qrels(opt.qrels);
    const EvalReport report_a = evaluate_run(read_run(opt.run_a), qrels);
    const EvalReport report_b = evaluate_run(read_run(opt.run_b), qrels);

    // Both reports cover the same qrels-driven query set, so the pairing
    // lines up by construction.
    std::vector<double> a;
    std::vector<double> b;
    const bool use_map = opt.metric == "map";
    for (const auto& [qid, scores] : report_a.per_query) {
        a.push_back(use_map ? scores.ap : scores.p10);
        const QueryScores& other = report_b.per_query.at(qid);
        b.push_back(use_map ? other.ap : other.p10);
    }

    const SignificanceResult sig =
        fisher_randomization(a, b, opt.max_exact, opt.samples, opt.seed);

    const double agg_a = use_map ? report_a.map : report_a.mean_p10;
    const double agg_b = use_map ? report_b.map : report_b.mean_p10;
    std::printf("metric: %s (%d queries)\n", opt.metric.c_str(), report_a.evaluated);
    std::printf("run A %s: %.4f\n", opt.run_a.c_str(), agg_a);
    std::printf("run B %s: %.4f\n", opt.run_b.c_str(), agg_b);
    std::printf("mean difference (A - B): %+.6f\n", sig.observed);
    if (sig.exact) {
        std::printf("fisher randomization: exact, %llu assignments, p = %.6f\n",
                    static_cast<unsigned long long>(sig.permutations), sig.p_value);
    } else {
        std::printf("fisher randomization: sampled, %llu assignments, seed %llu, p = %.6f\n",
                    static_cast<unsigned long long>(sig.permutations),
                    static_cast<unsigned long long>(sig.seed), sig.p_value);
    }
    std::printf("verdict at alpha = %.2f: %s\n", kAlpha,
                sig.p_value < kAlpha ? "significant" : "not significant");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"concept embedding and conceptual retrieval toolkit"};
    app.require_subcommand(1);
    const std::string formats =
        "File formats:\n"
        "  word/concept vectors  header \"<count> <dim>\", lines \"<token> <v1> ... <vdim>\"\n"
        "  df table              first line \"<N>\", lines \"<token>\\t<df>\"\n"
        "  lexicon               TSV \"<concept_id>\\t<term_id>\\t<string_id>\\t<text>\", # comments\n"
        "  taxonomy              TSV \"<child_id>\\t<parent_id>\", # comments\n"
        "  documents/queries     \"<id>\\t<concept> <concept> ...\" (repetition = tf)\n"
        "  run                   TREC \"<qid> Q0 <docid> <rank> <score> <tag>\"\n"
        "  qrels                 TREC \"<qid> 0 <docid> <grade>\"";
    app.footer(formats);

    BuildVectorsOpts bv;
    auto* build = app.add_subcommand("build-vectors",
                                     "build concept vectors from word vectors and a lexicon");
    build->add_option("--method", bv.method, "embedding method")
        ->required()
        ->check(CLI::IsMember({"femb", "hemb", "wemb"}));
    build->add_option("--word-vectors", bv.word_vectors, "word vector file")
        ->required()
        ->check(CLI::ExistingFile);
    build->add_option("--lexicon", bv.lexicon, "concept lexicon file")
        ->required()
        ->check(CLI::ExistingFile);
    build->add_option("--df", bv.df, "document-frequency file (wemb only)")
        ->check(CLI::ExistingFile);
    build->add_option("--out", bv.out, "output concept vector file")->required();
    build->add_option("--seed", bv.seed, "seed for missing-word fallback vectors")
        ->capture_default_str();
    build->callback([&bv] { run_build_vectors(bv); });

    IndexOpts ix;
    auto* index = app.add_subcommand("index", "validate and canonicalize a document collection");
    index->add_option("--docs", ix.docs, "concept-annotated documents")
        ->required()
        ->check(CLI::ExistingFile);
    index->add_option("--out", ix.out, "output index file")->required();
    index->callback([&ix] { run_index(ix); });

    SearchOpts se;
    auto* search = app.add_subcommand("search", "rank documents for each query");
    search->add_option("--index", se.index, "index file (from the index subcommand)")
        ->required()
        ->check(CLI::ExistingFile);
    search->add_option("--queries", se.queries, "concept-annotated queries")
        ->required()
        ->check(CLI::ExistingFile);
    search->add_option("--sim", se.sim, "inter-concept similarity back-end")
        ->required()
        ->check(CLI::IsMember({"eq2", "leacock", "nosim"}));
    search->add_option("--weighting", se.weighting, "concept weighting scheme")
        ->required()
        ->check(CLI::IsMember({"piv", "bm25"}));
    search->add_option("--concept-vectors", se.concept_vectors,
                       "concept vector file (required for --sim eq2)")
        ->check(CLI::ExistingFile);
    search->add_option("--taxonomy", se.taxonomy, "is-a taxonomy file (required for --sim leacock)")
        ->check(CLI::ExistingFile);
    search->add_option("--beta", se.beta, "similarity scale for eq2")->capture_default_str();
    search->add_option("--k", se.k, "ranked documents kept per query")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    search->add_option("--s", se.s, "pivoted normalization slope")->capture_default_str();
    search->add_option("--k1", se.k1, "bm25 k1")->capture_default_str();
    search->add_option("--b", se.b, "bm25 b")->capture_default_str();
    search->add_option("--k3", se.k3, "bm25 k3 (query saturation)")->capture_default_str();
    search->add_option("--min-sim", se.min_sim,
                       "ignore candidate similarities below this threshold")
        ->capture_default_str();
    search->add_flag("--leacock-raw", se.leacock_raw,
                     "use the unnormalized leacock score (may exceed 1)");
    search->add_option("--tag", se.tag, "run tag written to the TREC output")
        ->capture_default_str();
    search->add_option("--out", se.out, "output run file")->required();
    search->callback([&se] { run_search(se); });

    EvaluateOpts ev;
    auto* evaluate = app.add_subcommand("evaluate", "score a run against relevance judgments");
    evaluate->add_option("--run", ev.run, "TREC run file")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--qrels", ev.qrels, "relevance judgments")
        ->required()
        ->check(CLI::ExistingFile);
    evaluate->callback([&ev] { run_evaluate(ev); });

    CompareOpts cp;
    auto* compare = app.add_subcommand("compare", "significance test between two runs");
    compare->add_option("--run-a", cp.run_a, "first run")->required()->check(CLI::ExistingFile);
    compare->add_option("--run-b", cp.run_b, "second run")->required()->check(CLI::ExistingFile);
    compare->add_option("--qrels", cp.qrels, "relevance judgments")
        ->required()
        ->check(CLI::ExistingFile);
    compare->add_option("--metric", cp.metric, "per-query metric fed to the test")
        ->check(CLI::IsMember({"map", "p10"}))
        ->capture_default_str();
    compare->add_option("--max-exact", cp.max_exact,
                        "enumerate all sign flips up to this many queries")
        ->capture_default_str();
    compare->add_option("--samples", cp.samples, "monte carlo samples beyond --max-exact")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    compare->add_option("--seed", cp.seed, "monte carlo seed")->capture_default_str();
    compare->callback([&cp] { run_compare(cp); });

    for (CLI::App* sub : {build, index, search, evaluate, compare}) sub->footer(formats);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
