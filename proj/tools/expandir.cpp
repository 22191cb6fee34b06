// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0
//
// expandir — embedding-based query expansion experiments over a BM25 index.
// Subcommands: index, search, expand, evaluate, sweep, inspect-vectors.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "expandir/corpus.hpp"
#include "expandir/embeddings.hpp"
#include "expandir/errors.hpp"
#include "expandir/eval.hpp"
#include "expandir/expansion.hpp"
#include "expandir/index.hpp"
#include "expandir/log.hpp"
#include "expandir/parallel.hpp"
#include "expandir/sweep.hpp"

namespace fs = std::filesystem;
using namespace expandir;

namespace {

struct CommonOpts {
    std::string stopwords_path;
    std::string stem = "french";
    double k1 = 1.2, b = 0.75, k3 = 8.0;
};

PreprocessConfig make_config(const CommonOpts& opts, StemKind stem) {
    PreprocessConfig cfg;
    if (!opts.stopwords_path.empty()) cfg.stopwords = load_stopwords(opts.stopwords_path);
    cfg.stemmer = stem;
    cfg.lowercase = true;
    return cfg;
}

StemKind stem_from_string(const std::string& s) {
    if (s == "none") return StemKind::none;
    if (s == "french") return StemKind::french_snowball;
    throw std::invalid_argument("unknown stemmer '" + s + "' (expected none|french)");
}

DocFormat doc_format_from_string(const std::string& s) {
    if (s == "jsonl") return DocFormat::jsonl;
    if (s == "tsv") return DocFormat::tsv;
    throw std::invalid_argument("unknown document format '" + s + "'");
}

VectorFormat vec_format_from_string(const std::string& s) {
    if (s == "text") return VectorFormat::text;
    if (s == "binary") return VectorFormat::binary;
    throw std::invalid_argument("unknown vector format '" + s + "'");
}

std::string sanitize_filename(const std::string& name) {
    std::string out;
    for (const char c : name) {
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
            c == '-' || c == '_' || c == '.')
            out += c;
        else
            out += '_';
    }
    return out.empty() ? "_" : out;
}

EmbeddingSpace load_space(const std::string& path, const std::string& format,
                          bool preprocessed, const PreprocessConfig& index_config) {
    EmbeddingSpace space = EmbeddingSpace::load(path, vec_format_from_string(format));
    space.variant = {fs::path(path).stem().string(), preprocessed};
    space.lookup_config =
        preprocessed ? index_config : PreprocessConfig{{}, StemKind::none, true};
    return space;
}

// ---- index ----------------------------------------------------------------

int cmd_index(const std::string& docs_path, const std::string& docs_format,
              const CommonOpts& opts, const std::string& out_path) {
    const auto docs = load_documents(docs_path, doc_format_from_string(docs_format));
    BM25Params params;
    params.k1 = opts.k1;
    params.b = opts.b;
    params.k3 = opts.k3;
    const auto config = make_config(opts, stem_from_string(opts.stem));
    const auto index = InvertedIndex::build(docs, config, params);
    index.save(out_path);
    log::info("indexed " + std::to_string(index.doc_count()) + " documents, avgdl " +
              std::to_string(index.avg_doc_length()));
    return 0;
}

// ---- search ---------------------------------------------------------------

int cmd_search(const std::string& index_path, const std::string& topics_path,
               const std::string& queries_path, const std::string& vectors_path,
               const std::string& vectors_format, bool vectors_preprocessed,
               const std::string& mode, std::size_t k, double alpha,
               double min_similarity, bool include_festival, std::size_t depth,
               const std::string& run_tag, const std::string& out_path,
               std::size_t workers) {
    if (topics_path.empty() == queries_path.empty()) {
        std::cerr << "exactly one of --topics and --queries is required\n";
        return 1;
    }
    const auto index = InvertedIndex::load(index_path);

    // Queries are built unstemmed; stemming happens where each consumer needs
    // it (embedding lookups via the space's provenance, scoring via the index
    // config).
    PreprocessConfig query_config = index.config();
    query_config.stemmer = StemKind::none;

    std::vector<std::pair<std::string, WeightedQuery>> queries;
    std::optional<EmbeddingSpace> space;
    std::optional<ExpansionConfig> expansion;
    if (!queries_path.empty()) {
        // Replay pre-expanded queries verbatim; no further expansion.
        queries = load_queries_jsonl(queries_path);
    } else {
        for (const auto& topic : load_topics(topics_path))
            queries.emplace_back(topic.id,
                                 topic_to_query(topic, query_config, include_festival));
        if (!vectors_path.empty() && mode != "none") {
            space = load_space(vectors_path, vectors_format, vectors_preprocessed,
                               index.config());
            ExpansionConfig cfg;
            cfg.mode = expansion_mode_from_string(mode);
            cfg.k = k;
            cfg.alpha = alpha;
            cfg.min_similarity = min_similarity;
            expansion = cfg;
        }
    }

    std::vector<std::pair<std::string, std::vector<RunEntry>>> results(queries.size());
    parallel_for(queries.size(), workers, [&](std::size_t i) {
        WeightedQuery q = queries[i].second;
        if (space && expansion) q = expand_and_fuse(q, *space, *expansion);
        q = project_query(q, index.config());
        results[i] = {queries[i].first, index.search(q, depth)};
    });

    RankedRun run;
    for (auto& [qid, entries] : results) run.add(std::move(qid), std::move(entries));

    if (out_path.empty()) {
        write_run(std::cout, run, run_tag);
    } else {
        std::ofstream out(out_path);
        if (!out) throw ParseError(out_path, "cannot open run file for writing");
        write_run(out, run, run_tag);
    }
    return 0;
}

// ---- expand ---------------------------------------------------------------

int cmd_expand(const std::string& topics_path, const std::string& vectors_path,
               const std::string& vectors_format, bool vectors_preprocessed,
               const std::string& mode, std::size_t k, double alpha, double min_similarity,
               const CommonOpts& opts, bool include_festival) {
    const auto topics = load_topics(topics_path);

    PreprocessConfig index_config = make_config(opts, stem_from_string(opts.stem));
    PreprocessConfig query_config = index_config;
    query_config.stemmer = StemKind::none;

    const auto space =
        load_space(vectors_path, vectors_format, vectors_preprocessed, index_config);
    ExpansionConfig cfg;
    cfg.mode = expansion_mode_from_string(mode);
    cfg.k = k;
    cfg.alpha = alpha;
    cfg.min_similarity = min_similarity;

    for (const auto& topic : topics) {
        const auto q = topic_to_query(topic, query_config, include_festival);
        const auto fused = expand_and_fuse(q, space, cfg);
        std::cout << query_to_jsonl(topic.id, fused) << '\n';
    }
    return 0;
}

// ---- evaluate ---------------------------------------------------------- --

int cmd_evaluate(const std::string& run_path, const std::string& qrels_path,
                 const std::string& csv_path, bool per_query) {
    const auto run = read_run(run_path);
    const auto qrels = Qrels::load(qrels_path);
    const auto report = evaluate(run, qrels);
    write_report_table(std::cout, report, per_query);
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw ParseError(csv_path, "cannot open CSV file for writing");
        write_report_csv(out, report);
    }
    return 0;
}

// ---- sweep ------------------------------------------------------------- --

int cmd_sweep(const std::string& config_path, const std::string& index_path,
              const std::string& topics_path, const std::string& qrels_path,
              const std::string& out_dir, std::size_t workers,
              std::size_t max_resident_spaces) {
    const auto spec = SweepSpec::from_json_file(config_path);
    const auto index = InvertedIndex::load(index_path);
    const auto topics = load_topics(topics_path);
    const auto qrels = Qrels::load(qrels_path);

    PreprocessConfig query_config = index.config();
    query_config.stemmer = StemKind::none;

    const auto result =
        run_sweep(spec, index, topics, qrels, query_config, workers, max_resident_spaces);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    // One run file per cell.
    auto dump_run = [&](const SweepCell& cell) {
        const auto path = dir / (sanitize_filename(cell.key.label()) + ".run");
        std::ofstream out(path);
        if (!out) throw ParseError(path.string(), "cannot open run file for writing");
        write_run(out, cell.run, sanitize_filename(cell.key.label()));
    };
    if (result.baseline) {
        const auto path = dir / "baseline.run";
        std::ofstream out(path);
        if (!out) throw ParseError(path.string(), "cannot open run file for writing");
        write_run(out, result.baseline->run, "baseline");
    }
    for (const auto& cell : result.cells)
        if (cell.ok) dump_run(cell);

    // One CSV per metric, plus the significance table.
    for (const auto metric :
         {MetricId::map, MetricId::mrr, MetricId::p5, MetricId::p10, MetricId::p30}) {
        std::ofstream out(dir / ("metric_" + to_string(metric) + ".csv"));
        out << metric_csv(result, metric);
    }
    {
        std::ofstream out(dir / "significance.csv");
        out << significance_csv(result);
    }

    // Rendered tables: spaces x k per (mode, alpha); alphas x k per
    // (mode, space) when several alphas were swept.
    const fs::path tables = dir / "tables";
    fs::create_directories(tables);
    for (const auto mode : spec.modes) {
        for (const auto alpha : spec.alphas) {
            TableSlice slice{MetricId::p5, TableAxis::spaces_by_k, mode, alpha, ""};
            for (const auto metric :
                 {MetricId::map, MetricId::mrr, MetricId::p5, MetricId::p10, MetricId::p30}) {
                slice.metric = metric;
                const auto rendered = render_table(result, slice);
                char aname[32];
                std::snprintf(aname, sizeof(aname), "%g", alpha);
                const std::string base = to_string(metric) + "_" + to_string(mode) +
                                         "_alpha" + sanitize_filename(aname) + "_by_space";
                std::ofstream t(tables / (base + ".txt"));
                t << rendered.text;
                std::ofstream c(tables / (base + ".csv"));
                c << rendered.csv;
            }
        }
        if (spec.alphas.size() > 1) {
            for (const auto& sp : spec.spaces) {
                TableSlice slice{MetricId::p5, TableAxis::alphas_by_k, mode, 0.0, sp.name};
                const auto rendered = render_table(result, slice);
                const std::string base =
                    "p5_" + to_string(mode) + "_" + sanitize_filename(sp.name) + "_by_alpha";
                std::ofstream t(tables / (base + ".txt"));
                t << rendered.text;
                std::ofstream c(tables / (base + ".csv"));
                c << rendered.csv;
            }
        }
    }

    // Manifest: configuration hash plus input checksums, for reproducibility.
    nlohmann::json manifest;
    manifest["config"] = nlohmann::json::parse(spec.to_canonical_json());
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(spec.to_canonical_json())));
    manifest["config_fnv1a64"] = hash;
    nlohmann::json inputs;
    auto checksum = [&](const std::string& label, const std::string& path) {
        char h[32];
        std::snprintf(h, sizeof(h), "%016llx",
                      static_cast<unsigned long long>(fnv1a64_file(path)));
        inputs[label] = nlohmann::json{{"path", path}, {"fnv1a64", h}};
    };
    checksum("index", index_path);
    checksum("topics", topics_path);
    checksum("qrels", qrels_path);
    for (const auto& sp : spec.spaces) {
        try {
            checksum("space:" + sp.name, sp.path);
        } catch (const ParseError&) {
            inputs["space:" + sp.name] = nlohmann::json{{"path", sp.path}, {"error", "unreadable"}};
        }
    }
    manifest["inputs"] = std::move(inputs);
    {
        std::ofstream out(dir / "manifest.json");
        out << manifest.dump(2) << '\n';
    }

    std::size_t failed = 0;
    for (const auto& cell : result.cells)
        if (!cell.ok) ++failed;
    std::cout << "cells: " << result.cells.size() << " (" << failed << " failed), results in "
              << out_dir << '\n';
    return 0;
}

// ---- inspect-vectors ----------------------------------------------------

int cmd_inspect_vectors(const std::string& vectors_path, const std::string& vectors_format,
                        const std::string& term, std::size_t k) {
    const auto space = EmbeddingSpace::load(vectors_path, vec_format_from_string(vectors_format));
    std::cout << "vocab " << space.size() << ", dim " << space.dim() << '\n';
    if (!term.empty()) {
        if (!space.contains(term)) {
            std::cerr << "term '" << term << "' not in vocabulary\n";
            return 2;
        }
        for (const auto& nb : space.knn(space.vector_of(term), k, {term})) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6f", nb.similarity);
            std::cout << nb.term << ' ' << buf << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"embedding-based query expansion experiments over BM25 retrieval"};
    app.require_subcommand(1);

    CommonOpts common;

    // index
    auto* s_index = app.add_subcommand("index", "build an inverted index from documents");
    std::string docs_path, docs_format = "jsonl", index_out = "index.expidx";
    s_index->add_option("--docs", docs_path, "document file")->required();
    s_index->add_option("--docs-format", docs_format, "jsonl|tsv")
        ->check(CLI::IsMember({"jsonl", "tsv"}));
    s_index->add_option("--stopwords", common.stopwords_path, "stopword file, one term per line");
    s_index->add_option("--stem", common.stem, "none|french")
        ->check(CLI::IsMember({"none", "french"}));
    s_index->add_option("--k1", common.k1, "BM25 k1");
    s_index->add_option("--b", common.b, "BM25 b");
    s_index->add_option("--k3", common.k3, "BM25 k3");
    s_index->add_option("--out", index_out, "output index path");

    // search
    auto* s_search = app.add_subcommand("search", "run (optionally expanded) topic queries");
    std::string index_path, topics_path, queries_path, vectors_path, vectors_format = "text";
    std::string mode = "local", run_tag = "expandir", out_path;
    bool vectors_preprocessed = false, include_festival = false;
    std::size_t k = 5, depth = 1000, workers = 1;
    double alpha = 0.3, min_similarity = 0.0;
    s_search->add_option("--index", index_path, "index file from `expandir index`")->required();
    s_search->add_option("--topics", topics_path, "topic file");
    s_search->add_option("--queries", queries_path,
                         "replay pre-expanded queries (JSONL from `expandir expand`)");
    s_search->add_option("--vectors", vectors_path, "word vector file (omit for baseline)");
    s_search->add_option("--vectors-format", vectors_format, "text|binary")
        ->check(CLI::IsMember({"text", "binary"}));
    s_search->add_flag("--vectors-preprocessed", vectors_preprocessed,
                       "vectors were trained on preprocessed text");
    s_search->add_option("--mode", mode, "local|global|none")
        ->check(CLI::IsMember({"local", "global", "none"}));
    s_search->add_option("--k", k, "expansion terms per anchor");
    s_search->add_option("--alpha", alpha, "expansion weight multiplier");
    s_search->add_option("--min-similarity", min_similarity, "drop neighbors below this");
    s_search->add_flag("--include-festival", include_festival,
                       "append festival name tokens to the query");
    s_search->add_option("--depth", depth, "retrieval depth");
    s_search->add_option("--run-tag", run_tag, "tag column for the run file");
    s_search->add_option("--out", out_path, "run file (default stdout)");
    s_search->add_option("--workers", workers, "parallel query workers");

    // expand
    auto* s_expand = app.add_subcommand("expand", "emit expanded queries as JSON lines");
    s_expand->add_option("--topics", topics_path, "topic file")->required();
    s_expand->add_option("--vectors", vectors_path, "word vector file")->required();
    s_expand->add_option("--vectors-format", vectors_format, "text|binary")
        ->check(CLI::IsMember({"text", "binary"}));
    s_expand->add_flag("--vectors-preprocessed", vectors_preprocessed,
                       "vectors were trained on preprocessed text");
    s_expand->add_option("--mode", mode, "local|global")
        ->check(CLI::IsMember({"local", "global"}));
    s_expand->add_option("--k", k, "expansion terms per anchor");
    s_expand->add_option("--alpha", alpha, "expansion weight multiplier");
    s_expand->add_option("--min-similarity", min_similarity, "drop neighbors below this");
    s_expand->add_option("--stopwords", common.stopwords_path, "stopword file");
    s_expand->add_option("--stem", common.stem, "none|french (index-side stemming)")
        ->check(CLI::IsMember({"none", "french"}));
    s_expand->add_flag("--include-festival", include_festival,
                       "append festival name tokens to the query");

    // evaluate
    auto* s_eval = app.add_subcommand("evaluate", "score a run file against qrels");
    std::string run_path, qrels_path, csv_path;
    bool per_query = false;
    s_eval->add_option("--run", run_path, "TREC run file")->required();
    s_eval->add_option("--qrels", qrels_path, "TREC qrels file")->required();
    s_eval->add_option("--csv", csv_path, "also write query_id,metric,value CSV here");
    s_eval->add_flag("--per-query", per_query, "print per-query rows");

    // sweep
    auto* s_sweep = app.add_subcommand("sweep", "run the full experimental grid");
    std::string sweep_config, sweep_out = "sweep-results";
    std::size_t max_resident = 2;
    s_sweep->add_option("--config", sweep_config, "sweep spec (JSON)")->required();
    s_sweep->add_option("--index", index_path, "index file")->required();
    s_sweep->add_option("--topics", topics_path, "topic file")->required();
    s_sweep->add_option("--qrels", qrels_path, "qrels file")->required();
    s_sweep->add_option("--out-dir", sweep_out, "results directory");
    s_sweep->add_option("--workers", workers, "parallel cell workers");
    s_sweep->add_option("--max-resident-spaces", max_resident,
                        "embedding spaces kept in memory at once");

    // inspect-vectors
    auto* s_inspect = app.add_subcommand("inspect-vectors", "show vector file stats/neighbors");
    std::string inspect_term;
    s_inspect->add_option("--vectors", vectors_path, "word vector file")->required();
    s_inspect->add_option("--vectors-format", vectors_format, "text|binary")
        ->check(CLI::IsMember({"text", "binary"}));
    s_inspect->add_option("--term", inspect_term, "print nearest neighbors of this term");
    s_inspect->add_option("--k", k, "neighbor count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // help goes to stdout, exit 0
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }

    try {
        if (s_index->parsed())
            return cmd_index(docs_path, docs_format, common, index_out);
        if (s_search->parsed())
            return cmd_search(index_path, topics_path, queries_path, vectors_path,
                              vectors_format, vectors_preprocessed, mode, k, alpha,
                              min_similarity, include_festival, depth, run_tag, out_path,
                              workers);
        if (s_expand->parsed())
            return cmd_expand(topics_path, vectors_path, vectors_format, vectors_preprocessed,
                              mode, k, alpha, min_similarity, common, include_festival);
        if (s_eval->parsed()) return cmd_evaluate(run_path, qrels_path, csv_path, per_query);
        if (s_sweep->parsed())
            return cmd_sweep(sweep_config, index_path, topics_path, qrels_path, sweep_out,
                             workers, max_resident);
        if (s_inspect->parsed())
            return cmd_inspect_vectors(vectors_path, vectors_format, inspect_term, k);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
