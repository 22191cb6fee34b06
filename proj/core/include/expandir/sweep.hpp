// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "expandir/eval.hpp"
#include "expandir/expansion.hpp"
#include "expandir/index.hpp"

namespace expandir {

struct SpaceSpec {
    std::string name;
    std::string path;
    VectorFormat format = VectorFormat::text;
    // Whether the training corpus was preprocessed (stopwords + stemming);
    // preprocessed spaces receive index-style lookups, raw ones lowercase
    // lookups.
    bool preprocessed = false;
};

// The experimental grid: spaces x modes x k x alpha, plus one baseline.
struct SweepSpec {
    std::vector<SpaceSpec> spaces;
    std::vector<ExpansionMode> modes = {ExpansionMode::local, ExpansionMode::global};
    std::vector<std::size_t> k_values = {1, 2, 3, 4, 5};
    std::vector<double> alphas = {0.3};
    bool include_baseline = true;
    std::size_t depth = 1000;
    double min_similarity = 0.0;
    bool exclude_query_terms_global = true;
    bool include_festival = false;

    // JSON object with the fields above; spaces entries carry
    // {name, path, format, preprocessed}.
    static SweepSpec from_json_file(const std::string& path);
    std::string to_canonical_json() const;
};

struct CellKey {
    std::string space;
    ExpansionMode mode = ExpansionMode::local;
    std::size_t k = 0;
    double alpha = 0.0;
    std::string label() const;  // e.g. "TMF_raw_local_k5_a0.3"
};

struct Significance {
    double t = 0.0;
    double p = 1.0;
    bool significant = false;  // p < 0.05, two-sided
};

struct SweepCell {
    CellKey key;
    bool ok = false;
    std::string error;  // set when the cell failed (e.g. space load failure)
    MetricsReport metrics;
    std::optional<Significance> vs_baseline;  // paired t-test on per-query p@5
    RankedRun run;
};

struct SweepResult {
    std::optional<SweepCell> baseline;
    std::vector<SweepCell> cells;  // deterministic (space, mode, k, alpha) order
};

// Evaluates every grid cell: expand each topic query, project it through the
// index preprocessing, search at `depth`, score against the qrels, and test
// per-query p@5 against the baseline. A space that fails to load marks only
// its own cells as errors. Spaces are loaded lazily, at most once, and at
// most max_resident_spaces stay in memory.
SweepResult run_sweep(const SweepSpec& spec, const InvertedIndex& index,
                      const std::vector<Topic>& topics, const Qrels& qrels,
                      const PreprocessConfig& query_config, std::size_t workers = 1,
                      std::size_t max_resident_spaces = 2);

enum class MetricId { map, mrr, p5, p10, p30 };
std::string to_string(MetricId metric);
MetricId metric_from_string(const std::string& s);
double metric_value(const QueryMetrics& m, MetricId metric);

enum class TableAxis { spaces_by_k, alphas_by_k };

// One rendered table slice: rows are spaces (at a fixed alpha) or alphas
// (for a fixed space), columns are k values, one mode per table.
struct TableSlice {
    MetricId metric = MetricId::p5;
    TableAxis axis = TableAxis::spaces_by_k;
    ExpansionMode mode = ExpansionMode::local;
    double alpha = 0.3;  // used by spaces_by_k
    std::string space;   // used by alphas_by_k
};

struct RenderedTable {
    std::string text;  // best per column marked *bold*, best per row _underlined_
    std::string csv;   // row,col,value,best_in_row,best_in_col
};

RenderedTable render_table(const SweepResult& result, const TableSlice& slice);

// Flat per-metric CSV over all cells (baseline first when present):
// space,mode,k,alpha,value. Errored cells render NA.
std::string metric_csv(const SweepResult& result, MetricId metric);

// space,mode,k,alpha,t,p,significant rows for every cell with a t-test.
std::string significance_csv(const SweepResult& result);

// FNV-1a 64-bit, used for config hashes and input checksums in manifests.
std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64_file(const std::string& path);

}  // namespace expandir
