// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#include "expandir/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <list>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "expandir/errors.hpp"
#include "expandir/log.hpp"
#include "expandir/parallel.hpp"
#include "expandir/stats.hpp"

namespace expandir {

namespace {

std::string format_alpha(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", alpha);
    return buf;
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

VectorFormat vector_format_from_string(const std::string& s) {
    if (s == "text") return VectorFormat::text;
    if (s == "binary") return VectorFormat::binary;
    throw std::invalid_argument("unknown vector format '" + s + "'");
}

}  // namespace

std::string CellKey::label() const {
    return space + "_" + expandir::to_string(mode) + "_k" + std::to_string(k) + "_a" +
           format_alpha(alpha);
}

SweepSpec SweepSpec::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open sweep config");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path, std::string("malformed JSON: ") + e.what());
    }

    static const std::set<std::string> known = {
        "spaces",        "modes",          "k_values",
        "alphas",        "include_baseline", "depth",
        "min_similarity", "exclude_query_terms_global", "include_festival"};
    for (const auto& [key, value] : j.items()) {
        if (known.count(key) == 0)
            log::warn(path + ": unknown config key '" + key + "' ignored");
    }

    SweepSpec spec;
    if (!j.contains("spaces") || !j["spaces"].is_array() || j["spaces"].empty())
        throw ParseError(path, "config needs a non-empty \"spaces\" array");
    for (const auto& s : j["spaces"]) {
        SpaceSpec sp;
        if (!s.contains("name") || !s.contains("path"))
            throw ParseError(path, "each space needs \"name\" and \"path\"");
        sp.name = s["name"].get<std::string>();
        sp.path = s["path"].get<std::string>();
        sp.format = vector_format_from_string(s.value("format", std::string("text")));
        sp.preprocessed = s.value("preprocessed", false);
        spec.spaces.push_back(std::move(sp));
    }
    if (j.contains("modes")) {
        spec.modes.clear();
        for (const auto& m : j["modes"])
            spec.modes.push_back(expansion_mode_from_string(m.get<std::string>()));
        if (spec.modes.empty()) throw ParseError(path, "\"modes\" must not be empty");
    }
    if (j.contains("k_values")) {
        spec.k_values = j["k_values"].get<std::vector<std::size_t>>();
        if (spec.k_values.empty()) throw ParseError(path, "\"k_values\" must not be empty");
        for (auto k : spec.k_values)
            if (k < 1) throw ParseError(path, "k values must be >= 1");
    }
    if (j.contains("alphas")) {
        spec.alphas = j["alphas"].get<std::vector<double>>();
        if (spec.alphas.empty()) throw ParseError(path, "\"alphas\" must not be empty");
        for (auto a : spec.alphas)
            if (a <= 0.0) throw ParseError(path, "alpha values must be > 0");
    }
    spec.include_baseline = j.value("include_baseline", true);
    spec.depth = j.value("depth", std::size_t{1000});
    spec.min_similarity = j.value("min_similarity", 0.0);
    spec.exclude_query_terms_global = j.value("exclude_query_terms_global", true);
    spec.include_festival = j.value("include_festival", false);
    return spec;
}

std::string SweepSpec::to_canonical_json() const {
    nlohmann::json j;  // object keys serialize in sorted order
    nlohmann::json jspaces = nlohmann::json::array();
    for (const auto& s : spaces) {
        nlohmann::json e;
        e["name"] = s.name;
        e["path"] = s.path;
        e["format"] = s.format == VectorFormat::text ? "text" : "binary";
        e["preprocessed"] = s.preprocessed;
        jspaces.push_back(std::move(e));
    }
    j["spaces"] = std::move(jspaces);
    nlohmann::json jmodes = nlohmann::json::array();
    for (const auto m : modes) jmodes.push_back(to_string(m));
    j["modes"] = std::move(jmodes);
    j["k_values"] = k_values;
    j["alphas"] = alphas;
    j["include_baseline"] = include_baseline;
    j["depth"] = depth;
    j["min_similarity"] = min_similarity;
    j["exclude_query_terms_global"] = exclude_query_terms_global;
    j["include_festival"] = include_festival;
    return j.dump();
}

SweepResult run_sweep(const SweepSpec& spec, const InvertedIndex& index,
                      const std::vector<Topic>& topics, const Qrels& qrels,
                      const PreprocessConfig& query_config, std::size_t workers,
                      std::size_t max_resident_spaces) {
    if (spec.spaces.empty()) throw std::invalid_argument("sweep: no spaces configured");
    if (topics.empty()) throw std::invalid_argument("sweep: no topics");

    // Unexpanded queries, built once.
    std::vector<std::pair<std::string, WeightedQuery>> base_queries;
    base_queries.reserve(topics.size());
    for (const auto& t : topics)
        base_queries.emplace_back(t.id, topic_to_query(t, query_config, spec.include_festival));

    auto run_queries = [&](const EmbeddingSpace* space,
                           const ExpansionConfig* cfg) -> RankedRun {
        RankedRun run;
        for (const auto& [qid, q] : base_queries) {
            WeightedQuery effective = (space != nullptr && cfg != nullptr)
                                          ? expand_and_fuse(q, *space, *cfg)
                                          : q;
            WeightedQuery projected = project_query(effective, index.config());
            run.add(qid, index.search(projected, spec.depth));
        }
        return run;
    };

    SweepResult result;

    std::vector<double> baseline_p5;
    std::vector<std::string> baseline_qids;
    {
        SweepCell base;
        base.key = {"(baseline)", ExpansionMode::local, 0, 0.0};
        base.run = run_queries(nullptr, nullptr);
        base.metrics = evaluate(base.run, qrels);
        base.ok = true;
        for (const auto& [qid, m] : base.metrics.per_query) {
            baseline_qids.push_back(qid);
            baseline_p5.push_back(m.p5);
        }
        if (spec.include_baseline) result.baseline = std::move(base);
    }

    // Deterministic cell order: space (spec order), mode, k, alpha.
    struct PendingCell {
        std::size_t space_idx;
        CellKey key;
    };
    std::vector<PendingCell> pending;
    for (std::size_t s = 0; s < spec.spaces.size(); ++s)
        for (const auto mode : spec.modes)
            for (const auto k : spec.k_values)
                for (const auto alpha : spec.alphas)
                    pending.push_back({s, {spec.spaces[s].name, mode, k, alpha}});

    result.cells.resize(pending.size());

    // Spaces load lazily, at most once, and an LRU cap bounds residency.
    std::mutex cache_mutex;
    std::list<std::pair<std::size_t, std::shared_ptr<const EmbeddingSpace>>> cache;
    auto get_space = [&](std::size_t idx) -> std::shared_ptr<const EmbeddingSpace> {
        std::lock_guard<std::mutex> lock(cache_mutex);
        for (auto it = cache.begin(); it != cache.end(); ++it) {
            if (it->first == idx) {
                cache.splice(cache.begin(), cache, it);
                return cache.front().second;
            }
        }
        const auto& sp = spec.spaces[idx];
        auto space = std::make_shared<EmbeddingSpace>(
            EmbeddingSpace::load(sp.path, sp.format));
        space->variant = {sp.name, sp.preprocessed};
        space->lookup_config = sp.preprocessed
                                   ? index.config()
                                   : PreprocessConfig{{}, StemKind::none, true};
        cache.emplace_front(idx, space);
        while (cache.size() > std::max<std::size_t>(1, max_resident_spaces))
            cache.pop_back();
        return space;
    };

    // Group cells by space so a bounded cache is not thrashed by concurrent
    // cells of different spaces; cells within a group run in parallel.
    std::size_t lo = 0;
    while (lo < pending.size()) {
        std::size_t hi = lo;
        const std::size_t sidx = pending[lo].space_idx;
        while (hi < pending.size() && pending[hi].space_idx == sidx) ++hi;

        std::shared_ptr<const EmbeddingSpace> space;
        std::string load_error;
        try {
            space = get_space(sidx);
        } catch (const std::exception& e) {
            load_error = e.what();
            log::error("space '" + spec.spaces[sidx].name + "' failed to load: " + load_error);
        }

        parallel_for(hi - lo, workers, [&](std::size_t off) {
            const std::size_t i = lo + off;
            SweepCell& cell = result.cells[i];
            cell.key = pending[i].key;
            if (!load_error.empty()) {
                cell.ok = false;
                cell.error = load_error;
                return;
            }
            ExpansionConfig cfg;
            cfg.mode = cell.key.mode;
            cfg.k = cell.key.k;
            cfg.alpha = cell.key.alpha;
            cfg.min_similarity = spec.min_similarity;
            cfg.exclude_query_terms = spec.exclude_query_terms_global;
            cell.run = run_queries(space.get(), &cfg);
            cell.metrics = evaluate(cell.run, qrels);
            cell.ok = true;

            if (baseline_p5.size() >= 2) {
                std::vector<double> cell_p5;
                cell_p5.reserve(baseline_p5.size());
                std::size_t j = 0;
                bool aligned = cell.metrics.per_query.size() == baseline_qids.size();
                for (const auto& [qid, m] : cell.metrics.per_query) {
                    aligned = aligned && j < baseline_qids.size() && baseline_qids[j] == qid;
                    if (!aligned) break;
                    cell_p5.push_back(m.p5);
                    ++j;
                }
                if (aligned) {
                    const auto tt = paired_ttest(cell_p5, baseline_p5);
                    cell.vs_baseline = Significance{tt.t, tt.p, tt.p < 0.05};
                }
            }
        });
        lo = hi;
    }
    return result;
}

std::string to_string(MetricId metric) {
    switch (metric) {
        case MetricId::map: return "map";
        case MetricId::mrr: return "mrr";
        case MetricId::p5: return "p5";
        case MetricId::p10: return "p10";
        case MetricId::p30: return "p30";
    }
    return "?";
}

MetricId metric_from_string(const std::string& s) {
    if (s == "map") return MetricId::map;
    if (s == "mrr") return MetricId::mrr;
    if (s == "p5") return MetricId::p5;
    if (s == "p10") return MetricId::p10;
    if (s == "p30") return MetricId::p30;
    throw std::invalid_argument("unknown metric '" + s + "'");
}

double metric_value(const QueryMetrics& m, MetricId metric) {
    switch (metric) {
        case MetricId::map: return m.ap;
        case MetricId::mrr: return m.rr;
        case MetricId::p5: return m.p5;
        case MetricId::p10: return m.p10;
        case MetricId::p30: return m.p30;
    }
    return 0.0;
}

RenderedTable render_table(const SweepResult& result, const TableSlice& slice) {
    // Row labels in first-appearance order (spaces) or ascending (alphas).
    std::vector<std::string> rows;
    std::vector<double> row_alphas;
    std::vector<std::size_t> cols;
    for (const auto& cell : result.cells) {
        if (cell.key.mode != slice.mode) continue;
        if (slice.axis == TableAxis::spaces_by_k) {
            if (cell.key.alpha != slice.alpha) continue;
            if (std::find(rows.begin(), rows.end(), cell.key.space) == rows.end())
                rows.push_back(cell.key.space);
        } else {
            if (cell.key.space != slice.space) continue;
            if (std::find(row_alphas.begin(), row_alphas.end(), cell.key.alpha) ==
                row_alphas.end())
                row_alphas.push_back(cell.key.alpha);
        }
        if (std::find(cols.begin(), cols.end(), cell.key.k) == cols.end())
            cols.push_back(cell.key.k);
    }
    std::sort(cols.begin(), cols.end());
    if (slice.axis == TableAxis::alphas_by_k) {
        std::sort(row_alphas.begin(), row_alphas.end());
        for (const auto a : row_alphas) rows.push_back(format_alpha(a));
    }

    const std::size_t nr = rows.size(), nc = cols.size();
    std::vector<std::vector<double>> grid(nr, std::vector<double>(nc, -1.0));  // -1 = NA
    for (const auto& cell : result.cells) {
        if (cell.key.mode != slice.mode) continue;
        std::string row_label;
        if (slice.axis == TableAxis::spaces_by_k) {
            if (cell.key.alpha != slice.alpha) continue;
            row_label = cell.key.space;
        } else {
            if (cell.key.space != slice.space) continue;
            row_label = format_alpha(cell.key.alpha);
        }
        const auto r = std::find(rows.begin(), rows.end(), row_label) - rows.begin();
        const auto c = std::find(cols.begin(), cols.end(), cell.key.k) - cols.begin();
        if (static_cast<std::size_t>(r) >= nr || static_cast<std::size_t>(c) >= nc) continue;
        if (cell.ok) grid[r][c] = metric_value(cell.metrics.mean, slice.metric);
    }

    std::vector<std::vector<bool>> best_row(nr, std::vector<bool>(nc, false));
    std::vector<std::vector<bool>> best_col(nr, std::vector<bool>(nc, false));
    for (std::size_t r = 0; r < nr; ++r) {
        double m = -1.0;
        for (std::size_t c = 0; c < nc; ++c) m = std::max(m, grid[r][c]);
        if (m >= 0.0)
            for (std::size_t c = 0; c < nc; ++c) best_row[r][c] = grid[r][c] == m;
    }
    for (std::size_t c = 0; c < nc; ++c) {
        double m = -1.0;
        for (std::size_t r = 0; r < nr; ++r) m = std::max(m, grid[r][c]);
        if (m >= 0.0)
            for (std::size_t r = 0; r < nr; ++r) best_col[r][c] = grid[r][c] == m;
    }

    const std::string title = to_string(slice.metric) + " | " + to_string(slice.mode) +
                              (slice.axis == TableAxis::spaces_by_k
                                   ? " | alpha=" + format_alpha(slice.alpha)
                                   : " | space=" + slice.space);

    std::ostringstream text;
    std::ostringstream csv;
    csv << "row,col,value,best_in_row,best_in_col\n";

    std::size_t label_w = 6;
    for (const auto& r : rows) label_w = std::max(label_w, r.size());
    text << title << '\n';
    text << std::string(label_w, ' ');
    for (const auto k : cols) {
        std::string h = "k=" + std::to_string(k);
        text << "  " << std::string(h.size() >= 10 ? 0 : 10 - h.size(), ' ') << h;
    }
    text << '\n';

    for (std::size_t r = 0; r < nr; ++r) {
        text << rows[r] << std::string(label_w - rows[r].size(), ' ');
        for (std::size_t c = 0; c < nc; ++c) {
            std::string v = grid[r][c] < 0.0 ? "NA" : format_value(grid[r][c]);
            std::string decorated = v;
            if (grid[r][c] >= 0.0) {
                if (best_row[r][c]) decorated = "_" + decorated + "_";
                if (best_col[r][c]) decorated = "*" + decorated + "*";
            }
            text << "  " << std::string(decorated.size() >= 10 ? 0 : 10 - decorated.size(), ' ')
                 << decorated;
            csv << rows[r] << ",k=" << cols[c] << ',' << v << ',' << (best_row[r][c] ? 1 : 0)
                << ',' << (best_col[r][c] ? 1 : 0) << '\n';
        }
        text << '\n';
    }
    return {text.str(), csv.str()};
}

std::string metric_csv(const SweepResult& result, MetricId metric) {
    std::ostringstream out;
    out << "space,mode,k,alpha," << to_string(metric) << '\n';
    if (result.baseline) {
        out << "(baseline),none,0,0,"
            << format_value(metric_value(result.baseline->metrics.mean, metric)) << '\n';
    }
    for (const auto& cell : result.cells) {
        out << cell.key.space << ',' << to_string(cell.key.mode) << ',' << cell.key.k << ','
            << format_alpha(cell.key.alpha) << ',';
        if (cell.ok)
            out << format_value(metric_value(cell.metrics.mean, metric));
        else
            out << "NA";
        out << '\n';
    }
    return out.str();
}

std::string significance_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "space,mode,k,alpha,t,p,significant\n";
    char buf[64];
    for (const auto& cell : result.cells) {
        if (!cell.ok || !cell.vs_baseline) continue;
        std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%d", cell.vs_baseline->t,
                      cell.vs_baseline->p, cell.vs_baseline->significant ? 1 : 0);
        out << cell.key.space << ',' << to_string(cell.key.mode) << ',' << cell.key.k << ','
            << format_alpha(cell.key.alpha) << ',' << buf << '\n';
    }
    return out.str();
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (const char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open file for checksumming");
    std::uint64_t h = 14695981039346656037ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const auto n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

}  // namespace expandir
