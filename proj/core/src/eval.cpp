// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#include "expandir/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "expandir/errors.hpp"
#include "expandir/log.hpp"

namespace expandir {

Qrels Qrels::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open qrels file");
    Qrels q;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string qid, iter, docid, rel_s;
        if (!(ss >> qid >> iter >> docid >> rel_s))
            throw ParseError(path, lineno, "expected 4 columns `qid iter docid rel`");
        int rel = 0;
        try {
            rel = std::stoi(rel_s);
        } catch (const std::exception&) {
            throw ParseError(path, lineno, "malformed relevance value '" + rel_s + "'");
        }
        auto& row = q.rows_[qid];
        if (row.count(docid) > 0)
            log::warn(path + ":" + std::to_string(lineno) + ": duplicate judgment for (" +
                      qid + ", " + docid + "), keeping the last");
        row[docid] = rel > 0;
    }
    return q;
}

void Qrels::set(const std::string& qid, const std::string& doc_id, bool relevant) {
    rows_[qid][doc_id] = relevant;
}

bool Qrels::is_relevant(const std::string& qid, const std::string& doc_id) const {
    auto it = rows_.find(qid);
    if (it == rows_.end()) return false;
    auto dit = it->second.find(doc_id);
    return dit != it->second.end() && dit->second;
}

std::size_t Qrels::relevant_count(const std::string& qid) const {
    auto it = rows_.find(qid);
    if (it == rows_.end()) return 0;
    std::size_t n = 0;
    for (const auto& [doc, rel] : it->second)
        if (rel) ++n;
    return n;
}

std::vector<std::string> Qrels::query_ids() const {
    std::vector<std::string> ids;
    ids.reserve(rows_.size());
    for (const auto& [qid, row] : rows_) ids.push_back(qid);
    return ids;
}

const std::unordered_map<std::string, bool>* Qrels::row(const std::string& qid) const {
    auto it = rows_.find(qid);
    return it == rows_.end() ? nullptr : &it->second;
}

namespace {

bool relevant_in(const std::unordered_map<std::string, bool>& row, const std::string& doc) {
    auto it = row.find(doc);
    return it != row.end() && it->second;
}

}  // namespace

double p_at_k(const std::vector<std::string>& ranked,
              const std::unordered_map<std::string, bool>& row, std::size_t k) {
    if (k == 0) return 0.0;
    std::size_t hits = 0;
    const std::size_t lim = std::min(k, ranked.size());
    for (std::size_t i = 0; i < lim; ++i)
        if (relevant_in(row, ranked[i])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(k);
}

double average_precision(const std::vector<std::string>& ranked,
                         const std::unordered_map<std::string, bool>& row) {
    std::size_t total_relevant = 0;
    for (const auto& [doc, rel] : row)
        if (rel) ++total_relevant;
    if (total_relevant == 0) return 0.0;

    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (relevant_in(row, ranked[i])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(total_relevant);
}

double reciprocal_rank(const std::vector<std::string>& ranked,
                       const std::unordered_map<std::string, bool>& row) {
    for (std::size_t i = 0; i < ranked.size(); ++i)
        if (relevant_in(row, ranked[i])) return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

MetricsReport evaluate(const RankedRun& run, const Qrels& qrels) {
    std::unordered_map<std::string, const std::vector<RunEntry>*> by_qid;
    for (const auto& [qid, entries] : run.queries) by_qid.emplace(qid, &entries);

    MetricsReport report;
    for (const auto& qid : qrels.query_ids()) {
        const auto* row = qrels.row(qid);
        std::size_t total_relevant = 0;
        for (const auto& [doc, rel] : *row)
            if (rel) ++total_relevant;
        if (total_relevant == 0) continue;  // excluded from all averages

        std::vector<std::string> ranked;
        if (auto it = by_qid.find(qid); it != by_qid.end()) {
            std::vector<const RunEntry*> entries;
            entries.reserve(it->second->size());
            for (const auto& e : *it->second) entries.push_back(&e);
            std::sort(entries.begin(), entries.end(),
                      [](const RunEntry* a, const RunEntry* b) {
                          if (a->score != b->score) return a->score > b->score;
                          return a->doc_id > b->doc_id;  // community tie order
                      });
            ranked.reserve(entries.size());
            for (const auto* e : entries) ranked.push_back(e->doc_id);
        }

        QueryMetrics m;
        m.ap = average_precision(ranked, *row);
        m.rr = reciprocal_rank(ranked, *row);
        m.p5 = p_at_k(ranked, *row, 5);
        m.p10 = p_at_k(ranked, *row, 10);
        m.p30 = p_at_k(ranked, *row, 30);
        report.per_query.emplace_back(qid, m);
    }

    report.query_count = report.per_query.size();
    if (report.query_count > 0) {
        for (const auto& [qid, m] : report.per_query) {
            report.mean.ap += m.ap;
            report.mean.rr += m.rr;
            report.mean.p5 += m.p5;
            report.mean.p10 += m.p10;
            report.mean.p30 += m.p30;
        }
        const double n = static_cast<double>(report.query_count);
        report.mean.ap /= n;
        report.mean.rr /= n;
        report.mean.p5 /= n;
        report.mean.p10 /= n;
        report.mean.p30 /= n;
    }
    return report;
}

double mrr(const RankedRun& run, const Qrels& qrels) {
    return evaluate(run, qrels).mean.rr;
}

namespace {

void csv_row(std::ostream& out, const std::string& qid, const char* metric, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    out << qid << ',' << metric << ',' << buf << '\n';
}

}  // namespace

void write_report_csv(std::ostream& out, const MetricsReport& report) {
    out << "query_id,metric,value\n";
    for (const auto& [qid, m] : report.per_query) {
        csv_row(out, qid, "map", m.ap);
        csv_row(out, qid, "mrr", m.rr);
        csv_row(out, qid, "p5", m.p5);
        csv_row(out, qid, "p10", m.p10);
        csv_row(out, qid, "p30", m.p30);
    }
    csv_row(out, "all", "map", report.mean.ap);
    csv_row(out, "all", "mrr", report.mean.rr);
    csv_row(out, "all", "p5", report.mean.p5);
    csv_row(out, "all", "p10", report.mean.p10);
    csv_row(out, "all", "p30", report.mean.p30);
}

void write_report_table(std::ostream& out, const MetricsReport& report, bool per_query) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-12s %8s %8s %8s %8s %8s\n", "query", "map", "mrr",
                  "p@5", "p@10", "p@30");
    out << buf;
    auto row = [&](const std::string& label, const QueryMetrics& m) {
        std::snprintf(buf, sizeof(buf), "%-12s %8.4f %8.4f %8.4f %8.4f %8.4f\n",
                      label.c_str(), m.ap, m.rr, m.p5, m.p10, m.p30);
        out << buf;
    };
    if (per_query)
        for (const auto& [qid, m] : report.per_query) row(qid, m);
    row("all", report.mean);
    out << "queries evaluated: " << report.query_count << '\n';
}

}  // namespace expandir
