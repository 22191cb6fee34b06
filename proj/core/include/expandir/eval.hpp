// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "expandir/index.hpp"

namespace expandir {

// Binary relevance judgments; unjudged pairs count as non-relevant.
class Qrels {
public:
    // 4-column TREC format `qid iter docid rel`, whitespace-separated.
    // rel > 0 is relevant. Duplicate pairs keep the last value (warning).
    static Qrels load(const std::string& path);

    void set(const std::string& qid, const std::string& doc_id, bool relevant);
    bool is_relevant(const std::string& qid, const std::string& doc_id) const;
    std::size_t relevant_count(const std::string& qid) const;
    bool has_query(const std::string& qid) const { return rows_.count(qid) > 0; }

    // Query ids in ascending order.
    std::vector<std::string> query_ids() const;
    const std::unordered_map<std::string, bool>* row(const std::string& qid) const;

private:
    std::map<std::string, std::unordered_map<std::string, bool>> rows_;
};

struct QueryMetrics {
    double ap = 0.0;
    double rr = 0.0;
    double p5 = 0.0;
    double p10 = 0.0;
    double p30 = 0.0;
};

struct MetricsReport {
    // Evaluated queries in ascending qid order. A query is evaluated when it
    // has at least one relevant document in the qrels; queries absent from
    // the run still appear, with all-zero metrics.
    std::vector<std::pair<std::string, QueryMetrics>> per_query;
    QueryMetrics mean;
    std::size_t query_count = 0;
};

// ranked: document ids in rank order. relevant(doc) via the qrels row.
// Lists shorter than k count the missing tail as non-relevant.
double p_at_k(const std::vector<std::string>& ranked,
              const std::unordered_map<std::string, bool>& row, std::size_t k);

// Mean of p@rank over the ranks holding relevant documents, normalized by
// the total number of relevant documents in the qrels row.
double average_precision(const std::vector<std::string>& ranked,
                         const std::unordered_map<std::string, bool>& row);

// 1/rank of the first relevant document; 0 when none is retrieved.
double reciprocal_rank(const std::vector<std::string>& ranked,
                       const std::unordered_map<std::string, bool>& row);

// Community-tool semantics: entries are re-sorted by (score desc, doc_id
// desc) before metrics are computed, queries without relevant documents are
// excluded from all averages, and a query retrieving no relevant document
// contributes 0 (not skipped).
MetricsReport evaluate(const RankedRun& run, const Qrels& qrels);

// Mean reciprocal rank over the evaluated queries (same exclusion rule).
double mrr(const RankedRun& run, const Qrels& qrels);

// Machine-readable report: `query_id,metric,value` rows, means keyed `all`.
void write_report_csv(std::ostream& out, const MetricsReport& report);
// Human-readable table; per_query adds one row per evaluated query.
void write_report_table(std::ostream& out, const MetricsReport& report, bool per_query);

}  // namespace expandir
