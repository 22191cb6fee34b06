// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "expandir/corpus.hpp"
#include "expandir/query.hpp"

namespace expandir {

struct BM25Params {
    double k1 = 1.2;
    double b = 0.75;
    double k3 = 8.0;

    // idf = ln((N - df + 0.5) / (df + 0.5)), floored at 0 unless disabled;
    // the floor avoids negative contributions on tiny corpora.
    bool clamp_negative_idf = true;

    // How query weights enter the score: through the k3 saturation component
    // (k3+1)w/(k3+w), or as a bare multiplier.
    enum class QueryWeighting : std::uint8_t { k3_saturation = 0, multiplier = 1 };
    QueryWeighting query_weighting = QueryWeighting::k3_saturation;
};

struct RunEntry {
    std::string doc_id;
    double score;
    std::uint32_t rank;  // 1-based, contiguous
};

// Ranked results for a set of queries, in query insertion order.
struct RankedRun {
    std::vector<std::pair<std::string, std::vector<RunEntry>>> queries;

    void add(std::string qid, std::vector<RunEntry> entries) {
        queries.emplace_back(std::move(qid), std::move(entries));
    }
};

// Immutable after build; concurrent searches over a shared index are safe.
class InvertedIndex {
public:
    // Terms are post-preprocessing tokens. Throws std::invalid_argument on an
    // empty corpus (avgdl undefined) or duplicate document ids.
    static InvertedIndex build(const std::vector<Document>& docs,
                               const PreprocessConfig& config, const BM25Params& params);

    std::size_t doc_count() const { return doc_ids_.size(); }
    double avg_doc_length() const { return avgdl_; }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    const BM25Params& params() const { return params_; }
    const PreprocessConfig& config() const { return config_; }

    bool has_doc(const std::string& doc_id) const;
    std::size_t doc_length(const std::string& doc_id) const;  // throws on unknown id
    std::size_t df(const std::string& term) const;            // 0 for unknown terms
    std::uint32_t tf(const std::string& term, const std::string& doc_id) const;

    // qtf_factor(qweight) * idf(term) * tf_saturation(tf, doclen); 0 when the
    // term does not occur in the document. Throws on unknown doc_id.
    double term_score(const std::string& term, double qweight,
                      const std::string& doc_id) const;

    // Sum of term_score over the query, documents with score exactly 0
    // omitted, sorted by (score desc, doc_id asc), at most top_n entries.
    // An empty query yields an empty result.
    std::vector<RunEntry> search(const WeightedQuery& query, std::size_t top_n) const;

    void save(const std::string& path) const;
    static InvertedIndex load(const std::string& path);

private:
    struct Posting {
        std::uint32_t doc;
        std::uint32_t tf;
    };

    double idf(std::size_t df) const;
    double qtf_factor(double qweight) const;
    double tf_saturation(double tf, double doclen) const;

    BM25Params params_;
    PreprocessConfig config_;
    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, std::uint32_t> doc_index_;
    std::vector<std::uint32_t> doc_lengths_;
    double avgdl_ = 0.0;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
};

// TREC 6-column run format: `qid Q0 docid rank score tag`, space-separated,
// scores with 4 decimals.
void write_run(std::ostream& out, const RankedRun& run, const std::string& tag);
RankedRun read_run(const std::string& path);

}  // namespace expandir
