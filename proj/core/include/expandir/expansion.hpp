// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string>
#include <vector>

#include "expandir/embeddings.hpp"
#include "expandir/query.hpp"

namespace expandir {

enum class ExpansionMode { local, global };

std::string to_string(ExpansionMode mode);
ExpansionMode expansion_mode_from_string(const std::string& s);

struct ExpansionConfig {
    ExpansionMode mode = ExpansionMode::local;
    std::size_t k = 5;    // neighbors per anchor (local) or per query (global)
    double alpha = 0.3;   // weight multiplier applied to each neighbor's similarity

    // Neighbors with similarity below this are dropped after the top-k cut.
    double min_similarity = 0.0;
    // Global mode: keep the original query terms out of the expansion.
    bool exclude_query_terms = true;
    // Scale neighbor weights by the anchor's query weight (off: the weight is
    // alpha * similarity regardless of the anchor weight).
    bool scale_by_query_weight = false;
};

// Expansion terms prior to fusion. Weights are alpha * similarity, summed
// over anchors when the same term is selected for several query terms.
struct Expansion {
    std::vector<std::pair<std::string, double>> pairs;
    ExpansionMode mode = ExpansionMode::local;
    std::size_t k = 0;
    double alpha = 0.0;
};

// Per-term expansion: for each query term found in the space (after the
// space's lookup preprocessing), take its k nearest neighbors excluding the
// term itself; other query terms stay eligible. Duplicate selections across
// anchors accumulate additively. OOV terms contribute nothing; an
// entirely-OOV query yields an empty expansion.
Expansion expand_local(const WeightedQuery& query, const EmbeddingSpace& space,
                       const ExpansionConfig& cfg);

// Whole-query expansion: k nearest neighbors of the unweighted sum of the
// in-vocabulary query term vectors, excluding the original query terms. An
// entirely-OOV query yields an empty expansion (with a warning).
Expansion expand_global(const WeightedQuery& query, const EmbeddingSpace& space,
                        const ExpansionConfig& cfg);

// Union of query and expansion terms; weights of shared terms sum
// (reinforcement). Fused weights are floored at 1e-9 so the positive-weight
// invariant survives admitted zero/negative similarities.
WeightedQuery fuse_query(const WeightedQuery& query, const Expansion& expansion);

// fuse_query(query, expand_<mode>(query, space, cfg)); with k = 0 or
// alpha = 0 the query is returned unchanged.
WeightedQuery expand_and_fuse(const WeightedQuery& query, const EmbeddingSpace& space,
                              const ExpansionConfig& cfg);

// One JSON line per query: {"qid": ..., "terms": [[term, weight], ...]}.
std::string query_to_jsonl(const std::string& qid, const WeightedQuery& query);

// Replay side of the JSONL interface: parses lines written by
// query_to_jsonl, in file order. Malformed lines, duplicate qids and
// non-positive weights raise ParseError with the offending line.
std::vector<std::pair<std::string, WeightedQuery>> load_queries_jsonl(
    const std::string& path);

}  // namespace expandir
