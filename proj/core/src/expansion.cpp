// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#include "expandir/expansion.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "expandir/errors.hpp"
#include "expandir/log.hpp"

namespace expandir {

namespace {

constexpr double kWeightFloor = 1e-9;

// Query terms mapped into the space's own vocabulary form (a stemmed space
// receives stemmed lookups, a raw space raw ones). A term may project to
// zero tokens (dropped) or, pathologically, several.
std::vector<std::pair<std::string, double>> lookup_terms(const WeightedQuery& query,
                                                         const EmbeddingSpace& space) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [term, weight] : query.terms()) {
        for (auto& tok : tokenize(term, space.lookup_config)) out.emplace_back(tok, weight);
    }
    return out;
}

class Accumulator {
public:
    void add(const std::string& term, double weight) {
        auto it = index_.find(term);
        if (it != index_.end()) {
            pairs_[it->second].second += weight;
            return;
        }
        index_.emplace(term, pairs_.size());
        pairs_.emplace_back(term, weight);
    }

    std::vector<std::pair<std::string, double>> take() { return std::move(pairs_); }

private:
    std::vector<std::pair<std::string, double>> pairs_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace

std::string to_string(ExpansionMode mode) {
    return mode == ExpansionMode::local ? "local" : "global";
}

ExpansionMode expansion_mode_from_string(const std::string& s) {
    if (s == "local") return ExpansionMode::local;
    if (s == "global") return ExpansionMode::global;
    throw std::invalid_argument("unknown expansion mode '" + s + "'");
}

Expansion expand_local(const WeightedQuery& query, const EmbeddingSpace& space,
                       const ExpansionConfig& cfg) {
    Expansion e{{}, ExpansionMode::local, cfg.k, cfg.alpha};
    Accumulator acc;
    for (const auto& [anchor, weight] : lookup_terms(query, space)) {
        if (!space.contains(anchor)) continue;
        const auto vec = space.vector_of(anchor);
        bool zero = true;
        for (const float v : vec)
            if (v != 0.0f) { zero = false; break; }
        if (zero) {
            log::warn("query term '" + anchor + "' has a zero vector, skipped");
            continue;
        }
        const auto neighbors = space.knn(vec, cfg.k, {anchor});
        for (const auto& nb : neighbors) {
            if (nb.similarity < cfg.min_similarity) continue;
            const double scale = cfg.scale_by_query_weight ? weight : 1.0;
            acc.add(nb.term, cfg.alpha * nb.similarity * scale);
        }
    }
    e.pairs = acc.take();
    return e;
}

Expansion expand_global(const WeightedQuery& query, const EmbeddingSpace& space,
                        const ExpansionConfig& cfg) {
    Expansion e{{}, ExpansionMode::global, cfg.k, cfg.alpha};
    const auto anchors = lookup_terms(query, space);

    std::vector<float> centroid(space.dim(), 0.0f);
    std::unordered_set<std::string> exclude;
    std::size_t in_vocab = 0;
    for (const auto& [term, weight] : anchors) {
        if (cfg.exclude_query_terms) exclude.insert(term);
        if (!space.contains(term)) continue;
        const auto vec = space.vector_of(term);
        for (std::size_t i = 0; i < centroid.size(); ++i) centroid[i] += vec[i];
        ++in_vocab;
    }
    if (in_vocab == 0) {
        log::warn("global expansion: no query term in vocabulary, empty expansion");
        return e;
    }
    bool zero = true;
    for (const float v : centroid)
        if (v != 0.0f) { zero = false; break; }
    if (zero) {
        log::warn("global expansion: query centroid is the zero vector, empty expansion");
        return e;
    }

    for (const auto& nb : space.knn(centroid, cfg.k, exclude)) {
        if (nb.similarity < cfg.min_similarity) continue;
        e.pairs.emplace_back(nb.term, cfg.alpha * nb.similarity);
    }
    return e;
}

WeightedQuery fuse_query(const WeightedQuery& query, const Expansion& expansion) {
    WeightedQuery fused;
    for (const auto& [term, weight] : query.terms()) fused.add(term, weight);
    for (const auto& [term, weight] : expansion.pairs) fused.add(term, weight);

    WeightedQuery out;
    for (const auto& [term, weight] : fused.terms())
        out.add(term, std::max(weight, kWeightFloor));
    return out;
}

WeightedQuery expand_and_fuse(const WeightedQuery& query, const EmbeddingSpace& space,
                              const ExpansionConfig& cfg) {
    if (cfg.k == 0 || cfg.alpha == 0.0) return query;
    const Expansion e = cfg.mode == ExpansionMode::local ? expand_local(query, space, cfg)
                                                         : expand_global(query, space, cfg);
    return fuse_query(query, e);
}

std::string query_to_jsonl(const std::string& qid, const WeightedQuery& query) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [term, weight] : query.terms())
        terms.push_back(nlohmann::json::array({term, weight}));
    nlohmann::json line;
    line["qid"] = qid;
    line["terms"] = std::move(terms);
    return line.dump();
}

std::vector<std::pair<std::string, WeightedQuery>> load_queries_jsonl(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open query file");
    std::vector<std::pair<std::string, WeightedQuery>> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path, lineno, std::string("malformed JSON: ") + e.what());
        }
        if (!rec.contains("qid") || !rec["qid"].is_string() || !rec.contains("terms") ||
            !rec["terms"].is_array())
            throw ParseError(path, lineno, "expected {\"qid\": ..., \"terms\": [[term, weight], ...]}");
        const std::string qid = rec["qid"].get<std::string>();
        if (!seen.insert(qid).second)
            throw ParseError(path, lineno, "duplicate query id '" + qid + "'");
        WeightedQuery q;
        for (const auto& pair : rec["terms"]) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
                !pair[1].is_number())
                throw ParseError(path, lineno, "terms entries must be [term, weight] pairs");
            const double w = pair[1].get<double>();
            if (!(w > 0.0))
                throw ParseError(path, lineno, "non-positive weight for term '" +
                                                   pair[0].get<std::string>() + "'");
            q.add(pair[0].get<std::string>(), w);
        }
        out.emplace_back(qid, std::move(q));
    }
    return out;
}

}  // namespace expandir
