// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace expandir {

// Ordered set of (term, weight) pairs. Insertion order is preserved so that
// serialised queries and downstream scoring are deterministic; adding an
// existing term accumulates its weight.
class WeightedQuery {
public:
    using Term = std::pair<std::string, double>;

    void add(const std::string& term, double weight) {
        auto it = index_.find(term);
        if (it != index_.end()) {
            terms_[it->second].second += weight;
            return;
        }
        index_.emplace(term, terms_.size());
        terms_.emplace_back(term, weight);
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    bool contains(const std::string& term) const { return index_.count(term) > 0; }

    // 0.0 for absent terms.
    double weight_of(const std::string& term) const {
        auto it = index_.find(term);
        return it == index_.end() ? 0.0 : terms_[it->second].second;
    }

private:
    std::vector<Term> terms_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace expandir
