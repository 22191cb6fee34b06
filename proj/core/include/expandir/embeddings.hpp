// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#pragma once

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "expandir/corpus.hpp"

namespace expandir {

struct Neighbor {
    std::string term;
    double similarity;  // cosine of the stored vectors, in [-1, 1]
};

enum class VectorFormat { text, binary };

// u.v / (||u|| ||v||). Throws std::invalid_argument on length mismatch and
// std::domain_error on an all-zero vector.
double cosine(std::span<const float> u, std::span<const float> v);

// A loaded word-vector space. Vectors are stored unnormalized as parsed;
// unit-normalized copies are built once at load for the kNN scan (kept in
// double precision so the optimized scan and the brute-force oracle agree to
// the last bit on non-degenerate inputs). Immutable after load; concurrent
// knn calls are safe.
class EmbeddingSpace {
public:
    // Text format: header "count dim", then one "term v1 .. vdim" per line.
    // Binary format: ASCII header "count dim\n", then per word the term bytes
    // terminated by a space followed by dim little-endian float32, with an
    // optional trailing newline per record.
    // Header/body count mismatch and wrong-length vectors are errors;
    // duplicate terms keep the first occurrence and log a warning.
    static EmbeddingSpace load(const std::string& path, VectorFormat format);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return vocab_.size(); }
    const std::vector<std::string>& vocab() const { return vocab_; }
    bool contains(const std::string& term) const { return index_.count(term) > 0; }
    std::span<const float> vector_of(const std::string& term) const;

    // Exactly min(k, eligible candidates) neighbors sorted by similarity
    // desc, ties by ascending term; excluded terms and zero vectors are not
    // candidates. Throws std::domain_error on a zero anchor.
    std::vector<Neighbor> knn(std::span<const float> anchor, std::size_t k,
                              const std::unordered_set<std::string>& exclude) const;

    // Same contract as knn, as a plain unoptimized full scan. Testing oracle.
    std::vector<Neighbor> knn_bruteforce(std::span<const float> anchor, std::size_t k,
                                         const std::unordered_set<std::string>& exclude) const;

    // Provenance: which training-corpus variant the vectors came from, and
    // the preprocessing to apply to terms before vocabulary lookups.
    CorpusVariant variant;
    PreprocessConfig lookup_config;
    // Informational training metadata (e.g. architecture/window/iterations).
    std::map<std::string, std::string> hyperparams;

private:
    std::size_t dim_ = 0;
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::vector<float> raw_;          // vocab x dim, row-major
    std::vector<double> normalized_;  // unit rows; zero rows stay zero
    std::vector<double> norms_;

    void finalize();
};

// Writers for both wire formats, mainly for tooling and tests.
void write_vectors_text(const std::string& path,
                        const std::vector<std::pair<std::string, std::vector<float>>>& rows,
                        std::size_t dim);
void write_vectors_binary(const std::string& path,
                          const std::vector<std::pair<std::string, std::vector<float>>>& rows,
                          std::size_t dim, bool record_newline = true);

}  // namespace expandir
