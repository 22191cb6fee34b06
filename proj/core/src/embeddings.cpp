// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#include "expandir/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "expandir/errors.hpp"
#include "expandir/log.hpp"

namespace expandir {

namespace {

struct Header {
    std::size_t count;
    std::size_t dim;
};

Header parse_header(const std::string& line, const std::string& path) {
    std::size_t count = 0, dim = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    auto r1 = std::from_chars(p, end, count);
    if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != ' ')
        throw ParseError(path, 1, "expected header `count dim`");
    auto r2 = std::from_chars(r1.ptr + 1, end, dim);
    if (r2.ec != std::errc{})
        throw ParseError(path, 1, "expected header `count dim`");
    for (const char* q = r2.ptr; q != end; ++q)
        if (*q != ' ' && *q != '\r') throw ParseError(path, 1, "trailing junk in header");
    if (count == 0 || dim == 0)
        throw ParseError(path, 1, "header declares an empty space");
    return {count, dim};
}

float float_from_le(const unsigned char b[4]) {
    const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) |
                               (static_cast<std::uint32_t>(b[1]) << 8) |
                               (static_cast<std::uint32_t>(b[2]) << 16) |
                               (static_cast<std::uint32_t>(b[3]) << 24);
    return std::bit_cast<float>(bits);
}

void float_to_le(float v, unsigned char b[4]) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    b[0] = static_cast<unsigned char>(bits);
    b[1] = static_cast<unsigned char>(bits >> 8);
    b[2] = static_cast<unsigned char>(bits >> 16);
    b[3] = static_cast<unsigned char>(bits >> 24);
}

}  // namespace

double cosine(std::span<const float> u, std::span<const float> v) {
    if (u.size() != v.size())
        throw std::invalid_argument("cosine: vector length mismatch");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += static_cast<double>(u[i]) * static_cast<double>(v[i]);
        nu += static_cast<double>(u[i]) * static_cast<double>(u[i]);
        nv += static_cast<double>(v[i]) * static_cast<double>(v[i]);
    }
    if (nu == 0.0 || nv == 0.0)
        throw std::domain_error("cosine: zero vector");
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

EmbeddingSpace EmbeddingSpace::load(const std::string& path, VectorFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open vector file");

    std::string header_line;
    if (!std::getline(in, header_line)) throw ParseError(path, 1, "missing header line");
    const Header h = parse_header(header_line, path);

    EmbeddingSpace space;
    space.dim_ = h.dim;
    space.vocab_.reserve(h.count);
    space.raw_.reserve(h.count * h.dim);

    auto add_row = [&](std::string term, const std::vector<float>& vec) {
        if (space.index_.count(term) > 0) {
            log::warn(path + ": duplicate term '" + term + "', keeping first occurrence");
            return;
        }
        space.index_.emplace(term, static_cast<std::uint32_t>(space.vocab_.size()));
        space.vocab_.push_back(std::move(term));
        space.raw_.insert(space.raw_.end(), vec.begin(), vec.end());
    };

    if (format == VectorFormat::text) {
        std::string line;
        std::size_t lineno = 1;
        std::size_t records = 0;
        std::vector<float> vec;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line == "\r") continue;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto sp = line.find(' ');
            if (sp == std::string::npos)
                throw ParseError(path, lineno, "expected `term v1 .. vdim`");
            std::string term = line.substr(0, sp);
            vec.clear();
            const char* p = line.data() + sp;
            const char* end = line.data() + line.size();
            while (p != end) {
                while (p != end && *p == ' ') ++p;
                if (p == end) break;
                float value = 0.0f;
                auto r = std::from_chars(p, end, value);
                if (r.ec != std::errc{})
                    throw ParseError(path, lineno,
                                     "malformed vector component for term '" + term + "'");
                vec.push_back(value);
                p = r.ptr;
            }
            if (vec.size() != h.dim)
                throw ParseError(path, lineno,
                                 "term '" + term + "' has " + std::to_string(vec.size()) +
                                     " components, expected " + std::to_string(h.dim));
            ++records;
            add_row(std::move(term), vec);
        }
        if (records != h.count)
            throw ParseError(path, "header declares " + std::to_string(h.count) +
                                       " words but file contains " + std::to_string(records));
    } else {
        std::vector<float> vec(h.dim);
        std::vector<unsigned char> buf(h.dim * 4);
        for (std::size_t r = 0; r < h.count; ++r) {
            int c = in.get();
            while (c == '\n' || c == '\r' || c == ' ') c = in.get();
            if (c == std::ifstream::traits_type::eof())
                throw ParseError(path, "header declares " + std::to_string(h.count) +
                                           " words but file ends after " + std::to_string(r));
            std::string term;
            while (c != ' ' && c != std::ifstream::traits_type::eof()) {
                term.push_back(static_cast<char>(c));
                c = in.get();
            }
            if (c == std::ifstream::traits_type::eof())
                throw ParseError(path, "truncated record for term '" + term + "' (record " +
                                           std::to_string(r + 1) + " of " +
                                           std::to_string(h.count) + ")");
            in.read(reinterpret_cast<char*>(buf.data()),
                    static_cast<std::streamsize>(buf.size()));
            if (static_cast<std::size_t>(in.gcount()) != buf.size())
                throw ParseError(path, "truncated vector for term '" + term + "' (record " +
                                           std::to_string(r + 1) + " of " +
                                           std::to_string(h.count) + ")");
            for (std::size_t i = 0; i < h.dim; ++i) vec[i] = float_from_le(&buf[i * 4]);
            add_row(std::move(term), vec);
        }
    }

    if (space.vocab_.empty()) throw ParseError(path, "no vectors loaded");
    space.finalize();
    return space;
}

void EmbeddingSpace::finalize() {
    const std::size_t n = vocab_.size();
    normalized_.resize(n * dim_);
    norms_.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        double sq = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            const double v = raw_[r * dim_ + i];
            sq += v * v;
        }
        const double norm = std::sqrt(sq);
        norms_[r] = norm;
        for (std::size_t i = 0; i < dim_; ++i) {
            const double v = raw_[r * dim_ + i];
            normalized_[r * dim_ + i] = norm == 0.0 ? 0.0 : v / norm;
        }
    }
}

std::span<const float> EmbeddingSpace::vector_of(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end())
        throw std::invalid_argument("term '" + term + "' not in vocabulary");
    return {raw_.data() + static_cast<std::size_t>(it->second) * dim_, dim_};
}

std::vector<Neighbor> EmbeddingSpace::knn(std::span<const float> anchor, std::size_t k,
                                          const std::unordered_set<std::string>& exclude) const {
    if (anchor.size() != dim_)
        throw std::invalid_argument("knn: anchor length does not match space dimension");
    if (k == 0) return {};

    double asq = 0.0;
    std::vector<double> a(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        a[i] = anchor[i];
        asq += a[i] * a[i];
    }
    if (asq == 0.0) throw std::domain_error("knn: zero anchor vector");
    const double anorm = std::sqrt(asq);
    for (auto& v : a) v /= anorm;

    std::vector<std::pair<double, std::uint32_t>> sims;
    sims.reserve(vocab_.size());
    for (std::uint32_t r = 0; r < vocab_.size(); ++r) {
        if (norms_[r] == 0.0) continue;
        if (exclude.count(vocab_[r]) > 0) continue;
        const double* row = normalized_.data() + static_cast<std::size_t>(r) * dim_;
        double dot = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) dot += a[i] * row[i];
        sims.emplace_back(dot, r);
    }

    auto better = [this](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first > y.first;
        return vocab_[x.second] < vocab_[y.second];
    };
    const std::size_t take = std::min(k, sims.size());
    std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(take),
                      sims.end(), better);

    std::vector<Neighbor> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i)
        out.push_back({vocab_[sims[i].second], sims[i].first});
    return out;
}

std::vector<Neighbor> EmbeddingSpace::knn_bruteforce(
    std::span<const float> anchor, std::size_t k,
    const std::unordered_set<std::string>& exclude) const {
    if (anchor.size() != dim_)
        throw std::invalid_argument("knn: anchor length does not match space dimension");
    if (k == 0) return {};

    double asq = 0.0;
    for (const float v : anchor) asq += static_cast<double>(v) * static_cast<double>(v);
    if (asq == 0.0) throw std::domain_error("knn: zero anchor vector");
    const double anorm = std::sqrt(asq);

    std::vector<Neighbor> all;
    for (std::uint32_t r = 0; r < vocab_.size(); ++r) {
        if (norms_[r] == 0.0) continue;
        if (exclude.count(vocab_[r]) > 0) continue;
        // Same arithmetic as knn: normalize both sides, then dot.
        const double rnorm = norms_[r];
        double dot = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            const double av = static_cast<double>(anchor[i]) / anorm;
            const double rv = static_cast<double>(raw_[static_cast<std::size_t>(r) * dim_ + i]) / rnorm;
            dot += av * rv;
        }
        all.push_back({vocab_[r], dot});
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& x, const Neighbor& y) {
        if (x.similarity != y.similarity) return x.similarity > y.similarity;
        return x.term < y.term;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

void write_vectors_text(const std::string& path,
                        const std::vector<std::pair<std::string, std::vector<float>>>& rows,
                        std::size_t dim) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path, "cannot open vector file for writing");
    out << rows.size() << ' ' << dim << '\n';
    char buf[64];
    for (const auto& [term, vec] : rows) {
        out << term;
        for (const float v : vec) {
            std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
            out << ' ' << buf;
        }
        out << '\n';
    }
}

void write_vectors_binary(const std::string& path,
                          const std::vector<std::pair<std::string, std::vector<float>>>& rows,
                          std::size_t dim, bool record_newline) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path, "cannot open vector file for writing");
    out << rows.size() << ' ' << dim << '\n';
    unsigned char b[4];
    for (const auto& [term, vec] : rows) {
        out << term << ' ';
        for (const float v : vec) {
            float_to_le(v, b);
            out.write(reinterpret_cast<const char*>(b), 4);
        }
        if (record_newline) out << '\n';
    }
}

}  // namespace expandir
