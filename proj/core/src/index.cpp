// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#include "expandir/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "expandir/errors.hpp"

namespace expandir {

namespace {

// Little-endian fixed-width encoding, independent of host byte order.

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                 static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
    out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v));
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    put_u64(out, bits);
}

void put_str(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& in) {
    const std::uint64_t lo = get_u32(in);
    const std::uint64_t hi = get_u32(in);
    return lo | (hi << 32);
}

double get_f64(std::istream& in) {
    const std::uint64_t bits = get_u64(in);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

std::string get_str(std::istream& in) {
    const std::uint32_t n = get_u32(in);
    if (n > (1u << 28)) throw std::runtime_error("corrupt index file: oversized string");
    std::string s(n, '\0');
    in.read(s.data(), n);
    return s;
}

constexpr char kMagic[] = "EXPIDX1\n";

}  // namespace

InvertedIndex InvertedIndex::build(const std::vector<Document>& docs,
                                   const PreprocessConfig& config,
                                   const BM25Params& params) {
    if (docs.empty()) throw std::invalid_argument("cannot index an empty corpus: avgdl undefined");

    InvertedIndex idx;
    idx.params_ = params;
    idx.config_ = config;
    idx.doc_ids_.reserve(docs.size());
    idx.doc_lengths_.reserve(docs.size());

    std::uint64_t total_len = 0;
    for (const auto& doc : docs) {
        if (doc.id.empty()) throw std::invalid_argument("document with empty id");
        if (!idx.doc_index_.emplace(doc.id, static_cast<std::uint32_t>(idx.doc_ids_.size())).second)
            throw std::invalid_argument("duplicate document id '" + doc.id + "'");
        const std::uint32_t d = static_cast<std::uint32_t>(idx.doc_ids_.size());
        idx.doc_ids_.push_back(doc.id);

        const auto tokens = tokenize(doc.text, config);
        idx.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_len += tokens.size();

        std::unordered_map<std::string, std::uint32_t> counts;
        for (const auto& tok : tokens) ++counts[tok];
        for (const auto& [term, tf] : counts) idx.postings_[term].push_back({d, tf});
    }
    // Postings accumulate in document order already, but unordered_map
    // iteration above is per-document, so each list is naturally sorted by d.
    idx.avgdl_ = static_cast<double>(total_len) / static_cast<double>(docs.size());
    return idx;
}

bool InvertedIndex::has_doc(const std::string& doc_id) const {
    return doc_index_.count(doc_id) > 0;
}

std::size_t InvertedIndex::doc_length(const std::string& doc_id) const {
    auto it = doc_index_.find(doc_id);
    if (it == doc_index_.end())
        throw std::invalid_argument("unknown document id '" + doc_id + "'");
    return doc_lengths_[it->second];
}

std::size_t InvertedIndex::df(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : it->second.size();
}

std::uint32_t InvertedIndex::tf(const std::string& term, const std::string& doc_id) const {
    auto dit = doc_index_.find(doc_id);
    if (dit == doc_index_.end())
        throw std::invalid_argument("unknown document id '" + doc_id + "'");
    auto pit = postings_.find(term);
    if (pit == postings_.end()) return 0;
    for (const auto& p : pit->second)
        if (p.doc == dit->second) return p.tf;
    return 0;
}

double InvertedIndex::idf(std::size_t df) const {
    const double n = static_cast<double>(doc_count());
    const double d = static_cast<double>(df);
    const double v = std::log((n - d + 0.5) / (d + 0.5));
    return params_.clamp_negative_idf ? std::max(0.0, v) : v;
}

double InvertedIndex::qtf_factor(double qweight) const {
    if (params_.query_weighting == BM25Params::QueryWeighting::multiplier) return qweight;
    return (params_.k3 + 1.0) * qweight / (params_.k3 + qweight);
}

double InvertedIndex::tf_saturation(double tf, double doclen) const {
    return tf * (params_.k1 + 1.0) /
           (tf + params_.k1 * (1.0 - params_.b + params_.b * doclen / avgdl_));
}

double InvertedIndex::term_score(const std::string& term, double qweight,
                                 const std::string& doc_id) const {
    auto dit = doc_index_.find(doc_id);
    if (dit == doc_index_.end())
        throw std::invalid_argument("unknown document id '" + doc_id + "'");
    const std::uint32_t tfv = tf(term, doc_id);
    if (tfv == 0) return 0.0;
    const double qi = qtf_factor(qweight) * idf(df(term));
    return qi * tf_saturation(tfv, doc_lengths_[dit->second]);
}

std::vector<RunEntry> InvertedIndex::search(const WeightedQuery& query,
                                            std::size_t top_n) const {
    std::unordered_map<std::uint32_t, double> scores;
    for (const auto& [term, weight] : query.terms()) {
        auto pit = postings_.find(term);
        if (pit == postings_.end()) continue;
        const double qi = qtf_factor(weight) * idf(pit->second.size());
        for (const auto& p : pit->second)
            scores[p.doc] += qi * tf_saturation(p.tf, doc_lengths_[p.doc]);
    }

    std::vector<std::pair<std::uint32_t, double>> hits;
    hits.reserve(scores.size());
    for (const auto& [doc, score] : scores)
        if (score != 0.0) hits.emplace_back(doc, score);

    auto better = [this](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return doc_ids_[a.first] < doc_ids_[b.first];
    };
    if (hits.size() > top_n) {
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(top_n),
                          hits.end(), better);
        hits.resize(top_n);
    } else {
        std::sort(hits.begin(), hits.end(), better);
    }

    std::vector<RunEntry> out;
    out.reserve(hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i)
        out.push_back({doc_ids_[hits[i].first], hits[i].second,
                       static_cast<std::uint32_t>(i + 1)});
    return out;
}

void InvertedIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path, "cannot open index file for writing");
    out.write(kMagic, sizeof(kMagic) - 1);

    put_f64(out, params_.k1);
    put_f64(out, params_.b);
    put_f64(out, params_.k3);
    out.put(params_.clamp_negative_idf ? 1 : 0);
    out.put(static_cast<char>(params_.query_weighting));

    out.put(config_.lowercase ? 1 : 0);
    out.put(static_cast<char>(config_.stemmer));
    put_u32(out, static_cast<std::uint32_t>(config_.stopwords.size()));
    for (const auto& w : config_.stopwords) put_str(out, w);

    put_u64(out, doc_ids_.size());
    put_f64(out, avgdl_);
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        put_str(out, doc_ids_[i]);
        put_u32(out, doc_lengths_[i]);
    }

    put_u64(out, postings_.size());
    // Deterministic term order on disk.
    std::vector<const std::string*> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, plist] : postings_) terms.push_back(&term);
    std::sort(terms.begin(), terms.end(), [](auto* a, auto* b) { return *a < *b; });
    for (const auto* term : terms) {
        const auto& plist = postings_.at(*term);
        put_str(out, *term);
        put_u64(out, plist.size());
        for (const auto& p : plist) {
            put_u32(out, p.doc);
            put_u32(out, p.tf);
        }
    }
    if (!out) throw ParseError(path, "failed writing index file");
}

InvertedIndex InvertedIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open index file");
    char magic[sizeof(kMagic) - 1];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw ParseError(path, "not an index file (bad magic)");

    InvertedIndex idx;
    idx.params_.k1 = get_f64(in);
    idx.params_.b = get_f64(in);
    idx.params_.k3 = get_f64(in);
    idx.params_.clamp_negative_idf = in.get() != 0;
    idx.params_.query_weighting = static_cast<BM25Params::QueryWeighting>(in.get());

    idx.config_.lowercase = in.get() != 0;
    idx.config_.stemmer = static_cast<StemKind>(in.get());
    const std::uint32_t n_stop = get_u32(in);
    for (std::uint32_t i = 0; i < n_stop; ++i) idx.config_.stopwords.insert(get_str(in));

    const std::uint64_t n_docs = get_u64(in);
    idx.avgdl_ = get_f64(in);
    idx.doc_ids_.reserve(n_docs);
    idx.doc_lengths_.reserve(n_docs);
    for (std::uint64_t i = 0; i < n_docs; ++i) {
        std::string id = get_str(in);
        idx.doc_index_.emplace(id, static_cast<std::uint32_t>(i));
        idx.doc_ids_.push_back(std::move(id));
        idx.doc_lengths_.push_back(get_u32(in));
    }

    const std::uint64_t n_terms = get_u64(in);
    for (std::uint64_t i = 0; i < n_terms; ++i) {
        std::string term = get_str(in);
        const std::uint64_t n_post = get_u64(in);
        auto& plist = idx.postings_[std::move(term)];
        plist.reserve(n_post);
        for (std::uint64_t j = 0; j < n_post; ++j) {
            const std::uint32_t doc = get_u32(in);
            const std::uint32_t tf = get_u32(in);
            plist.push_back({doc, tf});
        }
    }
    if (!in) throw ParseError(path, "truncated index file");
    return idx;
}

void write_run(std::ostream& out, const RankedRun& run, const std::string& tag) {
    char score[32];
    for (const auto& [qid, entries] : run.queries) {
        for (const auto& e : entries) {
            std::snprintf(score, sizeof(score), "%.4f", e.score);
            out << qid << " Q0 " << e.doc_id << ' ' << e.rank << ' ' << score << ' '
                << tag << '\n';
        }
    }
}

RankedRun read_run(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open run file");

    RankedRun run;
    std::unordered_map<std::string, std::size_t> qpos;
    std::unordered_set<std::string> seen;  // qid \x1f docid
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string qid, q0, docid, rank_s, score_s, tag;
        if (!(ss >> qid >> q0 >> docid >> rank_s >> score_s >> tag))
            throw ParseError(path, lineno, "expected 6 columns `qid Q0 docid rank score tag`");
        double score = 0.0;
        std::uint32_t rank = 0;
        try {
            score = std::stod(score_s);
            rank = static_cast<std::uint32_t>(std::stoul(rank_s));
        } catch (const std::exception&) {
            throw ParseError(path, lineno, "malformed rank or score");
        }
        if (!seen.insert(qid + '\x1f' + docid).second)
            throw ParseError(path, lineno,
                             "duplicate document '" + docid + "' for query '" + qid + "'");
        auto it = qpos.find(qid);
        if (it == qpos.end()) {
            it = qpos.emplace(qid, run.queries.size()).first;
            run.queries.emplace_back(qid, std::vector<RunEntry>{});
        }
        run.queries[it->second].second.push_back({docid, score, rank});
    }
    return run;
}

}  // namespace expandir
