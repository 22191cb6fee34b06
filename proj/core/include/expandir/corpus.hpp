// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "expandir/query.hpp"

namespace expandir {

enum class StemKind { none, french_snowball };

// Text preprocessing applied wherever text meets the system (documents,
// topics, query projection, embedding lookups). Deterministic: the same
// config and text always produce the same token sequence.
//
// Token boundary rule: tokens are maximal runs of Unicode alphanumerics;
// apostrophes are kept inside tokens ("narin's" stays one token) and '#'/'@'
// are kept as token prefixes, since hashtags and mentions carry meaning in
// microblogs. Stopwords are removed after lowercasing; stemming runs last.
struct PreprocessConfig {
    std::set<std::string> stopwords;
    StemKind stemmer = StemKind::none;
    bool lowercase = true;
};

struct Document {
    std::string id;    // unique, non-empty
    std::string text;  // may be empty (indexes to zero tokens)
    std::map<std::string, std::string> meta;
};

struct Topic {
    std::string id;
    std::string title;
    std::string festival;   // optional
    std::string begindate;  // optional
    std::string enddate;    // optional
};

// Which training-corpus variant an embedding space came from: `preprocessed`
// distinguishes a stopped+stemmed training corpus from a raw one.
struct CorpusVariant {
    std::string name;
    bool preprocessed = false;
};

enum class DocFormat { jsonl, tsv };

std::vector<std::string> tokenize(std::string_view text, const PreprocessConfig& config);

// One term per line, UTF-8; blank lines ignored; entries are lowercased.
std::set<std::string> load_stopwords(const std::string& path);

// JSONL records need "id" and "text"; extra fields land in meta. TSV is
// two-column `id \t text` (the first tab splits). Malformed records and
// duplicate ids raise ParseError with the offending line.
std::vector<Document> load_documents(const std::string& path, DocFormat format);

// Topic markup: <topic> elements with <id>, <title> and optional <festival>,
// <begindate>, <enddate> children. Missing id/title raises ParseError naming
// the topic index.
std::vector<Topic> load_topics(const std::string& path);
std::vector<Topic> parse_topics(std::string_view content, const std::string& origin);

// Query terms come from the tokenized title, each with weight 1.0; duplicate
// tokens merge by summing. With include_festival, the festival name tokens
// are appended the same way. Empty result raises std::runtime_error.
WeightedQuery topic_to_query(const Topic& topic, const PreprocessConfig& config,
                             bool include_festival = false);

// Re-tokenizes every term of a query under `config`, merging weights of
// terms that collapse to the same form and dropping terms that vanish.
// This is how a query built with one preprocessing regime is aligned with an
// index or embedding space built with another.
WeightedQuery project_query(const WeightedQuery& query, const PreprocessConfig& config);

}  // namespace expandir
