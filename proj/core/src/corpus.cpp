// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#include "expandir/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "expandir/errors.hpp"
#include "expandir/french_stemmer.hpp"
#include "expandir/unicode.hpp"

namespace expandir {

namespace {

constexpr char32_t kApostrophe = 0x27;
constexpr char32_t kRightQuote = 0x2019;

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// The five standard XML entities; topic files occasionally carry them.
std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '&') {
            if (s.compare(i, 5, "&amp;") == 0) { out += '&'; i += 5; continue; }
            if (s.compare(i, 4, "&lt;") == 0) { out += '<'; i += 4; continue; }
            if (s.compare(i, 4, "&gt;") == 0) { out += '>'; i += 4; continue; }
            if (s.compare(i, 6, "&quot;") == 0) { out += '"'; i += 6; continue; }
            if (s.compare(i, 6, "&apos;") == 0) { out += '\''; i += 6; continue; }
        }
        out += s[i++];
    }
    return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const PreprocessConfig& config) {
    const std::u32string cps = uni::decode_utf8(text);
    std::vector<std::string> out;
    std::u32string cur;

    auto norm = [&](char32_t c) { return config.lowercase ? uni::to_lower(c) : c; };
    auto flush = [&] {
        if (cur.empty()) return;
        std::string tok = uni::encode_utf8(cur);
        cur.clear();
        if (config.stopwords.count(tok) > 0) return;
        if (config.stemmer == StemKind::french_snowball) tok = stem_french(tok);
        out.push_back(std::move(tok));
    };

    const std::size_t n = cps.size();
    for (std::size_t i = 0; i < n; ++i) {
        const char32_t c = norm(cps[i]);
        if (uni::is_token_char(c)) {
            cur.push_back(c);
            continue;
        }
        if ((c == kApostrophe || c == kRightQuote) && !cur.empty() && i + 1 < n &&
            uni::is_token_char(norm(cps[i + 1]))) {
            cur.push_back(kApostrophe);
            continue;
        }
        if (c == U'#' || c == U'@') {
            flush();
            if (i + 1 < n && uni::is_token_char(norm(cps[i + 1]))) cur.push_back(c);
            continue;
        }
        flush();
    }
    flush();
    return out;
}

std::set<std::string> load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open stopword file");
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        std::string w = trim(line);
        if (w.empty()) continue;
        std::u32string cps = uni::decode_utf8(w);
        for (auto& c : cps) c = uni::to_lower(c);
        words.insert(uni::encode_utf8(cps));
    }
    return words;
}

std::vector<Document> load_documents(const std::string& path, DocFormat format) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open document file");

    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        Document doc;
        if (format == DocFormat::jsonl) {
            nlohmann::json rec;
            try {
                rec = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(path, lineno, std::string("malformed JSON record: ") + e.what());
            }
            if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string())
                throw ParseError(path, lineno, "record has no string \"id\" field");
            if (!rec.contains("text") || !rec["text"].is_string())
                throw ParseError(path, lineno, "record has no string \"text\" field");
            doc.id = rec["id"].get<std::string>();
            doc.text = rec["text"].get<std::string>();
            for (const auto& [key, value] : rec.items()) {
                if (key == "id" || key == "text") continue;
                doc.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
            }
        } else {
            const auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw ParseError(path, lineno, "expected `id<TAB>text`");
            doc.id = line.substr(0, tab);
            doc.text = line.substr(tab + 1);
        }
        if (doc.id.empty()) throw ParseError(path, lineno, "empty document id");
        if (!seen.insert(doc.id).second)
            throw ParseError(path, lineno, "duplicate document id '" + doc.id + "'");
        docs.push_back(std::move(doc));
    }
    return docs;
}

std::vector<Topic> parse_topics(std::string_view content, const std::string& origin) {
    std::vector<Topic> topics;

    auto field = [](std::string_view block, std::string_view tag) -> std::string {
        const std::string open = "<" + std::string(tag) + ">";
        const std::string close = "</" + std::string(tag) + ">";
        const auto b = block.find(open);
        if (b == std::string_view::npos) return {};
        const auto start = b + open.size();
        const auto e = block.find(close, start);
        if (e == std::string_view::npos) return {};
        return trim(decode_entities(block.substr(start, e - start)));
    };

    std::size_t pos = 0;
    std::size_t index = 0;
    while (true) {
        const auto b = content.find("<topic>", pos);
        if (b == std::string_view::npos) break;
        const auto e = content.find("</topic>", b);
        if (e == std::string_view::npos)
            throw ParseError(origin, "unterminated <topic> element");
        const auto block = content.substr(b, e - b);
        pos = e + 8;
        ++index;

        Topic t;
        t.id = field(block, "id");
        t.title = field(block, "title");
        t.festival = field(block, "festival");
        t.begindate = field(block, "begindate");
        t.enddate = field(block, "enddate");
        if (t.id.empty())
            throw ParseError(origin, "topic " + std::to_string(index) + " missing id");
        if (t.title.empty())
            throw ParseError(origin, "topic " + std::to_string(index) + " missing title");
        topics.push_back(std::move(t));
    }
    return topics;
}

std::vector<Topic> load_topics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open topic file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_topics(buf.str(), path);
}

WeightedQuery topic_to_query(const Topic& topic, const PreprocessConfig& config,
                             bool include_festival) {
    WeightedQuery q;
    for (const auto& tok : tokenize(topic.title, config)) q.add(tok, 1.0);
    if (include_festival && !topic.festival.empty()) {
        for (const auto& tok : tokenize(topic.festival, config)) q.add(tok, 1.0);
    }
    if (q.empty()) {
        throw std::runtime_error("topic '" + topic.id +
                                 "': query is empty after preprocessing");
    }
    return q;
}

WeightedQuery project_query(const WeightedQuery& query, const PreprocessConfig& config) {
    WeightedQuery out;
    for (const auto& [term, weight] : query.terms()) {
        for (const auto& tok : tokenize(term, config)) out.add(tok, weight);
    }
    return out;
}

}  // namespace expandir
