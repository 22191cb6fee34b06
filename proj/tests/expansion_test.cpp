// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#include "expandir/expansion.hpp"

#include <cmath>
#include <filesystem>
#include <random>

#include <fstream>

#include <doctest.h>

#include "expandir/errors.hpp"

using namespace expandir;
namespace fs = std::filesystem;

namespace {

using Rows = std::vector<std::pair<std::string, std::vector<float>>>;

EmbeddingSpace space_from_rows(const Rows& rows, std::size_t dim) {
    const auto path =
        (fs::temp_directory_path() / "expandir_test_expansion.vec").string();
    write_vectors_text(path, rows, dim);
    auto space = EmbeddingSpace::load(path, VectorFormat::text);
    fs::remove(path);
    return space;
}

WeightedQuery query(std::initializer_list<std::pair<std::string, double>> terms) {
    WeightedQuery q;
    for (const auto& [t, w] : terms) q.add(t, w);
    return q;
}

ExpansionConfig config(ExpansionMode mode, std::size_t k, double alpha) {
    ExpansionConfig cfg;
    cfg.mode = mode;
    cfg.k = k;
    cfg.alpha = alpha;
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("expansion");

TEST_CASE("expand_local worked examples") {
    SUBCASE("all query terms OOV") {
        const auto space = space_from_rows({{"x", {1, 0}}, {"y", {0, 1}}}, 2);
        const auto e = expand_local(query({{"zz", 1.0}}), space,
                                    config(ExpansionMode::local, 3, 0.5));
        CHECK(e.pairs.empty());
    }
    SUBCASE("single anchor, nearest neighbor weighted by alpha*sim") {
        const auto space =
            space_from_rows({{"a", {1, 0}}, {"b", {0.9f, 0.1f}}, {"c", {0, 1}}}, 2);
        const auto e = expand_local(query({{"a", 1.0}}), space,
                                    config(ExpansionMode::local, 1, 0.5));
        REQUIRE(e.pairs.size() == 1);
        CHECK(e.pairs[0].first == "b");
        // 0.5 * cosine over the float32-parsed vectors, derived brute-force.
        CHECK(e.pairs[0].second == doctest::Approx(0.496941867085962).epsilon(1e-12));
    }
    SUBCASE("shared neighbor accumulates additively") {
        // x sits between a and b and is the 1-NN of both.
        const auto space = space_from_rows(
            {{"a", {1, 0}}, {"b", {0, 1}}, {"x", {0.7f, 0.7f}}, {"far", {-1, -1}}}, 2);
        const auto e = expand_local(query({{"a", 1.0}, {"b", 1.0}}), space,
                                    config(ExpansionMode::local, 1, 0.3));
        REQUIRE(e.pairs.size() == 1);
        CHECK(e.pairs[0].first == "x");
        const double s1 = cosine(space.vector_of("a"), space.vector_of("x"));
        const double s2 = cosine(space.vector_of("b"), space.vector_of("x"));
        CHECK(e.pairs[0].second == doctest::Approx(0.3 * s1 + 0.3 * s2).epsilon(1e-12));
    }
}

TEST_CASE("expand_global worked examples") {
    SUBCASE("centroid neighbor with alpha weight") {
        const auto space = space_from_rows(
            {{"a", {1, 0}}, {"b", {0, 1}}, {"c", {1, 1}}, {"d", {-1, 0}}}, 2);
        const auto e = expand_global(query({{"a", 1.0}, {"b", 1.0}}), space,
                                     config(ExpansionMode::global, 1, 0.4));
        REQUIRE(e.pairs.size() == 1);
        CHECK(e.pairs[0].first == "c");
        CHECK(e.pairs[0].second == doctest::Approx(0.4).epsilon(1e-12));
    }
    SUBCASE("all terms OOV yields empty") {
        const auto space = space_from_rows({{"a", {1, 0}}}, 2);
        const auto e = expand_global(query({{"zz", 1.0}}), space,
                                     config(ExpansionMode::global, 2, 0.4));
        CHECK(e.pairs.empty());
    }
    SUBCASE("opposite vectors cancel to a zero centroid") {
        const auto space = space_from_rows({{"a", {1, 0}}, {"b", {-1, 0}}, {"c", {0, 1}}}, 2);
        const auto e = expand_global(query({{"a", 1.0}, {"b", 1.0}}), space,
                                     config(ExpansionMode::global, 1, 0.4));
        CHECK(e.pairs.empty());
    }
}

TEST_CASE("fuse_query") {
    const auto q = query({{"a", 1.0}});
    SUBCASE("empty expansion is the identity") {
        const auto fused = fuse_query(q, Expansion{});
        REQUIRE(fused.size() == 1);
        CHECK(fused.weight_of("a") == 1.0);
    }
    SUBCASE("disjoint terms append") {
        Expansion e{{{"b", 0.3}}, ExpansionMode::local, 1, 0.3};
        const auto fused = fuse_query(q, e);
        REQUIRE(fused.size() == 2);
        CHECK(fused.weight_of("a") == 1.0);
        CHECK(fused.weight_of("b") == 0.3);
        CHECK(fused.terms()[0].first == "a");  // query terms come first
    }
    SUBCASE("shared terms reinforce by summing") {
        Expansion e{{{"a", 0.3}}, ExpansionMode::local, 1, 0.3};
        const auto fused = fuse_query(q, e);
        REQUIRE(fused.size() == 1);
        CHECK(fused.weight_of("a") == doctest::Approx(1.3));
    }
    SUBCASE("non-positive weights are floored") {
        Expansion e{{{"b", -0.2}}, ExpansionMode::local, 1, 0.3};
        const auto fused = fuse_query(q, e);
        CHECK(fused.weight_of("b") == 1e-9);
    }
}

TEST_CASE("expand_and_fuse") {
    // Components exactly representable in float32 so the frozen expected
    // values are reproducible bit for bit.
    const auto space = space_from_rows(
        {{"rock", {1.0f, 0.125f, 0.0f}},
         {"metal", {0.875f, 0.25f, 0.125f}},
         {"jazz", {0.125f, 1.0f, 0.25f}},
         {"blues", {0.25f, 0.875f, 0.125f}}},
        3);

    SUBCASE("alpha = 0 leaves the query unchanged") {
        const auto q = query({{"rock", 1.0}});
        const auto fused = expand_and_fuse(q, space, config(ExpansionMode::local, 3, 0.0));
        CHECK(fused.size() == 1);
        CHECK(fused.weight_of("rock") == 1.0);
    }
    SUBCASE("k = 0 leaves the query unchanged") {
        const auto q = query({{"rock", 1.0}});
        CHECK(expand_and_fuse(q, space, config(ExpansionMode::local, 0, 0.3)).size() == 1);
    }
    SUBCASE("OOV-only query passes through") {
        const auto q = query({{"polka", 1.0}});
        const auto fused = expand_and_fuse(q, space, config(ExpansionMode::local, 2, 0.3));
        CHECK(fused.size() == 1);
        CHECK(fused.weight_of("polka") == 1.0);
    }
    SUBCASE("worked two-anchor golden (local, k=2, alpha=0.3)") {
        // Values derived by brute-force cosine ranking plus fusion
        // arithmetic over this exact space.
        const auto q = query({{"rock", 1.0}, {"jazz", 1.0}});
        const auto fused = expand_and_fuse(q, space, config(ExpansionMode::local, 2, 0.3));
        REQUIRE(fused.size() == 4);
        CHECK(fused.weight_of("rock") == 1.0);
        CHECK(fused.weight_of("jazz") == 1.0);
        CHECK(fused.weight_of("metal") ==
              doctest::Approx(0.416562713250011).epsilon(1e-10));
        CHECK(fused.weight_of("blues") ==
              doctest::Approx(0.411348939524416).epsilon(1e-10));
    }
}

TEST_CASE("expansion respects the space's lookup preprocessing") {
    // A "preprocessed" space holds stemmed vocabulary; raw query terms must
    // be stemmed before lookup.
    const auto rows = Rows{{"chanteux", {1.0f, 0.0f}}, {"concert", {0.9f, 0.2f}}};
    auto space = space_from_rows(rows, 2);
    space.lookup_config.stemmer = StemKind::french_snowball;

    const auto e = expand_local(query({{"chanteuses", 1.0}}), space,
                                config(ExpansionMode::local, 1, 0.5));
    REQUIRE(e.pairs.size() == 1);
    CHECK(e.pairs[0].first == "concert");
}

TEST_CASE("expansion algebra on random toy spaces") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t vocab = 5 + rng() % 30;
        const std::size_t dim = 2 + rng() % 8;
        Rows rows;
        for (std::size_t i = 0; i < vocab; ++i) {
            std::vector<float> v(dim);
            for (auto& x : v) x = dist(rng);
            v[0] += 1.5f;  // keep norms away from zero
            rows.emplace_back("w" + std::to_string(i), v);
        }
        const auto space = space_from_rows(rows, dim);

        WeightedQuery q;
        const std::size_t nq = 1 + rng() % 3;
        for (std::size_t i = 0; i < nq; ++i) q.add(rows[rng() % vocab].first, 1.0);
        const std::size_t k = 1 + rng() % 5;
        const double alpha = 0.1 * (1 + rng() % 9);
        const auto mode = (trial % 2 == 0) ? ExpansionMode::local : ExpansionMode::global;
        const auto cfg = config(mode, k, alpha);

        const auto fused = expand_and_fuse(q, space, cfg);

        // Cardinality bound: |Q| + k|Q| (local), |Q| + k (global).
        const std::size_t bound =
            q.size() + (mode == ExpansionMode::local ? k * q.size() : k);
        CHECK(fused.size() <= bound);

        // Weight monotonicity.
        for (const auto& [term, w] : q.terms()) CHECK(fused.weight_of(term) >= w);

        // Alpha linearity: term sets unchanged, expansion weights scale.
        const double factor = 2.5;
        auto cfg2 = cfg;
        cfg2.alpha = alpha * factor;
        const auto fused2 = expand_and_fuse(q, space, cfg2);
        REQUIRE(fused2.size() == fused.size());
        for (const auto& [term, w] : fused.terms()) {
            const double w2 = fused2.weight_of(term);
            if (q.contains(term)) {
                const double extra = w - q.weight_of(term);
                CHECK(w2 == doctest::Approx(q.weight_of(term) + factor * extra).epsilon(1e-9));
            } else {
                CHECK(w2 == doctest::Approx(factor * w).epsilon(1e-9));
            }
        }

        // Determinism.
        const auto again = expand_and_fuse(q, space, cfg);
        REQUIRE(again.size() == fused.size());
        for (std::size_t i = 0; i < fused.size(); ++i) {
            CHECK(again.terms()[i].first == fused.terms()[i].first);
            CHECK(again.terms()[i].second == fused.terms()[i].second);
        }
    }
}

TEST_CASE("mono-term local and global select the same terms") {
    std::mt19937 rng(31337);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t vocab = 4 + rng() % 40;
        const std::size_t dim = 2 + rng() % 6;
        Rows rows;
        for (std::size_t i = 0; i < vocab; ++i) {
            std::vector<float> v(dim);
            for (auto& x : v) x = dist(rng);
            v[dim - 1] += 1.25f;
            rows.emplace_back("w" + std::to_string(i), v);
        }
        const auto space = space_from_rows(rows, dim);
        const auto q = query({{rows[rng() % vocab].first, 1.0}});
        const std::size_t k = 1 + rng() % 5;

        // Same exclusion set on both paths: the anchor term itself.
        const auto local = expand_local(q, space, config(ExpansionMode::local, k, 0.3));
        const auto global = expand_global(q, space, config(ExpansionMode::global, k, 0.3));
        REQUIRE(local.pairs.size() == global.pairs.size());
        for (std::size_t i = 0; i < local.pairs.size(); ++i) {
            CHECK(local.pairs[i].first == global.pairs[i].first);
            CHECK(local.pairs[i].second ==
                  doctest::Approx(global.pairs[i].second).epsilon(1e-9));
        }
    }
}

TEST_CASE("query JSONL serialization") {
    const auto q = query({{"rock", 1.0}, {"metal", 0.25}});
    CHECK(query_to_jsonl("7", q) == R"({"qid":"7","terms":[["rock",1.0],["metal",0.25]]})");
}

TEST_CASE("query JSONL round trip and errors") {
    const auto path = (fs::temp_directory_path() / "expandir_test_queries.jsonl").string();
    {
        std::ofstream f(path);
        f << query_to_jsonl("1", query({{"rock", 1.0}, {"metal", 0.25}})) << '\n';
        f << query_to_jsonl("2", query({{"jazz", 2.0}})) << '\n';
    }
    const auto loaded = load_queries_jsonl(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].first == "1");
    CHECK(loaded[0].second.weight_of("metal") == 0.25);
    CHECK(loaded[1].second.weight_of("jazz") == 2.0);

    {
        std::ofstream f(path);
        f << R"({"qid":"1","terms":[["rock",0.0]]})" << '\n';
    }
    CHECK_THROWS_AS(load_queries_jsonl(path), expandir::ParseError);
    {
        std::ofstream f(path);
        f << R"({"qid":"1","terms":[["a",1.0]]})" << '\n'
          << R"({"qid":"1","terms":[["b",1.0]]})" << '\n';
    }
    CHECK_THROWS_AS(load_queries_jsonl(path), expandir::ParseError);
    fs::remove(path);
}

TEST_SUITE_END();
