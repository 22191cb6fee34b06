// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#include "expandir/eval.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "eval_cases.hpp"
#include "expandir/errors.hpp"

using namespace expandir;
namespace fs = std::filesystem;

namespace {

// qrels row from a relevance pattern over docs r0, r1, ...
std::unordered_map<std::string, bool> row_from_pattern(const std::vector<int>& pattern) {
    std::unordered_map<std::string, bool> row;
    for (std::size_t i = 0; i < pattern.size(); ++i)
        row["r" + std::to_string(i)] = pattern[i] != 0;
    return row;
}

std::vector<std::string> ranked_from_pattern(const std::vector<int>& pattern) {
    std::vector<std::string> ranked;
    for (std::size_t i = 0; i < pattern.size(); ++i) ranked.push_back("r" + std::to_string(i));
    return ranked;
}

}  // namespace

TEST_SUITE_BEGIN("eval");

TEST_CASE("p_at_k") {
    const std::vector<int> pattern = {1, 1, 0, 0, 1};
    CHECK(p_at_k(ranked_from_pattern(pattern), row_from_pattern(pattern), 5) ==
          doctest::Approx(0.6));
    CHECK(p_at_k({}, row_from_pattern({1}), 5) == 0.0);
    CHECK(p_at_k(ranked_from_pattern({1, 1, 1}), row_from_pattern({1, 1, 1}), 3) == 1.0);
    // Short lists pad with non-relevant.
    CHECK(p_at_k(ranked_from_pattern({1}), row_from_pattern({1}), 10) ==
          doctest::Approx(0.1));
}

TEST_CASE("average_precision") {
    SUBCASE("relevant at ranks 1 and 3") {
        const std::vector<int> pattern = {1, 0, 1};
        CHECK(average_precision(ranked_from_pattern(pattern), row_from_pattern(pattern)) ==
              doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-5));
    }
    SUBCASE("no relevant retrieved") {
        auto row = row_from_pattern({0, 0});
        row["other"] = true;  // one relevant exists but is not retrieved
        CHECK(average_precision(ranked_from_pattern({0, 0}), row) == 0.0);
    }
    SUBCASE("single relevant at rank 1") {
        CHECK(average_precision(ranked_from_pattern({1}), row_from_pattern({1})) == 1.0);
    }
    SUBCASE("normalized by judged-relevant count, not retrieved count") {
        auto row = row_from_pattern({1});
        row["missing"] = true;  // n+ = 2, only one retrieved
        CHECK(average_precision(ranked_from_pattern({1}), row) == doctest::Approx(0.5));
    }
}

TEST_CASE("reciprocal rank") {
    CHECK(reciprocal_rank(ranked_from_pattern({0, 1}), row_from_pattern({0, 1})) ==
          doctest::Approx(0.5));
    CHECK(reciprocal_rank(ranked_from_pattern({0, 0}), row_from_pattern({0, 0})) == 0.0);
}

TEST_CASE("evaluate") {
    SUBCASE("perfect run") {
        Qrels qrels;
        RankedRun run;
        for (const auto* qid : {"q1", "q2"}) {
            std::vector<RunEntry> entries;
            for (int i = 0; i < 40; ++i) {
                const std::string doc = "d" + std::to_string(i);
                qrels.set(qid, doc, true);
                entries.push_back({doc, 100.0 - i, static_cast<std::uint32_t>(i + 1)});
            }
            run.add(qid, std::move(entries));
        }
        const auto report = evaluate(run, qrels);
        CHECK(report.query_count == 2);
        CHECK(report.mean.ap == doctest::Approx(1.0));
        CHECK(report.mean.rr == doctest::Approx(1.0));
        CHECK(report.mean.p5 == doctest::Approx(1.0));
        CHECK(report.mean.p10 == doctest::Approx(1.0));
        CHECK(report.mean.p30 == doctest::Approx(1.0));
    }
    SUBCASE("two queries, mrr example") {
        Qrels qrels;
        qrels.set("q1", "a", true);
        qrels.set("q2", "b", true);
        RankedRun run;
        run.add("q1", {{"a", 2.0, 1}});                                  // rank 1
        run.add("q2", {{"x", 4.0, 1}, {"y", 3.0, 2}, {"z", 2.0, 3}, {"b", 1.0, 4}});  // rank 4
        const auto report = evaluate(run, qrels);
        CHECK(report.mean.rr == doctest::Approx((1.0 + 0.25) / 2.0));
        CHECK(mrr(run, qrels) == doctest::Approx(0.625));
    }
    SUBCASE("empty run yields zeros over evaluated queries") {
        Qrels qrels;
        qrels.set("q1", "a", true);
        qrels.set("q2", "b", true);
        const auto report = evaluate(RankedRun{}, qrels);
        CHECK(report.query_count == 2);
        CHECK(report.mean.ap == 0.0);
        CHECK(report.mean.p5 == 0.0);
    }
    SUBCASE("queries without relevant docs are excluded") {
        Qrels qrels;
        qrels.set("q1", "a", true);
        qrels.set("q2", "b", false);  // judged but nothing relevant
        RankedRun run;
        run.add("q1", {{"a", 1.0, 1}});
        run.add("q2", {{"b", 1.0, 1}});
        const auto report = evaluate(run, qrels);
        CHECK(report.query_count == 1);
        CHECK(report.per_query[0].first == "q1");
        CHECK(report.mean.ap == doctest::Approx(1.0));
    }
    SUBCASE("entries re-sort by score desc, ties by doc id desc") {
        Qrels qrels;
        qrels.set("q1", "dz", true);
        qrels.set("q1", "da", false);
        RankedRun run;
        // Given order da, dz with equal scores; community order puts dz first.
        run.add("q1", {{"da", 1.0, 1}, {"dz", 1.0, 2}});
        const auto report = evaluate(run, qrels);
        CHECK(report.per_query[0].second.rr == doctest::Approx(1.0));
    }
}

TEST_CASE("evaluate agrees with frozen community-tool goldens") {
    std::ifstream in(std::string(EXPANDIR_TEST_DATA_DIR) + "/eval_goldens.csv");
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    std::size_t checked = 0;
    while (std::getline(in, line) && checked < 25) {  // full set runs in acceptance
        std::istringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        const auto case_id = std::stoull(field);
        std::getline(ss, field, ',');
        const auto num_q = std::stoull(field);
        double expected[5];
        for (auto& e : expected) {
            std::getline(ss, field, ',');
            e = std::stod(field);
        }
        const auto c = testcases::build_eval_case(case_id);
        const auto report = evaluate(c.run, c.qrels);
        CAPTURE(case_id);
        REQUIRE(report.query_count == num_q);
        CHECK(report.mean.ap == doctest::Approx(expected[0]).epsilon(1e-4));
        CHECK(report.mean.rr == doctest::Approx(expected[1]).epsilon(1e-4));
        CHECK(report.mean.p5 == doctest::Approx(expected[2]).epsilon(1e-4));
        CHECK(report.mean.p10 == doctest::Approx(expected[3]).epsilon(1e-4));
        CHECK(report.mean.p30 == doctest::Approx(expected[4]).epsilon(1e-4));
        ++checked;
    }
    CHECK(checked == 25);
}

TEST_CASE("metric monotonicity properties") {
    testcases::SplitMix64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 5 + rng.next() % 30;
        std::vector<int> pattern(n);
        for (auto& p : pattern) p = rng.next() % 3 == 0 ? 1 : 0;
        const auto ranked = ranked_from_pattern(pattern);
        auto row = row_from_pattern(pattern);

        // Flipping a top-k judgment 0 -> 1 raises p@k by exactly 1/k.
        const std::size_t k = 1 + rng.next() % std::min<std::size_t>(n, 10);
        const std::size_t flip = rng.next() % k;
        if (!pattern[flip]) {
            const double before = p_at_k(ranked, row, k);
            auto row2 = row;
            row2["r" + std::to_string(flip)] = true;
            const double after = p_at_k(ranked, row2, k);
            CHECK(after - before == doctest::Approx(1.0 / k).epsilon(1e-12));
        }

        // Swapping a relevant doc upward never decreases AP.
        std::vector<std::size_t> rel_positions;
        for (std::size_t i = 0; i < n; ++i)
            if (pattern[i]) rel_positions.push_back(i);
        if (!rel_positions.empty()) {
            const std::size_t pos = rel_positions[rng.next() % rel_positions.size()];
            if (pos > 0 && !pattern[pos - 1]) {
                auto swapped = ranked;
                std::swap(swapped[pos - 1], swapped[pos]);
                CHECK(average_precision(swapped, row) >=
                      average_precision(ranked, row) - 1e-12);
            }
        }

        const double ap = average_precision(ranked, row);
        CHECK(ap >= 0.0);
        CHECK(ap <= 1.0 + 1e-12);
    }
}

TEST_CASE("qrels parsing") {
    const auto path = (fs::temp_directory_path() / "expandir_test_qrels.txt").string();
    {
        std::ofstream f(path);
        f << "1 0 docA 1\n1 0 docB 0\n2 0 docC 2\n";
    }
    const auto qrels = Qrels::load(path);
    CHECK(qrels.is_relevant("1", "docA"));
    CHECK_FALSE(qrels.is_relevant("1", "docB"));
    CHECK(qrels.is_relevant("2", "docC"));  // graded > 0 binarizes to relevant
    CHECK_FALSE(qrels.is_relevant("1", "unjudged"));
    CHECK(qrels.relevant_count("1") == 1);

    {
        std::ofstream f(path);
        f << "1 0 docA\n";
    }
    CHECK_THROWS_AS(Qrels::load(path), ParseError);
    fs::remove(path);
}

TEST_CASE("report output formats") {
    MetricsReport report;
    report.per_query = {{"q1", {0.5, 1.0, 0.2, 0.1, 0.1}}};
    report.mean = {0.5, 1.0, 0.2, 0.1, 0.1};
    report.query_count = 1;

    std::ostringstream csv;
    write_report_csv(csv, report);
    CHECK(csv.str() ==
          "query_id,metric,value\n"
          "q1,map,0.500000\n"
          "q1,mrr,1.000000\n"
          "q1,p5,0.200000\n"
          "q1,p10,0.100000\n"
          "q1,p30,0.100000\n"
          "all,map,0.500000\n"
          "all,mrr,1.000000\n"
          "all,p5,0.200000\n"
          "all,p10,0.100000\n"
          "all,p30,0.100000\n");

    std::ostringstream table;
    write_report_table(table, report, true);
    CHECK(table.str().find("q1") != std::string::npos);
    CHECK(table.str().find("all") != std::string::npos);
    CHECK(table.str().find("queries evaluated: 1") != std::string::npos);
}

TEST_SUITE_END();
