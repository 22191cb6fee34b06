// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#include "expandir/stats.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <doctest.h>

using namespace expandir;

namespace {

std::vector<double> split_values(const std::string& s) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ';')) out.push_back(std::stod(part));
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("stats");

TEST_CASE("incomplete beta against reference values") {
    // Golden values from an independent statistics library.
    std::ifstream in(std::string(EXPANDIR_TEST_DATA_DIR) + "/ibeta_goldens.csv");
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    std::size_t checked = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double a, b, x, expected;
        char c;
        ss >> a >> c >> b >> c >> x >> c >> expected;
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(x);
        CHECK(std::fabs(regularized_incomplete_beta(a, b, x) - expected) <= 1e-10);
        ++checked;
    }
    CHECK(checked >= 100);
}

TEST_CASE("incomplete beta edge cases") {
    CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("paired t-test degenerate conventions") {
    const std::vector<double> a = {0.25, 0.5, 0.75};
    SUBCASE("identical samples") {
        const auto r = paired_ttest(a, a);
        CHECK(r.t == 0.0);
        CHECK(r.p == 1.0);
    }
    SUBCASE("constant nonzero difference") {
        // Offsets chosen exactly representable so the differences are
        // bitwise constant and the variance is exactly zero.
        const std::vector<double> b = {0.5, 0.75, 1.0};
        const auto r = paired_ttest(a, b);
        CHECK(std::isinf(r.t));
        CHECK(r.p == 0.0);
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(paired_ttest(std::vector<double>{1.0}, std::vector<double>{2.0}),
                        std::invalid_argument);
        CHECK_THROWS_AS(paired_ttest(a, std::vector<double>{1.0, 2.0}),
                        std::invalid_argument);
    }
}

TEST_CASE("paired t-test matches the reference implementation") {
    std::ifstream in(std::string(EXPANDIR_TEST_DATA_DIR) + "/ttest_goldens.csv");
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    std::size_t checked = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a_s, b_s, t_s, p_s;
        std::getline(ss, a_s, ',');
        std::getline(ss, b_s, ',');
        std::getline(ss, t_s, ',');
        std::getline(ss, p_s, ',');
        const auto a = split_values(a_s);
        const auto b = split_values(b_s);
        const auto r = paired_ttest(a, b);
        CAPTURE(checked);
        CHECK(std::fabs(r.t - std::stod(t_s)) <= 1e-6 * std::max(1.0, std::fabs(r.t)));
        CHECK(std::fabs(r.p - std::stod(p_s)) <= 1e-6);
        ++checked;
    }
    CHECK(checked == 20);
}

TEST_CASE("antisymmetry") {
    const std::vector<double> a = {0.2, 0.4, 0.6, 0.8};
    const std::vector<double> b = {0.1, 0.3, 0.5, 0.9};
    const auto ab = paired_ttest(a, b);
    const auto ba = paired_ttest(b, a);
    CHECK(ab.t == doctest::Approx(-ba.t));
    CHECK(ab.p == doctest::Approx(ba.p));
    // The fixed example from the golden file: t = 1, p ~ 0.391.
    CHECK(ab.t == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ab.p == doctest::Approx(0.391002218956).epsilon(1e-9));
}

TEST_SUITE_END();
