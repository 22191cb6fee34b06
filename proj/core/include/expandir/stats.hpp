// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#pragma once

#include <span>

namespace expandir {

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation, accurate to ~1e-14 over sane inputs.
double regularized_incomplete_beta(double a, double b, double x);

struct TTestResult {
    double t;
    double p;  // two-sided
};

// Paired two-sided Student t-test over per-query values matched by position.
// Requires equal lengths >= 2. Zero variance of the differences degenerates
// to p = 1 when the means are equal, p = 0 otherwise.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

// Two-sided tail probability of Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

}  // namespace expandir
