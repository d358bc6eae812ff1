#pragma once

#include <string>

#include "delfi/errors.hpp"

namespace delfi {

// Regularized lower incomplete gamma P(a, x): series for x < a + 1, continued
// fraction otherwise.
double gamma_p(double a, double x);

// P(chi2_df <= x)
double chi2_cdf(double x, int df);

// x with chi2_cdf(x, df) = p, bracketed root-find, |error| <= ~1e-11.
double chi2_quantile(double p, int df);

struct ElTestReport {
    enum class Method { EL, DEL, DEL_S };
    Method method = Method::DEL;
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    double alpha = 0.05;
    bool reject = false;
    int rounds_run = 0;
    int selected_count = 0;
};

const char* method_name(ElTestReport::Method m);

// reject iff statistic > upper-alpha quantile; p = 1 - cdf(statistic).
ElTestReport decide(double statistic, int df, double alpha);

}  // namespace delfi
