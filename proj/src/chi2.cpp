#include "delfi/chi2.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace delfi {

namespace {

constexpr int kMaxTerms = 500;
constexpr double kEps = 1e-15;

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < kMaxTerms; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x); valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxTerms; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0)) throw InvalidConfig("gamma_p needs a > 0");
    if (x < 0.0) throw InvalidConfig("gamma_p needs x >= 0");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double chi2_cdf(double x, int df) {
    if (df < 1) throw InvalidConfig("chi-squared df must be >= 1");
    if (x < 0.0) throw InvalidConfig("chi-squared cdf argument must be >= 0");
    return gamma_p(0.5 * df, 0.5 * x);
}

double chi2_quantile(double p, int df) {
    if (df < 1) throw InvalidConfig("chi-squared df must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw InvalidConfig("quantile level must be in (0, 1)");
    double lo = 0.0;
    double hi = static_cast<double>(df) + 10.0;
    while (chi2_cdf(hi, df) < p) {
        hi *= 2.0;
        if (hi > 1e300) throw InvalidConfig("quantile bracket failed");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_cdf(mid, df) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

const char* method_name(ElTestReport::Method m) {
    switch (m) {
        case ElTestReport::Method::EL: return "EL";
        case ElTestReport::Method::DEL: return "DEL";
        case ElTestReport::Method::DEL_S: return "DEL_S";
    }
    return "?";
}

ElTestReport decide(double statistic, int df, double alpha) {
    if (!std::isfinite(statistic)) throw InvalidConfig("test statistic must be finite");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidConfig("alpha must be in (0, 1)");
    ElTestReport report;
    report.statistic = statistic;
    report.df = df;
    report.alpha = alpha;
    // negative statistics can appear from float cancellation at lambda ~ 0
    const double x = std::max(statistic, 0.0);
    report.p_value = 1.0 - chi2_cdf(x, df);
    report.reject = x > chi2_quantile(1.0 - alpha, df);
    return report;
}

}  // namespace delfi
