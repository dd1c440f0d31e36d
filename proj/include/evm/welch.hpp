#pragma once

#include <cmath>

#include "evm/common.hpp"

namespace evm {

namespace detail {

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_cont_frac(double a, double b, double x) {
    constexpr int max_iter = 500;
    constexpr double eps = 1e-15;
    constexpr double fpmin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b), relative error around 1e-14.
inline double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw Error("incomplete_beta needs positive parameters");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(log_front) * detail::beta_cont_frac(a, b, x) / a;
    return 1.0 - std::exp(log_front) * detail::beta_cont_frac(b, a, 1.0 - x) / b;
}

// P(|T| >= |t|) for Student's t with df degrees of freedom.
inline double student_t_two_sided(double t, double df) {
    if (df <= 0.0) throw Error("degrees of freedom must be positive");
    if (t == 0.0) return 1.0;
    double x = df / (df + t * t);
    return incomplete_beta(0.5 * df, 0.5, x);
}

// Welch's unequal-variance t-test, two-sided. Sample sizes may be fractional
// (effective sizes from soft assignments) but must exceed 1. Zero-variance
// pairs degenerate to p = 1 when the means agree and p = 0 when they do not.
inline double welch_p_value(double mean1, double var1, double n1, double mean2, double var2,
                            double n2) {
    if (n1 <= 1.0 || n2 <= 1.0) throw Error("welch_p_value needs more than one sample per side");
    if (var1 < 0.0 || var2 < 0.0) throw Error("variance must be nonnegative");
    double se1 = var1 / n1, se2 = var2 / n2;
    double denom = se1 + se2;
    if (denom == 0.0) return mean1 == mean2 ? 1.0 : 0.0;
    double t = (mean1 - mean2) / std::sqrt(denom);
    double df = denom * denom / (se1 * se1 / (n1 - 1.0) + se2 * se2 / (n2 - 1.0));
    return student_t_two_sided(t, df);
}

}  // namespace evm
