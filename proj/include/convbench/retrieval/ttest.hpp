#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "convbench/errors.hpp"

namespace convbench::retrieval {

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 10000;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_cf(a, b, x) / a;
    return 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;
}

/// Two-tailed p-value of Student's t with `df` degrees of freedom.
inline double student_t_two_tailed(double t, double df) {
    if (!(df > 0.0)) throw PreconditionError("degrees of freedom must be positive");
    if (std::isinf(t)) return 0.0;
    return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

struct TTestResult {
    double mean_delta = 0.0;
    double standard_error = 0.0;
    double t_statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

/// Paired t-test on a - b.
inline TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw PreconditionError("paired t-test needs equal-length samples");
    if (a.size() < 2) throw PreconditionError("paired t-test needs at least two pairs");
    TTestResult r;
    r.n = a.size();
    const double n = static_cast<double>(r.n);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] - b[i];
    r.mean_delta = sum / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double dev = a[i] - b[i] - r.mean_delta;
        ss += dev * dev;
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    r.standard_error = sd / std::sqrt(n);
    if (r.standard_error == 0.0) {
        r.t_statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    r.t_statistic = r.mean_delta / r.standard_error;
    r.p_value = std::clamp(student_t_two_tailed(r.t_statistic, n - 1.0), 0.0, 1.0);
    return r;
}

}  // namespace convbench::retrieval
