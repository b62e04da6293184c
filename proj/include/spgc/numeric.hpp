#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace spgc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(sum(exp(xs))) with max-subtraction. All-(-inf) inputs yield -inf,
/// never NaN.
inline double log_sum_exp(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// Pairwise log-space addition: log(exp(a) + exp(b)).
inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

/// In-place log-softmax: out[i] = raw[i] - log_sum_exp(raw).
inline void log_softmax(std::span<const double> raw, std::span<double> out) {
    double z = log_sum_exp(raw);
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] - z;
}

/// Least-squares slope of y against x. Used by the benchmark scaling fit.
inline double least_squares_slope(std::span<const double> x, std::span<const double> y) {
    double mx = 0.0, my = 0.0;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

} // namespace spgc
