#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace pixie {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double sigmoid(double x)
{
    if (x >= 0.0)
        return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(sigmoid(x)) without underflow for large negative x.
inline double log_sigmoid(double x)
{
    if (x >= 0.0)
        return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

inline double log_add_exp(double a, double b)
{
    if (a == kNegInf)
        return b;
    if (b == kNegInf)
        return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

inline double log_sum_exp(std::span<const double> xs)
{
    double m = kNegInf;
    for (double x : xs)
        m = std::max(m, x);
    if (m == kNegInf)
        return kNegInf;
    double s = 0.0;
    for (double x : xs)
        s += std::exp(x - m);
    return m + std::log(s);
}

// x log x with the 0 log 0 = 0 convention.
inline double x_log_x(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace pixie
