#pragma once

#include <cstddef>

namespace mvpareto::specfun {

struct SeriesResult {
    double value = 0.0;
    std::size_t terms_used = 1;
    /// Upper bound on |value - exact| from truncation. When `certified` is
    /// false the bound is an extrapolation-difference estimate instead.
    double tail_bound = 0.0;
    bool certified = true;
};

inline constexpr double kSeriesEps = 1e-14;
inline constexpr std::size_t kMaxTerms = 1'000'000;

/// Rising factorial Gamma(a+n)/Gamma(a). Throws ModelError for a <= 0.
double pochhammer(double a, unsigned n);
double log_pochhammer(double a, unsigned n);

/// Gauss 2F1(a, b; c; z) for z < 1. Negative z is mapped into [0, 1) by the
/// Pfaff transformation 2F1(a,b;c;z) = (1-z)^-b 2F1(c-a, b; c; z/(z-1)).
/// Throws ConvergenceError for z >= 1.
SeriesResult gauss_2f1(double a, double b, double c, double z);

/// 2F1(a, b; c; 1) by Gauss's summation theorem; requires c - a - b > 0.
SeriesResult gauss_2f1_unit(double a, double b, double c);

/// 3F2(a1, a2, a3; b1, b2; 1). Requires h = b1 + b2 - a1 - a2 - a3 > 0,
/// otherwise throws ConvergenceError (the series diverges).
SeriesResult hyp_3f2_unit(double a1, double a2, double a3, double b1, double b2);

} // namespace mvpareto::specfun
