#include "mvpareto/specfun.hpp"

#include "mvpareto/errors.hpp"
#include "mvpareto/numeric.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace mvpareto::specfun {

namespace {

// Partial sum of 2F1(a, b; c; z) for 0 <= z < 1 with a geometric tail bound.
// For j >= J > 0 with J + c >= 1 the term ratio satisfies
//   |g(j)| <= 1 + (|a+b-c-1| + |ab-c| / J) / (J + c),  g(j) = (j+a)(j+b)/((j+c)(j+1)),
// so the remainder after term k is at most |t_k| rho / (1 - rho), rho = z sup|g|.
SeriesResult sum_2f1(double a, double b, double c, double z) {
    NeumaierSum sum;
    sum.add(1.0);
    double term = 1.0;
    const double slope = std::fabs(a + b - c - 1.0);
    const double offset = std::fabs(a * b - c);
    for (std::size_t k = 0; k < kMaxTerms; ++k) {
        const double kd = static_cast<double>(k);
        term *= (kd + a) * (kd + b) / ((kd + c) * (kd + 1.0)) * z;
        sum.add(term);
        if (term == 0.0) {
            return {sum.value(), k + 2, 0.0, true};
        }
        const double next = kd + 1.0;
        if (next + c < 1.0) {
            continue;
        }
        const double rho = z * (1.0 + (slope + offset / next) / (next + c));
        if (rho >= 1.0) {
            continue;
        }
        const double bound = std::fabs(term) * rho / (1.0 - rho);
        if (bound <= kSeriesEps * std::fabs(sum.value())) {
            return {sum.value(), k + 2, bound, true};
        }
    }
    throw ConvergenceError("2F1 series did not converge within " + std::to_string(kMaxTerms) +
                           " terms (z = " + std::to_string(z) + ")");
}

} // namespace

double log_pochhammer(double a, unsigned n) {
    if (!(a > 0.0)) {
        throw ModelError("pochhammer: argument must be positive, got " + std::to_string(a));
    }
    if (n == 0) {
        return 0.0;
    }
    return log_gamma(a + n) - log_gamma(a);
}

double pochhammer(double a, unsigned n) {
    const double log_value = log_pochhammer(a, n);
    // Direct product stays within a few ulps; the log route is for overflow-scale values.
    if (n <= 512 && log_value < 700.0) {
        double product = 1.0;
        for (unsigned i = 0; i < n; ++i) {
            product *= a + i;
        }
        return product;
    }
    return std::exp(log_value);
}

SeriesResult gauss_2f1(double a, double b, double c, double z) {
    if (!(c > 0.0)) {
        throw ModelError("2F1: c must be positive");
    }
    if (!(z < 1.0)) {
        throw ConvergenceError("2F1 series diverges for z >= 1; use gauss_2f1_unit at z = 1");
    }
    if (a == 0.0 || b == 0.0 || z == 0.0) {
        return {1.0, 1, 0.0, true};
    }
    if (z > 0.0) {
        return sum_2f1(a, b, c, z);
    }
    const double w = z / (z - 1.0);
    const double prefactor = std::pow(1.0 - z, -b);
    SeriesResult inner = sum_2f1(c - a, b, c, w);
    inner.value *= prefactor;
    inner.tail_bound *= prefactor;
    return inner;
}

SeriesResult gauss_2f1_unit(double a, double b, double c) {
    if (a == 0.0 || b == 0.0) {
        return {1.0, 1, 0.0, true};
    }
    const double excess = c - a - b;
    if (!(excess > 0.0)) {
        throw ConvergenceError("2F1 at z = 1 requires c - a - b > 0");
    }
    const double log_value =
        log_gamma(c) + log_gamma(excess) - log_gamma(c - a) - log_gamma(c - b);
    return {std::exp(log_value), 1, 0.0, true};
}

SeriesResult hyp_3f2_unit(double a1, double a2, double a3, double b1, double b2) {
    if (a1 < 0.0 || a2 < 0.0 || a3 < 0.0 || !(b1 > 0.0) || !(b2 > 0.0)) {
        throw ModelError("3F2: upper parameters must be >= 0 and lower parameters > 0");
    }
    if (a1 == 0.0 || a2 == 0.0 || a3 == 0.0) {
        return {1.0, 1, 0.0, true};
    }
    const double h = b1 + b2 - a1 - a2 - a3;
    if (!(h > 0.0)) {
        throw ConvergenceError("3F2 at unit argument diverges: h = " + std::to_string(h) +
                               " <= 0 (tail indices too heavy for a finite covariance)");
    }

    // Raabe-type certificate: if t_{j+1} <= (1 - p/j) t_j for all j >= K with p > 1,
    // then sum_{j>=K} t_j <= (K-1) t_K / (p-1). The condition is D(j) >= 0 for the cubic
    // D(j) = j (Q(j) - P(j)) - p Q(j), whose leading coefficient h + 1 - p is positive;
    // D, D', D'' all positive at K certifies every j >= K.
    const double p = 1.0 + 0.5 * h;
    const double q2 = b1 + b2 + 1.0, q1 = b1 * b2 + b1 + b2, q0 = b1 * b2;
    const double p2 = a1 + a2 + a3, p1 = a1 * a2 + a1 * a3 + a2 * a3, p0 = a1 * a2 * a3;
    const std::array<double, 4> cubic{-p * q0, q0 - p0 - p * q1, q1 - p1 - p * q2, q2 - p2 - p};
    auto certified_from = [&](double j) {
        const double d0 = ((cubic[3] * j + cubic[2]) * j + cubic[1]) * j + cubic[0];
        const double d1 = (3.0 * cubic[3] * j + 2.0 * cubic[2]) * j + cubic[1];
        const double d2 = 6.0 * cubic[3] * j + 2.0 * cubic[2];
        return d0 > 0.0 && d1 > 0.0 && d2 > 0.0;
    };

    // Partial sums at K = 2^m feed a Richardson table in powers K^-(h + j), the
    // asymptotic form of the remainder of a hypergeometric series at z = 1.
    constexpr int kFirstLevel = 4;
    constexpr int kMaxColumns = 6;
    std::vector<std::vector<double>> table;
    double best = 0.0;
    double best_err = std::numeric_limits<double>::infinity();

    NeumaierSum sum;
    double term = 1.0;
    bool certified = false;
    std::size_t next_level = std::size_t{1} << kFirstLevel;
    for (std::size_t k = 0; k < kMaxTerms; ++k) {
        // term == t_k here; the partial sum after adding it holds k + 1 terms.
        sum.add(term);
        const double kd = static_cast<double>(k);
        const double next_term =
            term * (kd + a1) * (kd + a2) * (kd + a3) / ((kd + b1) * (kd + b2) * (kd + 1.0));
        const double K = kd + 1.0;
        if (!certified && k >= 1 && (k & (k - 1)) == 0) {
            certified = certified_from(K);
        }
        if (certified) {
            const double bound = (K - 1.0) * next_term / (p - 1.0);
            if (bound <= kSeriesEps * sum.value()) {
                return {sum.value(), k + 1, bound, true};
            }
        }
        if (k + 1 == next_level) {
            std::vector<double> row{sum.value()};
            if (!table.empty()) {
                const auto& prev = table.back();
                const std::size_t columns =
                    std::min<std::size_t>(prev.size() + 1, kMaxColumns + 1);
                for (std::size_t j = 1; j < columns; ++j) {
                    const double factor = std::pow(2.0, h + static_cast<double>(j - 1));
                    row.push_back((factor * row[j - 1] - prev[j - 1]) / (factor - 1.0));
                }
                const std::size_t shared_col = std::min(row.size(), prev.size()) - 1;
                const double err = std::fabs(row[shared_col] - prev[shared_col]);
                if (err < best_err) {
                    best_err = err;
                    best = row[shared_col];
                }
            }
            table.push_back(std::move(row));
            next_level <<= 1;
            if (table.size() >= 4 && best_err <= 1e-13 * std::fabs(best)) {
                return {best, k + 1, best_err, false};
            }
        }
        term = next_term;
    }
    if (best_err <= 1e-10 * std::fabs(best)) {
        return {best, kMaxTerms, best_err, false};
    }
    throw ConvergenceError("3F2 at unit argument did not converge within " +
                           std::to_string(kMaxTerms) + " terms (h = " + std::to_string(h) + ")");
}

} // namespace mvpareto::specfun
