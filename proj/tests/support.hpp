#pragma once

#include "mvpareto/portfolio.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace testing_support {

using mvpareto::ExposurePortfolio;

inline constexpr double kSigma = 122.39;
inline constexpr double kMu = 1.67;

inline ExposurePortfolio case_portfolio(int which) {
    std::vector<std::vector<int>> rows;
    switch (which) {
    case 1: rows = {{1, 1, 0, 0}, {1, 1, 0, 0}, {1, 1, 0, 0}}; break;
    case 2: rows = {{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}}; break;
    case 3: rows = {{1, 1, 0, 0}, {1, 1, 0, 0}, {1, 0, 1, 0}}; break;
    default: rows = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}}; break;
    }
    std::vector<double> gamma(4, kMu);
    if (which == 0) gamma = {2 * kMu, 2 * kMu, 2 * kMu, 1.0};
    return ExposurePortfolio::build(rows, std::vector<double>(3, kSigma), gamma);
}

/// Case (1), (3), (2) and the independent reference, in decreasing minima order.
inline std::vector<ExposurePortfolio> ordered_cases() {
    return {case_portfolio(1), case_portfolio(3), case_portfolio(2), case_portfolio(0)};
}

struct RandomPortfolio {
    std::size_t n_min = 2, n_max = 3;
    double sigma_lo = 0.5, sigma_hi = 5.0;
    double gamma_lo = 0.3, gamma_hi = 2.5;

    ExposurePortfolio operator()(std::mt19937_64& rng) const {
        std::uniform_int_distribution<std::size_t> dim(n_min, n_max);
        std::bernoulli_distribution bit(0.5);
        std::uniform_real_distribution<double> sig(sigma_lo, sigma_hi), gam(gamma_lo, gamma_hi);
        const std::size_t n = dim(rng);
        std::vector<std::vector<int>> rows(n, std::vector<int>(n + 1));
        for (auto& row : rows) {
            bool any = false;
            for (auto& e : row) any |= (e = bit(rng));
            if (!any) row[std::uniform_int_distribution<std::size_t>(0, n)(rng)] = 1;
        }
        std::vector<double> sigma(n), gamma(n + 1);
        for (auto& s : sigma) s = sig(rng);
        for (auto& g : gamma) g = gam(rng);
        return ExposurePortfolio::build(rows, sigma, gamma);
    }
};

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

/// int_a^inf f.
inline double integrate_tail(const std::function<double(double)>& f, double a) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate([&](double t) { return f(a + t); }, 0.0,
                                std::numeric_limits<double>::infinity());
}

/// int_a^b f, adaptive Gauss-Kronrod.
inline double integrate(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

/// int_0^1 f with endpoint singularities allowed.
inline double integrate_unit(const std::function<double(double)>& f) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, 0.0, 1.0);
}

/// int_0^inf int_0^inf f(x, y), mapping each axis by x = s (e^t - 1). The log map keeps
/// power-law tails with index close to the moment boundary well resolved.
inline double integrate_quadrant(const std::function<double(double, double)>& f, double sx, double sy) {
    boost::math::quadrature::exp_sinh<double> outer, inner;
    constexpr double inf = std::numeric_limits<double>::infinity();
    return outer.integrate(
        [&](double t) {
            if (t > 600.0) return 0.0;
            const double x = sx * std::expm1(t);
            return sx * std::exp(t) * inner.integrate(
                                          [&](double w) {
                                              if (w > 600.0) return 0.0;
                                              return sy * std::exp(w) * f(x, sy * std::expm1(w));
                                          },
                                          0.0, inf);
        },
        0.0, inf);
}

} // namespace testing_support
