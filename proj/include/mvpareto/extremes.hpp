#pragma once

#include "mvpareto/portfolio.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mvpareto::extremes {

inline constexpr double kDefaultMixtureEps = 1e-10;
inline constexpr std::size_t kMaxMixtureTerms = 100'000;

/// Gamma law with a random integer shift K of its shape: Ga(base_shape + K, rate
/// `scale`). Read as a minima law it is Pa(II)(scale, base_shape + K).
struct ShapeMixture {
    double base_shape = 0.0;
    double scale = 0.0;
    std::vector<double> weights; // P[K = k], truncated
    double tail_mass = 0.0;      // 1 - sum(weights)

    /// sum_k p_k (1 + x/scale)^-(base_shape + k); the discarded mass is charged
    /// at the last kept term, which bounds it from above since terms decrease in k.
    double ddf(double x) const;
    /// E[X] for the Pareto reading; InfiniteMomentError unless base_shape > 1.
    double mean() const;
    /// Weights q_k = scale p_k / ((base_shape + k - 1) mean()) with base shape
    /// reduced by one: the law whose d.d.f. gives int_t^inf ddf = mean() * ddf*(t).
    ShapeMixture size_biased() const;
};

/// Moschopoulos representation of a sum of independent Ga(shape_i, rate_i)
/// variables. Truncates once the kept mass reaches 1 - eps.
ShapeMixture moschopoulos_pmf(std::span<const double> shapes, std::span<const double> rates,
                              double eps = kDefaultMixtureEps);

/// Law of min_{i in subset} X_i; subset holds 1-based coordinates.
ShapeMixture minima_mixture(const ExposurePortfolio& p, std::span<const std::size_t> subset,
                            double eps = kDefaultMixtureEps);
ShapeMixture minima_mixture(const ExposurePortfolio& p, std::uint32_t mask,
                            double eps = kDefaultMixtureEps);

double minima_ddf(const ExposurePortfolio& p, std::span<const std::size_t> subset, double x);
double minima_mean(const ExposurePortfolio& p, std::span<const std::size_t> subset);

std::vector<std::size_t> full_set(const ExposurePortfolio& p);

/// Inclusion-exclusion law of max_i X_i over all nonempty subsets.
class MaximaLaw {
public:
    static constexpr std::size_t kMaxDimension = 20;

    struct Term {
        std::uint32_t mask;
        int sign;
        ShapeMixture mixture;
    };

    /// Builds the 2^n - 1 subset mixtures in parallel (OpenMP when enabled).
    explicit MaximaLaw(const ExposurePortfolio& p, double eps = kDefaultMixtureEps);
    /// Single-threaded reference construction; identical results.
    static MaximaLaw build_serial(const ExposurePortfolio& p, double eps = kDefaultMixtureEps);

    double ddf(double x) const;
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t dimension() const { return n_; }

private:
    MaximaLaw() = default;
    std::size_t n_ = 0;
    std::vector<Term> terms_;
};

double maxima_ddf(const ExposurePortfolio& p, double x);

} // namespace mvpareto::extremes
