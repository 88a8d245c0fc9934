#pragma once

#include "mvpareto/portfolio.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mvpareto::dist {

/// Joint survival P[X_1 > x_1, ..., X_n > x_n]; x_i >= 0.
double joint_ddf(const ExposurePortfolio& p, std::span<const double> x);
double log_joint_ddf(const ExposurePortfolio& p, std::span<const double> x);

double marginal_ddf(const ExposurePortfolio& p, std::size_t i, double x);
/// Throw InfiniteMomentError when the tail index is <= 1 (mean) or <= 2 (variance).
double marginal_mean(const ExposurePortfolio& p, std::size_t i);
double marginal_var(const ExposurePortfolio& p, std::size_t i);

/// Monomial expansion prod_i sum_j c_ij y_j = sum_I d(I) prod_j y_j^{I_j}.
class DensityExpansion {
public:
    struct Term {
        std::vector<std::uint8_t> exponents; // length n+1, sums to n
        double coefficient;                  // positive integer
    };

    static constexpr std::size_t kMaxDimension = 12;
    static constexpr std::size_t kMaxTerms = 1'000'000;

    /// Throws ModelError beyond kMaxDimension or kMaxTerms.
    explicit DensityExpansion(const ExposureMatrix& c);

    const std::vector<Term>& terms() const { return terms_; }
    /// Evaluates the expansion at y (length n+1); equals prod_i sum_j c_ij y_j.
    double evaluate(std::span<const double> y) const;

private:
    std::vector<Term> terms_;
};

/// Joint density of a fixed portfolio; the expansion is built once at construction.
class JointDensity {
public:
    explicit JointDensity(ExposurePortfolio p);
    double operator()(std::span<const double> x) const;
    const DensityExpansion& expansion() const { return expansion_; }

private:
    ExposurePortfolio p_;
    DensityExpansion expansion_;
    std::vector<double> log_weight_; // log d(I) + sum_j log (gamma_j)_{I_j} - sum_l log sigma_l
};

double joint_pdf(const ExposurePortfolio& p, std::span<const double> x);

/// Both margins need tail index > 2 (InfiniteMomentError otherwise).
double covariance(const ExposurePortfolio& p, std::size_t k, std::size_t l);
double correlation(const ExposurePortfolio& p, std::size_t k, std::size_t l);

enum class FlexibleKind { I, II };
/// Specialised covariance for the flexible type I / II patterns; throws
/// ModelError when the exposure matrix does not match `kind`.
double covariance_flexible(const ExposurePortfolio& p, std::size_t k, std::size_t l,
                           FlexibleKind kind);

/// P[X_k > x_k | X_l = x_l].
double conditional_ddf_eq(const ExposurePortfolio& p, std::size_t k, std::size_t l, double x_k,
                          double x_l);
/// P[X_k > x_k | X_l > x_l].
double conditional_ddf_gt(const ExposurePortfolio& p, std::size_t k, std::size_t l, double x_k,
                          double x_l);
/// E[X_k - E X_k | X_l = x_l]; requires tail index of X_k > 1.
double centred_regression(const ExposurePortfolio& p, std::size_t k, std::size_t l, double x_l);

} // namespace mvpareto::dist
