#pragma once

#include "mvpareto/portfolio.hpp"
#include "mvpareto/risk.hpp"
#include "mvpareto/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace mvpareto::sim {

enum class Representation { background_risk, common_shock };

/// m x n draws, row-major; reproducible from (portfolio, seed, representation, m).
struct SampleBatch {
    std::size_t m = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    Representation representation = Representation::background_risk;
    std::vector<double> draws;

    double at(std::size_t replicate, std::size_t i) const { return draws[replicate * n + i - 1]; }
    std::span<const double> row(std::size_t replicate) const {
        return {draws.data() + replicate * n, n};
    }
    /// Copy of coordinate i (1-based) across replicates.
    std::vector<double> column(std::size_t i) const;
};

/// Xi_i = sigma_i^-1 sum_j c_ij Y_j with Y_j ~ Ga(gamma_j, 1) independent.
std::vector<double> sample_gamma_vector(const ExposurePortfolio& p, Stream& stream);

/// X_i = Lambda_i / Xi_i, Lambda_i ~ Exp(1) independent of the shared Xi.
SampleBatch sample_background_risk(const ExposurePortfolio& p, std::size_t m, std::uint64_t seed);
SampleBatch sample_background_risk_serial(const ExposurePortfolio& p, std::size_t m,
                                          std::uint64_t seed);

/// X_i = sigma_i min_{j: c_ij = 1} W_ij / Lambda_j with Lambda_j ~ Ga(gamma_j, 1)
/// drawn once per replicate and W_ij ~ Exp(1) independent.
SampleBatch sample_common_shock(const ExposurePortfolio& p, std::size_t m, std::uint64_t seed);
SampleBatch sample_common_shock_serial(const ExposurePortfolio& p, std::size_t m,
                                       std::uint64_t seed);

SampleBatch sample(const ExposurePortfolio& p, Representation representation, std::size_t m,
                   std::uint64_t seed);

namespace stat {
struct Mean { std::size_t i; };
struct Cov { std::size_t k, l; };
struct Ddf { std::vector<double> x; };
struct MinimaDdf { double x; };
struct MaximaDdf { double x; };
struct VaR { std::size_t i; double q; };
struct Cte { std::size_t i; double q; };
/// E[X_k | X_l > threshold]; threshold defaults to the empirical VaR_q of X_l when negative.
struct EconCte { std::size_t k, l; double q; double threshold = -1.0; };
/// E[X_k | |X_l - x| <= half_width], a banded surrogate for conditioning on X_l = x.
struct Band { std::size_t k, l; double x; double half_width; };
} // namespace stat

using Statistic = std::variant<stat::Mean, stat::Cov, stat::Ddf, stat::MinimaDdf, stat::MaximaDdf,
                               stat::VaR, stat::Cte, stat::EconCte, stat::Band>;

/// Estimate with standard error. Ratio statistics use the delta method; the VaR
/// error comes from the order-statistic band at +-sqrt(q(1-q)/m).
/// Throws ModelError when the sample is too small for the requested level.
risk::Estimate mc_estimate(const SampleBatch& batch, const Statistic& statistic);

} // namespace mvpareto::sim
