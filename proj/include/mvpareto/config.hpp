#pragma once

#include "mvpareto/portfolio.hpp"
#include "mvpareto/risk.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mvpareto::app {

/// Scenario description read from a line-oriented `key = value` file.
///
///   name = case1
///   row = 1 1 0 0          # one line per margin, n+1 entries each
///   preset = flexible_I    # alternative to rows, with `n = 3`
///   sigma = 122.39         # one value (broadcast) or n values
///   gamma = 1.67           # one value (broadcast) or n+1 values
///   default_probability = 0.3198   # with `horizon`, calibrates sigma instead
///   horizon = 15
///   grid = linspace 0 0.99 100     # or explicit levels
///   samples = 100000
///   seed = 42
///   outputs = margins minima maxima correlation economic comparison
///   mu_sweep = 1.67 1.5 1.3 1.15   # with gamma_per_mu; sigma recalibrated per mu
///   gamma_per_mu = 1 1 1 1
struct ScenarioConfig {
    std::string name;
    ExposurePortfolio portfolio;
    risk::QuantileGrid grid;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
    std::optional<double> default_probability;
    std::optional<double> horizon;
    std::vector<double> mu_sweep;
    std::vector<double> gamma_per_mu;

    bool wants(std::string_view output) const;
    /// Portfolio for one sweep value: gamma_j = mu * gamma_per_mu_j, sigma recalibrated.
    ExposurePortfolio sweep_portfolio(double mu) const;
};

inline constexpr std::uint64_t kDefaultSeed = 20261018;

/// Throws ConfigError with `origin:line:column` diagnostics.
ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_text(std::string_view text, std::string_view origin = "<config>");

/// "0,0.5,0.9", "0 0.5 0.9" or "linspace:0:0.99:100" / "linspace 0 0.99 100".
risk::QuantileGrid parse_grid(std::string_view spec);

/// Scale that gives default probability p_default by `horizon` for a margin with
/// tail index gamma_star: horizon / ((1 - p)^(-1/gamma_star) - 1).
double calibrate_sigma(double p_default, double horizon, double gamma_star);

} // namespace mvpareto::app
