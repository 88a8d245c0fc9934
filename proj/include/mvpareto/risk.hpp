#pragma once

#include "mvpareto/extremes.hpp"
#include "mvpareto/portfolio.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mvpareto::risk {

/// Strictly increasing probability levels in [0, 1).
class QuantileGrid {
public:
    QuantileGrid() = default;
    explicit QuantileGrid(std::vector<double> levels);
    /// `count` evenly spaced levels from `first` to `last` inclusive.
    static QuantileGrid linspace(double first, double last, std::size_t count);

    const std::vector<double>& levels() const { return levels_; }
    std::size_t size() const { return levels_.size(); }

private:
    std::vector<double> levels_;
};

double var_marginal(const ExposurePortfolio& p, std::size_t i, double q);
struct CteForms {
    double closed;            // E[X] + VaR g / (g - 1)
    double change_of_measure; // E[X] P[X* > VaR] / (1 - q) + VaR, X* ~ Pa(II)(sigma, g - 1)
};
CteForms cte_marginal_forms(const ExposurePortfolio& p, std::size_t i, double q);
/// Computes the change-of-measure form and the closed form, and throws
/// std::logic_error if they disagree beyond 1e-10 relative.
double cte_marginal(const ExposurePortfolio& p, std::size_t i, double q);

/// Quantile of a continuous, strictly decreasing survival function by bracketing
/// bisection (relative tolerance 1e-12). `scale` seeds the geometric bracket.
double invert_ddf(const std::function<double(double)>& ddf, double q, double scale);

double var_minima(const extremes::ShapeMixture& law, double q);
double var_minima(const ExposurePortfolio& p, std::span<const std::size_t> subset, double q);
double var_maxima(const extremes::MaximaLaw& law, double q, double scale);
double var_maxima(const ExposurePortfolio& p, double q);

double cte_minima(const extremes::ShapeMixture& law, double q);
double cte_minima(const ExposurePortfolio& p, std::span<const std::size_t> subset, double q);
/// Throws InfiniteMomentError naming the first subset whose minima mean is infinite.
double cte_maxima(const extremes::MaximaLaw& law, double q, double scale);
double cte_maxima(const ExposurePortfolio& p, double q);

/// E[X_k | X_l > VaR_q[X_l]].
double economic_cte(const ExposurePortfolio& p, std::size_t k, std::size_t l, double q);

struct Estimate {
    double value = 0.0;
    double standard_error = 0.0;
};

enum class WeightMode { self_weighted, economic };

/// Ratio estimator E[X w(.)] / E[w(.)] with a delta-method standard error. In
/// self-weighted mode the weight is applied to `x`, in economic mode to `y`.
/// Throws ModelError when every sample weight is zero.
Estimate weighted_measure_mc(std::span<const double> x, std::span<const double> y,
                             const std::function<double(double)>& weight, WeightMode mode);

struct MarginTarget { std::size_t i; };
struct MinimaTarget { std::vector<std::size_t> subset; };
struct MaximaTarget {};
using Target = std::variant<MarginTarget, MinimaTarget, MaximaTarget>;

std::string target_name(const Target& target);

struct RiskReport {
    struct Row {
        double q;
        double var;
        double cte;
    };
    std::string target;
    std::vector<Row> rows;
};

/// VaR/CTE rows over the grid; grid levels are evaluated in parallel.
RiskReport build_report(const ExposurePortfolio& p, const Target& target,
                        const QuantileGrid& grid);

} // namespace mvpareto::risk
