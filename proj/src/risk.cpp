#include "mvpareto/risk.hpp"

#include "mvpareto/dist.hpp"
#include "mvpareto/errors.hpp"
#include "mvpareto/numeric.hpp"
#include "mvpareto/specfun.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>

namespace mvpareto::risk {

namespace {

void check_level(double q) {
    if (!(q >= 0.0 && q < 1.0)) {
        throw ModelError("quantile level must lie in [0, 1), got " + std::to_string(q));
    }
}

double max_sigma(const ExposurePortfolio& p) {
    return *std::max_element(p.sigmas().begin(), p.sigmas().end());
}

} // namespace

QuantileGrid::QuantileGrid(std::vector<double> levels) : levels_(std::move(levels)) {
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        check_level(levels_[i]);
        if (i > 0 && !(levels_[i] > levels_[i - 1])) {
            throw ModelError("quantile grid must be strictly increasing (position " +
                             std::to_string(i + 1) + ")");
        }
    }
}

QuantileGrid QuantileGrid::linspace(double first, double last, std::size_t count) {
    std::vector<double> levels;
    if (count == 1) {
        levels.push_back(first);
    } else if (count > 1) {
        for (std::size_t i = 0; i < count; ++i) {
            levels.push_back(first + (last - first) * static_cast<double>(i) /
                                         static_cast<double>(count - 1));
        }
        levels.back() = last;
    }
    return QuantileGrid(std::move(levels));
}

double var_marginal(const ExposurePortfolio& p, std::size_t i, double q) {
    check_level(q);
    const double g = p.marginal_index(i);
    return p.sigma(i) * std::expm1(-std::log1p(-q) / g);
}

CteForms cte_marginal_forms(const ExposurePortfolio& p, std::size_t i, double q) {
    const double mean = dist::marginal_mean(p, i);
    const double var = var_marginal(p, i, q);
    const double g = p.marginal_index(i);
    // X* ~ Pa(II)(sigma_i, g - 1)
    const double shifted_ddf = std::exp(-(g - 1.0) * std::log1p(var / p.sigma(i)));
    return {mean + var * g / (g - 1.0), mean * shifted_ddf / (1.0 - q) + var};
}

double cte_marginal(const ExposurePortfolio& p, std::size_t i, double q) {
    const auto forms = cte_marginal_forms(p, i, q);
    if (std::fabs(forms.change_of_measure - forms.closed) > 1e-10 * std::fabs(forms.closed)) {
        throw std::logic_error("cte_marginal: the two CTE forms disagree");
    }
    return forms.closed;
}

double invert_ddf(const std::function<double(double)>& ddf, double q, double scale) {
    check_level(q);
    if (q == 0.0) {
        return 0.0;
    }
    const double target = 1.0 - q;
    double lo = 0.0;
    double hi = scale > 0.0 ? scale : 1.0;
    for (int i = 0; ddf(hi) > target; ++i) {
        if (i > 2000) {
            throw ConvergenceError("quantile bracket could not be established");
        }
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 400 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (ddf(mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double var_minima(const extremes::ShapeMixture& law, double q) {
    return invert_ddf([&](double x) { return law.ddf(x); }, q, law.scale);
}

double var_minima(const ExposurePortfolio& p, std::span<const std::size_t> subset, double q) {
    return var_minima(extremes::minima_mixture(p, subset), q);
}

double var_maxima(const extremes::MaximaLaw& law, double q, double scale) {
    return invert_ddf([&](double x) { return law.ddf(x); }, q, scale);
}

double var_maxima(const ExposurePortfolio& p, double q) {
    return var_maxima(extremes::MaximaLaw(p), q, max_sigma(p));
}

double cte_minima(const extremes::ShapeMixture& law, double q) {
    const double mean = law.mean();
    const double var = var_minima(law, q);
    const auto biased = law.size_biased();
    return mean * biased.ddf(var) / (1.0 - q) + var;
}

double cte_minima(const ExposurePortfolio& p, std::span<const std::size_t> subset, double q) {
    return cte_minima(extremes::minima_mixture(p, subset), q);
}

double cte_maxima(const extremes::MaximaLaw& law, double q, double scale) {
    for (const auto& term : law.terms()) {
        if (!(term.mixture.base_shape > 1.0)) {
            std::string subset;
            for (std::size_t i = 0; i < law.dimension(); ++i) {
                if ((term.mask >> i) & 1u) {
                    subset += (subset.empty() ? "" : ",") + std::to_string(i + 1);
                }
            }
            throw InfiniteMomentError("maxima CTE is infinite: minima of {" + subset +
                                      "} has base shape " +
                                      std::to_string(term.mixture.base_shape) + " <= 1");
        }
    }
    const double t = var_maxima(law, q, scale);
    NeumaierSum sum;
    for (const auto& term : law.terms()) {
        // E[X_S- | X_S- > t] P[X_S- > t] = t P[X_S- > t] + int_t^inf P[X_S- > x] dx
        const auto& mix = term.mixture;
        const double tail = t * mix.ddf(t) + mix.mean() * mix.size_biased().ddf(t);
        sum.add(term.sign * tail);
    }
    return sum.value() / (1.0 - q);
}

double cte_maxima(const ExposurePortfolio& p, double q) {
    return cte_maxima(extremes::MaximaLaw(p), q, max_sigma(p));
}

double economic_cte(const ExposurePortfolio& p, std::size_t k, std::size_t l, double q) {
    const auto pair = p.pair_decomposition(k, l);
    const double mean = dist::marginal_mean(p, k);
    const double var = var_marginal(p, l, q);
    const double z = var / (p.sigma(l) + var);
    return mean * specfun::gauss_2f1(pair.shared, 1.0, p.marginal_index(k), z).value;
}

Estimate weighted_measure_mc(std::span<const double> x, std::span<const double> y,
                             const std::function<double(double)>& weight, WeightMode mode) {
    if (x.empty() || (mode == WeightMode::economic && y.size() != x.size())) {
        throw ModelError("weighted_measure_mc: sample sizes are empty or inconsistent");
    }
    const std::size_t m = x.size();
    std::vector<double> w(m);
    NeumaierSum sum_w, sum_xw;
    for (std::size_t r = 0; r < m; ++r) {
        w[r] = weight(mode == WeightMode::self_weighted ? x[r] : y[r]);
        sum_w.add(w[r]);
        sum_xw.add(x[r] * w[r]);
    }
    if (!(sum_w.value() > 0.0)) {
        throw ModelError("weighted_measure_mc: all sample weights are zero");
    }
    const double ratio = sum_xw.value() / sum_w.value();
    const double mean_w = sum_w.value() / static_cast<double>(m);
    // Delta method: Var(ratio) ~ Var(w (x - ratio)) / (m mean_w^2).
    NeumaierSum resid2;
    for (std::size_t r = 0; r < m; ++r) {
        const double e = w[r] * (x[r] - ratio);
        resid2.add(e * e);
    }
    const double var_resid = resid2.value() / static_cast<double>(m > 1 ? m - 1 : 1);
    return {ratio, std::sqrt(var_resid / static_cast<double>(m)) / mean_w};
}

std::string target_name(const Target& target) {
    struct Visitor {
        std::string operator()(const MarginTarget& t) const {
            return "margin" + std::to_string(t.i);
        }
        std::string operator()(const MinimaTarget& t) const {
            std::string name = "minima";
            for (std::size_t i : t.subset) name += "_" + std::to_string(i);
            return name;
        }
        std::string operator()(const MaximaTarget&) const { return "maxima"; }
    };
    return std::visit(Visitor{}, target);
}

RiskReport build_report(const ExposurePortfolio& p, const Target& target,
                        const QuantileGrid& grid) {
    RiskReport report;
    report.target = target_name(target);
    const auto& levels = grid.levels();
    report.rows.resize(levels.size());

    // Laws are built once; the per-level work only reads them.
    std::optional<extremes::ShapeMixture> minima;
    std::optional<extremes::MaximaLaw> maxima;
    if (const auto* t = std::get_if<MinimaTarget>(&target)) {
        minima = t->subset.empty() ? extremes::minima_mixture(p, extremes::full_set(p))
                                   : extremes::minima_mixture(p, t->subset);
    } else if (std::holds_alternative<MaximaTarget>(target)) {
        maxima.emplace(p);
    }
    const double scale = max_sigma(p);

    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t r = 0; r < levels.size(); ++r) {
        try {
            const double q = levels[r];
            RiskReport::Row row{q, 0.0, 0.0};
            if (const auto* t = std::get_if<MarginTarget>(&target)) {
                row.var = var_marginal(p, t->i, q);
                row.cte = cte_marginal(p, t->i, q);
            } else if (minima) {
                row.var = var_minima(*minima, q);
                row.cte = cte_minima(*minima, q);
            } else {
                row.var = var_maxima(*maxima, q, scale);
                row.cte = cte_maxima(*maxima, q, scale);
            }
            report.rows[r] = row;
        } catch (...) {
#pragma omp critical(report_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return report;
}

} // namespace mvpareto::risk
