#include "mvpareto/dist.hpp"

#include "mvpareto/errors.hpp"
#include "mvpareto/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace mvpareto::dist {

namespace {

void check_point(const ExposurePortfolio& p, std::span<const double> x) {
    if (x.size() != p.dimension()) {
        throw ModelError("point has " + std::to_string(x.size()) + " coordinates, expected " +
                         std::to_string(p.dimension()));
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= 0.0)) {
            throw ModelError("coordinate " + std::to_string(i + 1) + " must be nonnegative");
        }
    }
}

void check_nonnegative(double x, const char* name) {
    if (!(x >= 0.0)) {
        throw ModelError(std::string(name) + " must be nonnegative");
    }
}

// Loads hitting factor j at x: sum_i c_ij x_i / sigma_i.
std::vector<double> factor_loads(const ExposurePortfolio& p, std::span<const double> x) {
    std::vector<double> load(p.factors(), 0.0);
    for (std::size_t i = 1; i <= p.dimension(); ++i) {
        const double u = x[i - 1] / p.sigma(i);
        for (std::size_t j = 1; j <= p.factors(); ++j) {
            if (p.exposed(i, j)) load[j - 1] += u;
        }
    }
    return load;
}

void require_tail_index(const ExposurePortfolio& p, std::size_t i, double bound,
                        const char* moment) {
    if (!(p.marginal_index(i) > bound)) {
        throw InfiniteMomentError(std::string(moment) + " of X_" + std::to_string(i) +
                                  " is infinite: tail index " +
                                  std::to_string(p.marginal_index(i)) + " <= " +
                                  std::to_string(bound));
    }
}

} // namespace

double log_joint_ddf(const ExposurePortfolio& p, std::span<const double> x) {
    check_point(p, x);
    const auto load = factor_loads(p, x);
    double log_value = 0.0;
    for (std::size_t j = 0; j < load.size(); ++j) {
        log_value -= p.gammas()[j] * std::log1p(load[j]);
    }
    return log_value;
}

double joint_ddf(const ExposurePortfolio& p, std::span<const double> x) {
    return std::exp(log_joint_ddf(p, x));
}

double marginal_ddf(const ExposurePortfolio& p, std::size_t i, double x) {
    check_nonnegative(x, "x");
    return std::exp(-p.marginal_index(i) * std::log1p(x / p.sigma(i)));
}

double marginal_mean(const ExposurePortfolio& p, std::size_t i) {
    require_tail_index(p, i, 1.0, "mean");
    return p.sigma(i) / (p.marginal_index(i) - 1.0);
}

double marginal_var(const ExposurePortfolio& p, std::size_t i) {
    require_tail_index(p, i, 2.0, "variance");
    const double g = p.marginal_index(i);
    const double s = p.sigma(i);
    return s * s * g / ((g - 1.0) * (g - 1.0) * (g - 2.0));
}

DensityExpansion::DensityExpansion(const ExposureMatrix& c) {
    const std::size_t n = c.margins();
    if (n > kMaxDimension) {
        throw ModelError("density expansion supports n <= " + std::to_string(kMaxDimension) +
                         ", got " + std::to_string(n));
    }
    using Poly = std::map<std::vector<std::uint8_t>, double>;
    Poly poly{{std::vector<std::uint8_t>(n + 1, 0), 1.0}};
    for (std::size_t i = 1; i <= n; ++i) {
        Poly next;
        for (const auto& [exponents, coefficient] : poly) {
            for (std::size_t j = 1; j <= n + 1; ++j) {
                if (!c(i, j)) continue;
                auto e = exponents;
                ++e[j - 1];
                next[e] += coefficient;
            }
        }
        if (next.size() > kMaxTerms) {
            throw ModelError("density expansion exceeds " + std::to_string(kMaxTerms) + " terms");
        }
        poly = std::move(next);
    }
    terms_.reserve(poly.size());
    for (auto& [exponents, coefficient] : poly) {
        terms_.push_back({exponents, coefficient});
    }
}

double DensityExpansion::evaluate(std::span<const double> y) const {
    double total = 0.0;
    for (const auto& term : terms_) {
        double monomial = term.coefficient;
        for (std::size_t j = 0; j < term.exponents.size(); ++j) {
            monomial *= std::pow(y[j], term.exponents[j]);
        }
        total += monomial;
    }
    return total;
}

JointDensity::JointDensity(ExposurePortfolio p) : p_(std::move(p)), expansion_(p_.exposure()) {
    double log_sigma = 0.0;
    for (double s : p_.sigmas()) log_sigma += std::log(s);
    log_weight_.reserve(expansion_.terms().size());
    for (const auto& term : expansion_.terms()) {
        double w = std::log(term.coefficient) - log_sigma;
        for (std::size_t j = 0; j < term.exponents.size(); ++j) {
            w += specfun::log_pochhammer(p_.gammas()[j], term.exponents[j]);
        }
        log_weight_.push_back(w);
    }
}

double JointDensity::operator()(std::span<const double> x) const {
    check_point(p_, x);
    const auto load = factor_loads(p_, x);
    std::vector<double> log1p_load(load.size());
    std::transform(load.begin(), load.end(), log1p_load.begin(),
                   [](double v) { return std::log1p(v); });

    const auto& terms = expansion_.terms();
    std::vector<double> log_terms(terms.size());
    for (std::size_t t = 0; t < terms.size(); ++t) {
        double v = log_weight_[t];
        for (std::size_t j = 0; j < load.size(); ++j) {
            v -= (p_.gammas()[j] + terms[t].exponents[j]) * log1p_load[j];
        }
        log_terms[t] = v;
    }
    const double peak = *std::max_element(log_terms.begin(), log_terms.end());
    double total = 0.0;
    for (double v : log_terms) total += std::exp(v - peak);
    return std::exp(peak) * total;
}

double joint_pdf(const ExposurePortfolio& p, std::span<const double> x) {
    return JointDensity(p)(x);
}

double covariance(const ExposurePortfolio& p, std::size_t k, std::size_t l) {
    const auto pair = p.pair_decomposition(k, l);
    require_tail_index(p, k, 2.0, "second moment");
    require_tail_index(p, l, 2.0, "second moment");
    if (pair.shared == 0.0) {
        return 0.0;
    }
    const double gk = p.marginal_index(k), gl = p.marginal_index(l);
    const auto series = specfun::hyp_3f2_unit(pair.shared, 1.0, 1.0, gk, gl);
    return p.sigma(k) * p.sigma(l) / ((gk - 1.0) * (gl - 1.0)) * (series.value - 1.0);
}

double correlation(const ExposurePortfolio& p, std::size_t k, std::size_t l) {
    const double cov = covariance(p, k, l);
    return cov / std::sqrt(marginal_var(p, k) * marginal_var(p, l));
}

double covariance_flexible(const ExposurePortfolio& p, std::size_t k, std::size_t l,
                           FlexibleKind kind) {
    const std::size_t n = p.dimension();
    const Preset preset = kind == FlexibleKind::I ? Preset::flexible_I : Preset::flexible_II;
    if (!(p.exposure() == preset_matrix(preset, n))) {
        throw ModelError("exposure matrix does not match the flexible type " +
                         std::string(kind == FlexibleKind::I ? "I" : "II") + " pattern");
    }
    // Both forms need finite second moments of the pair.
    p.pair_decomposition(k, l);
    require_tail_index(p, k, 2.0, "second moment");
    require_tail_index(p, l, 2.0, "second moment");
    const double sk = p.sigma(k), sl = p.sigma(l);
    if (kind == FlexibleKind::I) {
        const double common = p.gamma(n + 1);
        const double gk = p.gamma(k) + common, gl = p.gamma(l) + common;
        const auto series = specfun::hyp_3f2_unit(common, 1.0, 1.0, gk, gl);
        return sk * sl / ((gk - 1.0) * (gl - 1.0)) * (series.value - 1.0);
    }
    // Nested rows: the lower-indexed margin's factors are all shared.
    const std::size_t lo = std::min(k, l), hi = std::max(k, l);
    const double g_lo = p.marginal_index(lo), g_hi = p.marginal_index(hi);
    return sk * sl / ((g_lo - 1.0) * (g_hi - 1.0) * (g_hi - 2.0));
}

double conditional_ddf_eq(const ExposurePortfolio& p, std::size_t k, std::size_t l, double x_k,
                          double x_l) {
    check_nonnegative(x_k, "x_k");
    check_nonnegative(x_l, "x_l");
    const auto pair = p.pair_decomposition(k, l);
    if (pair.shared == 0.0) {
        return marginal_ddf(p, k, x_k);
    }
    const double gl = p.marginal_index(l);
    // shared * m(x_l) = sigma_k (1 + x_l / sigma_l)
    const double u = x_k / (p.sigma(k) * (1.0 + x_l / p.sigma(l)));
    const double mix = pair.shared / gl + pair.only_l / gl * (1.0 + u);
    const double log_tail =
        -pair.only_k * std::log1p(x_k / p.sigma(k)) - (pair.shared + 1.0) * std::log1p(u);
    return mix * std::exp(log_tail);
}

double conditional_ddf_gt(const ExposurePortfolio& p, std::size_t k, std::size_t l, double x_k,
                          double x_l) {
    check_nonnegative(x_k, "x_k");
    check_nonnegative(x_l, "x_l");
    const auto pair = p.pair_decomposition(k, l);
    if (pair.shared == 0.0) {
        return marginal_ddf(p, k, x_k);
    }
    const double u = x_k / (p.sigma(k) * (1.0 + x_l / p.sigma(l)));
    return std::exp(-pair.only_k * std::log1p(x_k / p.sigma(k)) - pair.shared * std::log1p(u));
}

double centred_regression(const ExposurePortfolio& p, std::size_t k, std::size_t l, double x_l) {
    check_nonnegative(x_l, "x_l");
    const auto pair = p.pair_decomposition(k, l);
    const double mean_k = marginal_mean(p, k);
    if (pair.shared == 0.0) {
        return 0.0;
    }
    const double gk = p.marginal_index(k), gl = p.marginal_index(l);
    const double t = x_l / p.sigma(l);
    // m(x_l) a_1 and m(x_l) a_2 with the 1/shared of m cancelled against a_i.
    const double w1 = p.sigma(k) * (1.0 + t) * pair.shared / (gk * gl);
    const double w2 = p.sigma(k) * (1.0 + t) * pair.only_l / (gl * (gk - 1.0));
    const double f1 = specfun::gauss_2f1(pair.only_k, 1.0, gk + 1.0, -t).value;
    const double f2 = pair.only_l > 0.0 ? specfun::gauss_2f1(pair.only_k, 1.0, gk, -t).value : 0.0;
    return w1 * f1 + w2 * f2 - mean_k;
}

} // namespace mvpareto::dist
