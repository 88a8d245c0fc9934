#include "mvpareto/extremes.hpp"

#include "mvpareto/errors.hpp"
#include "mvpareto/numeric.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <string>

namespace mvpareto::extremes {

double ShapeMixture::ddf(double x) const {
    if (!(x >= 0.0)) {
        throw ModelError("minima d.d.f.: x must be nonnegative");
    }
    const double log_base = std::log1p(x / scale);
    const double ratio = std::exp(-log_base);
    double term = std::exp(-base_shape * log_base);
    NeumaierSum sum;
    for (double w : weights) {
        sum.add(w * term);
        term *= ratio;
    }
    // `term` has advanced one past the last kept index; undo for the tail charge.
    const double last = weights.empty() ? 1.0 : term / ratio;
    sum.add(tail_mass * last);
    return std::clamp(sum.value(), 0.0, 1.0);
}

double ShapeMixture::mean() const {
    if (!(base_shape > 1.0)) {
        throw InfiniteMomentError("minima mean is infinite: base shape " +
                                  std::to_string(base_shape) + " <= 1");
    }
    NeumaierSum sum;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        sum.add(weights[k] / (base_shape + static_cast<double>(k) - 1.0));
    }
    const double last_k = static_cast<double>(weights.empty() ? 0 : weights.size() - 1);
    sum.add(tail_mass / (base_shape + last_k - 1.0));
    return scale * sum.value();
}

ShapeMixture ShapeMixture::size_biased() const {
    const double m = mean();
    ShapeMixture out;
    out.base_shape = base_shape - 1.0;
    out.scale = scale;
    out.weights.resize(weights.size());
    NeumaierSum kept;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        out.weights[k] = scale * weights[k] / ((base_shape + static_cast<double>(k) - 1.0) * m);
        kept.add(out.weights[k]);
    }
    out.tail_mass = std::max(0.0, 1.0 - kept.value());
    return out;
}

ShapeMixture moschopoulos_pmf(std::span<const double> shapes, std::span<const double> rates,
                              double eps) {
    if (shapes.empty() || shapes.size() != rates.size()) {
        throw ModelError("moschopoulos_pmf: shapes and rates must be nonempty and equal length");
    }
    if (!(eps > 0.0 && eps < 1.0)) {
        throw ModelError("moschopoulos_pmf: eps must lie in (0, 1)");
    }
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        if (!(shapes[i] > 0.0) || !(rates[i] > 0.0)) {
            throw ModelError("moschopoulos_pmf: shapes and rates must be positive");
        }
    }
    ShapeMixture out;
    out.scale = *std::max_element(rates.begin(), rates.end());
    double log_c = 0.0;
    std::vector<double> deficit(shapes.size()); // 1 - rate_i / max rate
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        out.base_shape += shapes[i];
        const double ratio = rates[i] / out.scale;
        log_c += shapes[i] * std::log(ratio);
        deficit[i] = 1.0 - ratio;
    }
    const double c_plus = std::exp(log_c);
    if (c_plus == 0.0) {
        throw ConvergenceError("moschopoulos_pmf: leading weight underflows (rates too spread)");
    }

    // g_l = sum_i shape_i deficit_i^l, extended lazily; p_k = k^-1 sum_{l<=k} g_l p_{k-l}.
    std::vector<double> g{0.0};
    std::vector<double> power(deficit);
    std::vector<double>& p = out.weights;
    p.push_back(c_plus);
    NeumaierSum mass;
    mass.add(c_plus);
    while (mass.value() < 1.0 - eps) {
        const std::size_t k = p.size();
        if (k >= kMaxMixtureTerms) {
            throw ConvergenceError("moschopoulos_pmf: mass 1 - eps not reached within " +
                                   std::to_string(kMaxMixtureTerms) + " terms");
        }
        double gk = 0.0;
        for (std::size_t i = 0; i < shapes.size(); ++i) {
            gk += shapes[i] * power[i];
            power[i] *= deficit[i];
        }
        g.push_back(gk);
        double acc = 0.0;
        for (std::size_t l = 1; l <= k; ++l) {
            acc += g[l] * p[k - l];
        }
        const double pk = acc / static_cast<double>(k);
        p.push_back(pk);
        mass.add(pk);
        if (pk == 0.0 && gk == 0.0) {
            break; // equal rates: the recursion is identically zero
        }
    }
    out.tail_mass = std::max(0.0, 1.0 - mass.value());
    if (p.size() > 1 && p.back() == 0.0) {
        p.pop_back();
    }
    return out;
}

ShapeMixture minima_mixture(const ExposurePortfolio& p, std::uint32_t mask, double eps) {
    const std::size_t n = p.dimension();
    if (mask == 0 || (n < 32 && (mask >> n) != 0)) {
        throw ModelError("minima subset must be a nonempty subset of 1.." + std::to_string(n));
    }
    std::vector<double> shapes, rates;
    for (std::size_t j = 1; j <= p.factors(); ++j) {
        double load = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            if ((mask >> (i - 1)) & 1u && p.exposed(i, j)) {
                load += 1.0 / p.sigma(i);
            }
        }
        if (load > 0.0) {
            shapes.push_back(p.gamma(j));
            rates.push_back(1.0 / load);
        }
    }
    return moschopoulos_pmf(shapes, rates, eps);
}

namespace {

std::uint32_t subset_mask(const ExposurePortfolio& p, std::span<const std::size_t> subset) {
    if (subset.empty()) {
        throw ModelError("minima subset must be nonempty");
    }
    if (p.dimension() > 32) {
        throw ModelError("minima subsets support n <= 32");
    }
    std::uint32_t mask = 0;
    for (std::size_t i : subset) {
        if (i < 1 || i > p.dimension()) {
            throw ModelError("minima subset coordinate " + std::to_string(i) + " out of range");
        }
        mask |= 1u << (i - 1);
    }
    return mask;
}

} // namespace

ShapeMixture minima_mixture(const ExposurePortfolio& p, std::span<const std::size_t> subset,
                            double eps) {
    return minima_mixture(p, subset_mask(p, subset), eps);
}

double minima_ddf(const ExposurePortfolio& p, std::span<const std::size_t> subset, double x) {
    return minima_mixture(p, subset).ddf(x);
}

double minima_mean(const ExposurePortfolio& p, std::span<const std::size_t> subset) {
    return minima_mixture(p, subset).mean();
}

std::vector<std::size_t> full_set(const ExposurePortfolio& p) {
    std::vector<std::size_t> all(p.dimension());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i + 1;
    return all;
}

namespace {

void check_maxima_dimension(std::size_t n) {
    if (n > MaximaLaw::kMaxDimension) {
        throw ModelError("maxima inclusion-exclusion supports n <= " +
                         std::to_string(MaximaLaw::kMaxDimension));
    }
}

} // namespace

MaximaLaw::MaximaLaw(const ExposurePortfolio& p, double eps) : n_(p.dimension()) {
    check_maxima_dimension(n_);
    const std::int64_t count = (std::int64_t{1} << n_) - 1;
    terms_.resize(static_cast<std::size_t>(count));
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t idx = 0; idx < count; ++idx) {
        const auto mask = static_cast<std::uint32_t>(idx + 1);
        try {
            terms_[idx] = {mask, std::popcount(mask) % 2 == 1 ? 1 : -1,
                           minima_mixture(p, mask, eps)};
        } catch (...) {
#pragma omp critical(maxima_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

MaximaLaw MaximaLaw::build_serial(const ExposurePortfolio& p, double eps) {
    MaximaLaw law;
    law.n_ = p.dimension();
    check_maxima_dimension(law.n_);
    const std::uint32_t count = (std::uint32_t{1} << law.n_) - 1;
    law.terms_.reserve(count);
    for (std::uint32_t mask = 1; mask <= count; ++mask) {
        law.terms_.push_back(
            {mask, std::popcount(mask) % 2 == 1 ? 1 : -1, minima_mixture(p, mask, eps)});
    }
    return law;
}

double MaximaLaw::ddf(double x) const {
    NeumaierSum sum;
    for (const auto& term : terms_) {
        sum.add(term.sign * term.mixture.ddf(x));
    }
    return std::clamp(sum.value(), 0.0, 1.0);
}

double maxima_ddf(const ExposurePortfolio& p, double x) {
    return MaximaLaw(p).ddf(x);
}

} // namespace mvpareto::extremes
