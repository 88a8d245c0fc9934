#include "mvpareto/sim.hpp"

#include "mvpareto/errors.hpp"
#include "mvpareto/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace mvpareto::sim {

namespace {

double gamma_variate(double shape, Stream& stream) {
    return std::gamma_distribution<double>(shape, 1.0)(stream);
}

void draw_background(const ExposurePortfolio& p, std::uint64_t seed, std::size_t replicate,
                     double* out) {
    Stream stream(seed, replicate);
    const auto xi = sample_gamma_vector(p, stream);
    for (std::size_t i = 0; i < xi.size(); ++i) {
        out[i] = stream.exponential() / xi[i];
    }
}

void draw_common_shock(const ExposurePortfolio& p, std::uint64_t seed, std::size_t replicate,
                       double* out) {
    Stream stream(seed, replicate);
    const std::size_t n = p.dimension(), factors = p.factors();
    double lambda[64];
    std::vector<double> spill;
    double* rates = lambda;
    if (factors > 64) {
        spill.resize(factors);
        rates = spill.data();
    }
    for (std::size_t j = 0; j < factors; ++j) {
        rates[j] = gamma_variate(p.gammas()[j], stream);
    }
    for (std::size_t i = 1; i <= n; ++i) {
        double first = std::numeric_limits<double>::infinity();
        for (std::size_t j = 1; j <= factors; ++j) {
            if (p.exposed(i, j)) {
                first = std::min(first, stream.exponential() / rates[j - 1]);
            }
        }
        out[i - 1] = p.sigma(i) * first;
    }
}

using RowKernel = void (*)(const ExposurePortfolio&, std::uint64_t, std::size_t, double*);

SampleBatch make_batch(const ExposurePortfolio& p, std::size_t m, std::uint64_t seed,
                       Representation representation) {
    if (m == 0) {
        throw ModelError("sample size must be at least 1");
    }
    SampleBatch batch;
    batch.m = m;
    batch.n = p.dimension();
    batch.seed = seed;
    batch.representation = representation;
    batch.draws.resize(m * batch.n);
    return batch;
}

SampleBatch run_parallel(const ExposurePortfolio& p, std::size_t m, std::uint64_t seed,
                         Representation representation, RowKernel kernel) {
    auto batch = make_batch(p, m, seed, representation);
    const auto count = static_cast<std::int64_t>(m);
    double* draws = batch.draws.data();
    const std::size_t n = batch.n;
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < count; ++r) {
        kernel(p, seed, static_cast<std::size_t>(r), draws + static_cast<std::size_t>(r) * n);
    }
    return batch;
}

SampleBatch run_serial(const ExposurePortfolio& p, std::size_t m, std::uint64_t seed,
                       Representation representation, RowKernel kernel) {
    auto batch = make_batch(p, m, seed, representation);
    for (std::size_t r = 0; r < m; ++r) {
        kernel(p, seed, r, batch.draws.data() + r * batch.n);
    }
    return batch;
}

void check_coordinate(const SampleBatch& batch, std::size_t i) {
    if (i < 1 || i > batch.n) {
        throw ModelError("statistic coordinate " + std::to_string(i) + " out of range");
    }
}

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t count = 0;
};

template <class Range>
Moments moments(const Range& values) {
    Moments out;
    out.count = values.size();
    if (out.count == 0) return out;
    NeumaierSum sum;
    for (double v : values) sum.add(v);
    out.mean = sum.value() / static_cast<double>(out.count);
    NeumaierSum sq;
    for (double v : values) sq.add((v - out.mean) * (v - out.mean));
    out.sd = out.count > 1 ? std::sqrt(sq.value() / static_cast<double>(out.count - 1)) : 0.0;
    return out;
}

risk::Estimate mean_estimate(const std::vector<double>& values, const char* what) {
    if (values.size() < 2) {
        throw ModelError(std::string("insufficient sample for ") + what);
    }
    const auto mo = moments(values);
    return {mo.mean, mo.sd / std::sqrt(static_cast<double>(mo.count))};
}

risk::Estimate proportion(std::size_t hits, std::size_t m) {
    const double f = static_cast<double>(hits) / static_cast<double>(m);
    return {f, std::sqrt(f * (1.0 - f) / static_cast<double>(m))};
}

void check_level(const SampleBatch& batch, double q) {
    if (!(q >= 0.0 && q < 1.0)) {
        throw ModelError("quantile level must lie in [0, 1)");
    }
    if (static_cast<double>(batch.m) * (1.0 - q) < 10.0) {
        throw ModelError("insufficient sample for level " + std::to_string(q) + ": need m(1-q) >= 10");
    }
}

// VaR_q = inf{x : F_m(x) >= q}, the ceil(mq)-th order statistic.
double order_statistic(const std::vector<double>& sorted, double q) {
    const auto m = static_cast<double>(sorted.size());
    const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(m * q)));
    return sorted[std::min(rank, sorted.size()) - 1];
}

double empirical_var(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    return order_statistic(values, q);
}

} // namespace

std::vector<double> SampleBatch::column(std::size_t i) const {
    std::vector<double> out(m);
    for (std::size_t r = 0; r < m; ++r) out[r] = at(r, i);
    return out;
}

std::vector<double> sample_gamma_vector(const ExposurePortfolio& p, Stream& stream) {
    const std::size_t n = p.dimension();
    std::vector<double> xi(n, 0.0);
    for (std::size_t j = 1; j <= p.factors(); ++j) {
        const double y = gamma_variate(p.gamma(j), stream);
        for (std::size_t i = 1; i <= n; ++i) {
            if (p.exposed(i, j)) xi[i - 1] += y;
        }
    }
    for (std::size_t i = 1; i <= n; ++i) xi[i - 1] /= p.sigma(i);
    return xi;
}

SampleBatch sample_background_risk(const ExposurePortfolio& p, std::size_t m,
                                   std::uint64_t seed) {
    return run_parallel(p, m, seed, Representation::background_risk, draw_background);
}

SampleBatch sample_background_risk_serial(const ExposurePortfolio& p, std::size_t m,
                                          std::uint64_t seed) {
    return run_serial(p, m, seed, Representation::background_risk, draw_background);
}

SampleBatch sample_common_shock(const ExposurePortfolio& p, std::size_t m, std::uint64_t seed) {
    return run_parallel(p, m, seed, Representation::common_shock, draw_common_shock);
}

SampleBatch sample_common_shock_serial(const ExposurePortfolio& p, std::size_t m,
                                       std::uint64_t seed) {
    return run_serial(p, m, seed, Representation::common_shock, draw_common_shock);
}

SampleBatch sample(const ExposurePortfolio& p, Representation representation, std::size_t m,
                   std::uint64_t seed) {
    return representation == Representation::background_risk
               ? sample_background_risk(p, m, seed)
               : sample_common_shock(p, m, seed);
}

risk::Estimate mc_estimate(const SampleBatch& batch, const Statistic& statistic) {
    if (batch.m == 0) {
        throw ModelError("empty sample batch");
    }
    struct Visitor {
        const SampleBatch& b;

        risk::Estimate operator()(const stat::Mean& s) const {
            check_coordinate(b, s.i);
            return mean_estimate(b.column(s.i), "mean");
        }
        risk::Estimate operator()(const stat::Cov& s) const {
            check_coordinate(b, s.k);
            check_coordinate(b, s.l);
            const auto xk = b.column(s.k), xl = b.column(s.l);
            const double mk = moments(xk).mean, ml = moments(xl).mean;
            std::vector<double> products(b.m);
            for (std::size_t r = 0; r < b.m; ++r) products[r] = (xk[r] - mk) * (xl[r] - ml);
            auto est = mean_estimate(products, "covariance");
            est.value *= static_cast<double>(b.m) / static_cast<double>(b.m - 1);
            return est;
        }
        risk::Estimate operator()(const stat::Ddf& s) const {
            if (s.x.size() != b.n) {
                throw ModelError("d.d.f. point has the wrong dimension");
            }
            std::size_t hits = 0;
            for (std::size_t r = 0; r < b.m; ++r) {
                const auto row = b.row(r);
                bool all = true;
                for (std::size_t i = 0; i < b.n && all; ++i) all = row[i] > s.x[i];
                hits += all ? 1 : 0;
            }
            return proportion(hits, b.m);
        }
        risk::Estimate operator()(const stat::MinimaDdf& s) const {
            std::size_t hits = 0;
            for (std::size_t r = 0; r < b.m; ++r) {
                const auto row = b.row(r);
                hits += *std::min_element(row.begin(), row.end()) > s.x ? 1 : 0;
            }
            return proportion(hits, b.m);
        }
        risk::Estimate operator()(const stat::MaximaDdf& s) const {
            std::size_t hits = 0;
            for (std::size_t r = 0; r < b.m; ++r) {
                const auto row = b.row(r);
                hits += *std::max_element(row.begin(), row.end()) > s.x ? 1 : 0;
            }
            return proportion(hits, b.m);
        }
        risk::Estimate operator()(const stat::VaR& s) const {
            check_coordinate(b, s.i);
            check_level(b, s.q);
            auto values = b.column(s.i);
            std::sort(values.begin(), values.end());
            const double band = std::sqrt(s.q * (1.0 - s.q) / static_cast<double>(b.m));
            const double lo = order_statistic(values, std::max(0.0, s.q - band));
            const double hi = order_statistic(values, std::min(1.0, s.q + band));
            return {order_statistic(values, s.q), 0.5 * (hi - lo)};
        }
        risk::Estimate operator()(const stat::Cte& s) const {
            check_coordinate(b, s.i);
            check_level(b, s.q);
            const auto values = b.column(s.i);
            const double var = empirical_var(values, s.q);
            std::vector<double> tail;
            for (double v : values) {
                if (v > var) tail.push_back(v);
            }
            return mean_estimate(tail, "CTE");
        }
        risk::Estimate operator()(const stat::EconCte& s) const {
            check_coordinate(b, s.k);
            check_coordinate(b, s.l);
            const auto xk = b.column(s.k), xl = b.column(s.l);
            double threshold = s.threshold;
            if (threshold < 0.0) {
                check_level(b, s.q);
                threshold = empirical_var(xl, s.q);
            }
            std::vector<double> tail;
            for (std::size_t r = 0; r < b.m; ++r) {
                if (xl[r] > threshold) tail.push_back(xk[r]);
            }
            return mean_estimate(tail, "economic CTE");
        }
        risk::Estimate operator()(const stat::Band& s) const {
            check_coordinate(b, s.k);
            check_coordinate(b, s.l);
            std::vector<double> inside;
            for (std::size_t r = 0; r < b.m; ++r) {
                if (std::fabs(b.at(r, s.l) - s.x) <= s.half_width) inside.push_back(b.at(r, s.k));
            }
            return mean_estimate(inside, "banded conditional mean");
        }
    };
    return std::visit(Visitor{batch}, statistic);
}

} // namespace mvpareto::sim
