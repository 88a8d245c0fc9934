#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mvpareto/dist.hpp"
#include "mvpareto/errors.hpp"
#include "mvpareto/extremes.hpp"
#include "mvpareto/risk.hpp"
#include "mvpareto/sim.hpp"
#include "support.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>

using namespace mvpareto;
using namespace mvpareto::sim;
using testing_support::case_portfolio;

namespace {

constexpr std::size_t kLarge = 1'000'000;

void check_within(const risk::Estimate& est, double truth, double k = 3.0) {
    INFO("estimate " << est.value << " +- " << est.standard_error << " vs " << truth);
    CHECK(std::abs(est.value - truth) <= k * est.standard_error);
}

} // namespace

TEST_CASE("gamma vector moments") {
    const auto p = ExposurePortfolio::build({{1, 1, 0, 0}, {1, 0, 1, 0}, {0, 0, 1, 1}}, {2.0, 0.5, 1.5},
                                            {0.3, 1.7, 0.6, 2.4});
    const std::size_t m = 400'000;
    std::vector<double> xi(3 * m);
    for (std::size_t r = 0; r < m; ++r) {
        Stream stream(99, r);
        const auto v = sample_gamma_vector(p, stream);
        std::copy(v.begin(), v.end(), xi.begin() + 3 * r);
    }
    for (std::size_t i = 1; i <= 3; ++i) {
        std::vector<double> col(m);
        for (std::size_t r = 0; r < m; ++r) col[r] = xi[3 * r + i - 1];
        check_within(risk::weighted_measure_mc(col, col, [](double) { return 1.0; }, risk::WeightMode::self_weighted),
                     p.marginal_index(i) / p.sigma(i));
    }
    for (auto [k, l] : {std::pair{1, 2}, std::pair{2, 3}, std::pair{1, 3}}) {
        double mk = 0, ml = 0;
        for (std::size_t r = 0; r < m; ++r) {
            mk += xi[3 * r + k - 1];
            ml += xi[3 * r + l - 1];
        }
        mk /= m;
        ml /= m;
        std::vector<double> prod(m);
        for (std::size_t r = 0; r < m; ++r) prod[r] = (xi[3 * r + k - 1] - mk) * (xi[3 * r + l - 1] - ml);
        const auto est = risk::weighted_measure_mc(prod, prod, [](double) { return 1.0; }, risk::WeightMode::self_weighted);
        const double shared = p.pair_decomposition(k, l).shared;
        check_within(est, shared / (p.sigma(k) * p.sigma(l)));
    }
}

TEST_CASE("determinism and serial reference") {
    const auto p = case_portfolio(3);
    const auto a = sample_background_risk(p, 20'000, 5);
    const auto b = sample_background_risk(p, 20'000, 5);
    CHECK(a.draws == b.draws);
    CHECK(a.draws == sample_background_risk_serial(p, 20'000, 5).draws);
    CHECK(sample_common_shock(p, 20'000, 5).draws == sample_common_shock_serial(p, 20'000, 5).draws);
    CHECK(a.draws != sample_background_risk(p, 20'000, 6).draws);
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    for (int threads : {1, 3, 7}) {
        omp_set_num_threads(threads);
        CHECK(sample_common_shock(p, 20'000, 5).draws == sample_common_shock_serial(p, 20'000, 5).draws);
        CHECK(sample_background_risk(p, 20'000, 5).draws == a.draws);
    }
    omp_set_num_threads(saved);
#endif
    // A prefix of a longer batch is the shorter batch.
    const auto longer = sample_background_risk(p, 30'000, 5);
    CHECK(std::equal(a.draws.begin(), a.draws.end(), longer.draws.begin()));
    for (double v : a.draws) REQUIRE(v >= 0.0);
    CHECK_THROWS_AS(sample_background_risk(p, 0, 5), ModelError);
}

TEST_CASE("disjoint seeds give statistically consistent batches") {
    const auto p = case_portfolio(2);
    const auto a = sample_common_shock(p, 200'000, 1);
    const auto b = sample_common_shock(p, 200'000, 2);
    const auto ea = mc_estimate(a, stat::Ddf{{30.0, 30.0, 30.0}});
    const auto eb = mc_estimate(b, stat::Ddf{{30.0, 30.0, 30.0}});
    CHECK(a.draws != b.draws);
    CHECK(std::abs(ea.value - eb.value) <= 3 * std::hypot(ea.standard_error, eb.standard_error));
}

TEST_CASE("both samplers reproduce the closed forms") {
    const auto p = case_portfolio(3);
    for (auto rep : {Representation::background_risk, Representation::common_shock}) {
        const auto batch = sample(p, rep, kLarge, 2026);
        CHECK(mc_estimate(batch, stat::Ddf{{0.0, 0.0, 0.0}}).value == 1.0);
        for (std::size_t i = 1; i <= 3; ++i) {
            check_within(mc_estimate(batch, stat::Mean{i}), dist::marginal_mean(p, i));
            const double var95 = risk::var_marginal(p, i, 0.95);
            check_within(mc_estimate(batch, stat::Ddf{[&] {
                             std::vector<double> x(3, 0.0);
                             x[i - 1] = var95;
                             return x;
                         }()}),
                         0.05);
            check_within(mc_estimate(batch, stat::VaR{i, 0.9}), risk::var_marginal(p, i, 0.9));
            check_within(mc_estimate(batch, stat::Cte{i, 0.9}), risk::cte_marginal(p, i, 0.9));
        }
        check_within(mc_estimate(batch, stat::Cov{1, 2}), dist::covariance(p, 1, 2));
        for (const auto& x : {std::vector<double>{20, 40, 60}, std::vector<double>{100, 5, 50},
                              std::vector<double>{150, 150, 150}}) {
            check_within(mc_estimate(batch, stat::Ddf{x}), dist::joint_ddf(p, x));
        }
        for (double x : {10.0, 60.0, 200.0}) {
            check_within(mc_estimate(batch, stat::MinimaDdf{x}), extremes::minima_ddf(p, extremes::full_set(p), x));
            check_within(mc_estimate(batch, stat::MaximaDdf{x}), extremes::maxima_ddf(p, x));
        }
        check_within(mc_estimate(batch, stat::EconCte{1, 2, 0.9, risk::var_marginal(p, 2, 0.9)}),
                     risk::economic_cte(p, 1, 2, 0.9));
    }
}

TEST_CASE("single-factor margins and independence") {
    const auto p = ExposurePortfolio::build({{1, 0, 0}, {0, 1, 0}}, {2.0, 5.0}, {0.6, 2.5, 1.0});
    const auto batch = sample_common_shock(p, 400'000, 77);
    for (double x : {0.5, 3.0, 40.0}) {
        check_within(mc_estimate(batch, stat::Ddf{{x, 0.0}}), dist::marginal_ddf(p, 1, x));
        check_within(mc_estimate(batch, stat::Ddf{{0.0, x}}), dist::marginal_ddf(p, 2, x));
        check_within(mc_estimate(batch, stat::Ddf{{x, x}}), dist::marginal_ddf(p, 1, x) * dist::marginal_ddf(p, 2, x));
    }
}

TEST_CASE("case (1) sample correlation") {
    const auto batch = sample_common_shock(case_portfolio(1), kLarge, 11);
    const auto x = batch.column(1), y = batch.column(2);
    double mx = 0, my = 0;
    for (std::size_t r = 0; r < batch.m; ++r) {
        mx += x[r];
        my += y[r];
    }
    mx /= batch.m;
    my /= batch.m;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t r = 0; r < batch.m; ++r) {
        sxy += (x[r] - mx) * (y[r] - my);
        sxx += (x[r] - mx) * (x[r] - mx);
        syy += (y[r] - my) * (y[r] - my);
    }
    // Tail index 3.34 < 4: the sample correlation converges slowly, so only a loose check.
    CHECK(sxy / std::sqrt(sxx * syy) == doctest::Approx(0.30).epsilon(0.2));
}

TEST_CASE("banded conditional mean follows the regression") {
    const auto p = case_portfolio(3);
    const auto batch = sample_background_risk(p, kLarge, 12);
    const double mean2 = dist::marginal_mean(p, 2);
    const auto est = mc_estimate(batch, stat::Band{1, 2, mean2, 2.0});
    const double want = dist::marginal_mean(p, 1) + dist::centred_regression(p, 1, 2, mean2);
    check_within(est, want);
    CHECK(std::abs(dist::centred_regression(p, 1, 2, mean2)) < 0.1 * dist::marginal_mean(p, 1));
}

TEST_CASE("weighted estimators reproduce CTE") {
    const auto p = case_portfolio(3);
    const auto batch = sample_common_shock(p, kLarge, 13);
    const auto x1 = batch.column(1), x2 = batch.column(2);
    const double v1 = risk::var_marginal(p, 1, 0.9), v2 = risk::var_marginal(p, 2, 0.9);
    check_within(risk::weighted_measure_mc(x1, x1, [&](double v) { return v > v1 ? 1.0 : 0.0; },
                                           risk::WeightMode::self_weighted),
                 risk::cte_marginal(p, 1, 0.9) - 0.0);
    check_within(risk::weighted_measure_mc(x1, x2, [&](double v) { return v > v2 ? 1.0 : 0.0; },
                                           risk::WeightMode::economic),
                 risk::economic_cte(p, 1, 2, 0.9));
}

TEST_CASE("estimator preconditions") {
    const auto batch = sample_background_risk(case_portfolio(1), 50, 1);
    CHECK_THROWS_AS(mc_estimate(batch, stat::VaR{1, 0.9}), ModelError);
    CHECK_THROWS_AS(mc_estimate(batch, stat::Mean{4}), ModelError);
    CHECK_THROWS_AS(mc_estimate(batch, stat::Ddf{{1.0}}), ModelError);
    CHECK_NOTHROW(mc_estimate(batch, stat::VaR{1, 0.5}));
}
