#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mvpareto/dist.hpp"
#include "mvpareto/errors.hpp"
#include "mvpareto/extremes.hpp"
#include "mvpareto/risk.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace mvpareto;
using namespace mvpareto::risk;
using testing_support::case_portfolio;
using testing_support::rel_err;

namespace {

// VaR + (1 - q)^-1 int_VaR^inf ddf.
double cte_by_quadrature(const std::function<double(double)>& ddf, double var, double q) {
    return var + testing_support::integrate_tail(ddf, var) / (1.0 - q);
}

ExposurePortfolio single_margin(double sigma, double index) {
    return ExposurePortfolio::build({{1, 0}}, {sigma}, {index, 1.0});
}

} // namespace

TEST_CASE("quantile grid validation") {
    CHECK_NOTHROW(QuantileGrid({0.0, 0.5, 0.9}));
    CHECK_NOTHROW(QuantileGrid(std::vector<double>{}));
    CHECK_THROWS_AS(QuantileGrid({0.5, 0.5}), ModelError);
    CHECK_THROWS_AS(QuantileGrid({0.5, 0.4}), ModelError);
    CHECK_THROWS_AS(QuantileGrid({0.2, 1.0}), ModelError);
    CHECK_THROWS_AS(QuantileGrid({-0.1}), ModelError);
    const auto g = QuantileGrid::linspace(0.0, 0.99, 100);
    CHECK(g.size() == 100);
    CHECK(g.levels().front() == 0.0);
    CHECK(g.levels().back() == 0.99);
}

TEST_CASE("marginal VaR") {
    const auto p = single_margin(122.39, 3.33);
    CHECK(var_marginal(p, 1, 0.0) == 0.0);
    CHECK(var_marginal(p, 1, 0.95) == doctest::Approx(178.526).epsilon(1e-5));
    CHECK(var_marginal(p, 1, 0.95) == doctest::Approx(122.39 * (std::pow(0.05, -1 / 3.33) - 1)).epsilon(1e-14));
    for (double q : {0.01, 0.3, 0.9, 0.999, 0.999999}) {
        CHECK(std::abs(dist::marginal_ddf(p, 1, var_marginal(p, 1, q)) - (1 - q)) <= 1e-12 * (1 - q) + 1e-16);
    }
    CHECK_THROWS_AS(var_marginal(p, 1, 1.0), ModelError);
    CHECK_THROWS_AS(var_marginal(p, 1, -0.1), ModelError);
}

TEST_CASE("marginal CTE") {
    const auto p = single_margin(122.39, 3.33);
    CHECK(cte_marginal(p, 1, 0.0) == doctest::Approx(dist::marginal_mean(p, 1)).epsilon(1e-14));
    CHECK(cte_marginal(p, 1, 0.95) == doctest::Approx(307.675).epsilon(1e-5));
    CHECK_THROWS_AS(cte_marginal(single_margin(1.0, 0.8), 1, 0.5), InfiniteMomentError);

    std::mt19937_64 rng(73);
    const testing_support::RandomPortfolio draw{.n_min = 2, .n_max = 4, .gamma_lo = 0.5};
    std::uniform_real_distribution<double> level(0.0, 0.995);
    int checked = 0;
    while (checked < 40) {
        const auto p2 = draw(rng);
        if (p2.marginal_index(1) <= 1.3) continue;
        const double q = level(rng);
        const double oracle = cte_by_quadrature([&](double x) { return dist::marginal_ddf(p2, 1, x); },
                                                var_marginal(p2, 1, q), q);
        CHECK(rel_err(cte_marginal(p2, 1, q), oracle) < 1e-6);
        ++checked;
    }
}

TEST_CASE("both marginal CTE forms agree on random draws") {
    // cte_marginal throws std::logic_error when its two evaluations disagree.
    std::mt19937_64 rng(79);
    const testing_support::RandomPortfolio draw{.n_min = 1, .n_max = 5, .gamma_lo = 0.4};
    std::uniform_real_distribution<double> level(0.0, 0.9999);
    int checked = 0;
    while (checked < 1000) {
        const auto p = draw(rng);
        if (p.marginal_index(1) <= 1.0) continue;
        REQUIRE_NOTHROW(cte_marginal(p, 1, level(rng)));
        ++checked;
    }
}

TEST_CASE("minima VaR and CTE") {
    const double s = 122.39, g = 3.33;
    const auto indep = ExposurePortfolio::preset(Preset::independent, 3, {s, s, s}, {g, g, g, 1.0});
    const auto all = extremes::full_set(indep);
    CHECK(var_minima(indep, all, 0.0) == 0.0);
    for (double q : {0.1, 0.5, 0.95, 0.999}) {
        CHECK(rel_err(var_minima(indep, all, q), s * (std::pow(1 - q, -1 / (3 * g)) - 1)) < 1e-11);
        const auto pareto = single_margin(s, 3 * g);
        CHECK(rel_err(cte_minima(indep, all, q), cte_marginal(pareto, 1, q)) < 1e-11);
    }
    CHECK(rel_err(cte_minima(indep, all, 0.0), extremes::minima_mean(indep, all)) < 1e-13);

    for (int which : {1, 2, 3}) {
        const auto p = case_portfolio(which);
        const auto law = extremes::minima_mixture(p, extremes::full_set(p));
        for (double q : {0.0, 0.3, 0.9, 0.99}) {
            const double var = var_minima(law, q);
            CHECK(std::abs(law.ddf(var) - (1 - q)) <= 1e-10);
            const double oracle = cte_by_quadrature([&](double x) { return law.ddf(x); }, var, q);
            CHECK(rel_err(cte_minima(law, q), oracle) < 1e-6);
        }
    }
}

TEST_CASE("maxima VaR and CTE") {
    SUBCASE("one component") {
        const auto p = single_margin(3.0, 2.5);
        for (double q : {0.0, 0.4, 0.95}) {
            CHECK(rel_err(var_maxima(p, q) + 1e-300, var_marginal(p, 1, q) + 1e-300) < 1e-11);
            CHECK(rel_err(cte_maxima(p, q), cte_marginal(p, 1, q)) < 1e-10);
        }
    }
    SUBCASE("independent pair against quadrature") {
        const auto p = ExposurePortfolio::preset(Preset::independent, 2, {1.0, 2.5}, {2.2, 3.1, 1.0});
        const extremes::MaximaLaw law(p);
        for (double q : {0.0, 0.5, 0.9, 0.99}) {
            const double var = var_maxima(p, q);
            CHECK(std::abs(law.ddf(var) - (1 - q)) <= 1e-10);
            const double oracle = cte_by_quadrature([&](double x) { return law.ddf(x); }, var, q);
            CHECK(rel_err(cte_maxima(p, q), oracle) < 1e-5);
        }
    }
    SUBCASE("section 5 ordering at the median") {
        CHECK(cte_maxima(case_portfolio(1), 0.5) < cte_maxima(case_portfolio(2), 0.5));
    }
    SUBCASE("infinite subset mean is named") {
        const auto p = ExposurePortfolio::build({{1, 0, 0}, {0, 1, 0}}, {1.0, 1.0}, {0.8, 3.0, 1.0});
        try {
            cte_maxima(p, 0.5);
            FAIL("expected an infinite-moment error");
        } catch (const InfiniteMomentError& e) {
            CHECK(std::string(e.what()).find("{1}") != std::string::npos);
        }
    }
}

TEST_CASE("economic CTE") {
    const auto p = case_portfolio(3);
    CHECK(rel_err(economic_cte(p, 1, 2, 0.0), dist::marginal_mean(p, 1)) < 1e-14);
    const auto indep = case_portfolio(0);
    for (double q : {0.0, 0.5, 0.99}) CHECK(economic_cte(indep, 1, 2, q) == dist::marginal_mean(indep, 1));
    std::mt19937_64 rng(83);
    const testing_support::RandomPortfolio draw{.n_min = 2, .n_max = 4, .gamma_lo = 0.5};
    int checked = 0;
    while (checked < 30) {
        const auto r = draw(rng);
        const std::size_t k = 1, l = 2;
        if (r.marginal_index(k) <= 1.3) continue;
        for (double q : {0.5, 0.95}) {
            const double v = var_marginal(r, l, q);
            std::vector<double> x(r.dimension(), 0.0);
            x[l - 1] = v;
            const double oracle = testing_support::integrate_tail(
                [&](double xk) {
                    x[k - 1] = xk;
                    return dist::joint_ddf(r, x) / (1.0 - q);
                },
                0.0);
            CHECK(rel_err(economic_cte(r, k, l, q), oracle) < 1e-6);
        }
        ++checked;
    }
}

TEST_CASE("weighted Monte Carlo measures") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 10.0}, y{5.0, 1.0, 7.0, 2.0, 9.0};
    const auto flat = weighted_measure_mc(x, y, [](double) { return 1.0; }, WeightMode::self_weighted);
    CHECK(flat.value == doctest::Approx(4.0));
    const auto tail = weighted_measure_mc(x, y, [](double v) { return v > 2.5 ? 1.0 : 0.0; },
                                          WeightMode::self_weighted);
    CHECK(tail.value == doctest::Approx(17.0 / 3.0));
    const auto econ = weighted_measure_mc(x, y, [](double v) { return v > 4.0 ? 1.0 : 0.0; }, WeightMode::economic);
    CHECK(econ.value == doctest::Approx((1.0 + 3.0 + 10.0) / 3.0));
    CHECK(econ.standard_error > 0.0);
    CHECK_THROWS_AS(weighted_measure_mc(x, y, [](double) { return 0.0; }, WeightMode::economic), ModelError);
}

TEST_CASE("report invariants") {
    const auto grid = QuantileGrid::linspace(0.0, 0.99, 60);
    for (int which : {0, 1, 2, 3}) {
        const auto p = case_portfolio(which);
        for (const Target& target : {Target{MarginTarget{2}}, Target{MinimaTarget{}}, Target{MaximaTarget{}}}) {
            const auto report = build_report(p, target, grid);
            REQUIRE(report.rows.size() == grid.size());
            for (std::size_t r = 0; r < report.rows.size(); ++r) {
                REQUIRE(report.rows[r].cte >= report.rows[r].var);
                if (r > 0) {
                    REQUIRE(report.rows[r].var >= report.rows[r - 1].var);
                    REQUIRE(report.rows[r].cte >= report.rows[r - 1].cte);
                }
            }
        }
    }
    CHECK(build_report(case_portfolio(1), MinimaTarget{}, QuantileGrid(std::vector<double>{})).rows.empty());
    CHECK(target_name(MarginTarget{2}) == "margin2");
    CHECK(target_name(MinimaTarget{}) == "minima");
    CHECK(target_name(MaximaTarget{}) == "maxima");
}

TEST_CASE("VaR and CTE are homogeneous in sigma") {
    const double c = 3.7;
    for (int which : {1, 2, 3}) {
        const auto p = case_portfolio(which);
        const auto scaled = p.scaled(c);
        const auto all = extremes::full_set(p);
        for (double q : {0.0, 0.5, 0.9, 0.99}) {
            CHECK(std::abs(var_marginal(scaled, 1, q) - c * var_marginal(p, 1, q)) <= 1e-12 * c * var_marginal(p, 1, q));
            CHECK(rel_err(cte_marginal(scaled, 1, q), c * cte_marginal(p, 1, q)) < 1e-12);
            CHECK(rel_err(cte_minima(scaled, all, q), c * cte_minima(p, all, q)) < 1e-10);
            CHECK(rel_err(cte_maxima(scaled, q), c * cte_maxima(p, q)) < 1e-10);
            CHECK(rel_err(economic_cte(scaled, 1, 3, q), c * economic_cte(p, 1, 3, q)) < 1e-12);
        }
    }
}
