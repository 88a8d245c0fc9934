#include "mvpareto/scenario.hpp"

#include "mvpareto/dist.hpp"
#include "mvpareto/errors.hpp"
#include "mvpareto/extremes.hpp"
#include "mvpareto/sim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <type_traits>

namespace mvpareto::app {

namespace {

// Re-raises the active exception with `stage` prefixed, keeping its category.
template <class Fn>
auto staged(const std::string& stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const InfiniteMomentError& e) {
        throw InfiniteMomentError(stage + ": " + e.what());
    } catch (const ModelError& e) {
        throw ModelError(stage + ": " + e.what());
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(stage + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(stage + ": " + e.what());
    }
}

class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, std::vector<std::filesystem::path>& written)
        : out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
        written.push_back(path);
    }
    std::ostream& stream() { return out_; }

private:
    std::ofstream out_;
};

void write_sweep(const ScenarioConfig& cfg, const std::filesystem::path& path,
                 const risk::Target& target, std::vector<std::filesystem::path>& written) {
    CsvFile file(path, written);
    auto& out = file.stream();
    out << "# sigma recalibrated for each mu so that P[X_i <= " << format_number(*cfg.horizon)
        << "] = " << format_number(*cfg.default_probability) << '\n';
    out << "mu,sigma,q,VaR,CTE\n";
    for (double mu : cfg.mu_sweep) {
        const auto p = cfg.sweep_portfolio(mu);
        const auto report = risk::build_report(p, target, cfg.grid);
        for (const auto& row : report.rows) {
            out << format_number(mu) << ',' << format_number(p.sigma(1)) << ','
                << format_number(row.q) << ',' << format_number(row.var) << ','
                << format_number(row.cte) << '\n';
        }
    }
}

void write_comparison(const ScenarioConfig& cfg, std::ostream& out) {
    const auto& p = cfg.portfolio;
    const std::size_t n = p.dimension();
    out << "statistic,representation,analytic,mc_estimate,std_error,z_score\n";
    std::vector<double> median(n);
    for (std::size_t i = 1; i <= n; ++i) median[i - 1] = risk::var_marginal(p, i, 0.5);
    const extremes::MaximaLaw maxima(p);
    const auto minima = extremes::minima_mixture(p, extremes::full_set(p));

    for (auto representation :
         {sim::Representation::background_risk, sim::Representation::common_shock}) {
        const auto batch = sim::sample(p, representation, cfg.samples, cfg.seed);
        const char* label =
            representation == sim::Representation::background_risk ? "background_risk"
                                                                    : "common_shock";
        auto emit = [&](const std::string& name, double analytic, const sim::Statistic& s) {
            const auto est = sim::mc_estimate(batch, s);
            const double z = est.standard_error > 0.0
                                 ? (est.value - analytic) / est.standard_error
                                 : 0.0;
            out << name << ',' << label << ',' << format_number(analytic) << ','
                << format_number(est.value) << ',' << format_number(est.standard_error) << ','
                << format_number(z) << '\n';
        };
        for (std::size_t i = 1; i <= n; ++i) {
            if (p.marginal_index(i) > 1.0) {
                emit("mean_" + std::to_string(i), dist::marginal_mean(p, i), sim::stat::Mean{i});
            }
        }
        for (std::size_t k = 1; k <= n; ++k) {
            for (std::size_t l = k + 1; l <= n; ++l) {
                if (p.marginal_index(k) > 2.0 && p.marginal_index(l) > 2.0) {
                    emit("cov_" + std::to_string(k) + "_" + std::to_string(l),
                         dist::covariance(p, k, l), sim::stat::Cov{k, l});
                }
            }
        }
        emit("ddf_at_medians", dist::joint_ddf(p, median), sim::stat::Ddf{median});
        emit("minima_ddf_at_median1", minima.ddf(median[0]), sim::stat::MinimaDdf{median[0]});
        emit("maxima_ddf_at_median1", maxima.ddf(median[0]), sim::stat::MaximaDdf{median[0]});
        const double q = 0.9;
        if (static_cast<double>(cfg.samples) * (1.0 - q) < 10.0) continue;
        for (std::size_t i = 1; i <= n; ++i) {
            emit("var_0.9_" + std::to_string(i), risk::var_marginal(p, i, q),
                 sim::stat::VaR{i, q});
            if (p.marginal_index(i) > 1.0) {
                emit("cte_0.9_" + std::to_string(i), risk::cte_marginal(p, i, q),
                     sim::stat::Cte{i, q});
            }
        }
        if (n >= 2 && p.marginal_index(1) > 1.0) {
            emit("econ_cte_0.9_1_2", risk::economic_cte(p, 1, 2, q),
                 sim::stat::EconCte{1, 2, q, risk::var_marginal(p, 2, q)});
        }
    }
}

} // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "NA";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.10g", value);
    return buffer;
}

void write_report_csv(std::ostream& out, const risk::RiskReport& report) {
    out << "q,VaR,CTE\n";
    for (const auto& row : report.rows) {
        out << format_number(row.q) << ',' << format_number(row.var) << ','
            << format_number(row.cte) << '\n';
    }
}

void write_correlation_csv(std::ostream& out, const ExposurePortfolio& p) {
    const std::size_t n = p.dimension();
    out << "margin";
    for (std::size_t l = 1; l <= n; ++l) out << ",X" << l;
    out << '\n';
    for (std::size_t k = 1; k <= n; ++k) {
        out << 'X' << k;
        for (std::size_t l = 1; l <= n; ++l) {
            double value = std::nan("");
            if (k == l) {
                value = 1.0;
            } else if (p.marginal_index(k) > 2.0 && p.marginal_index(l) > 2.0) {
                value = dist::correlation(p, k, l);
            }
            out << ',' << format_number(value);
        }
        out << '\n';
    }
}

std::vector<std::filesystem::path> run_scenario(const ScenarioConfig& cfg,
                                                const std::filesystem::path& out_dir) {
    std::vector<std::filesystem::path> written;
    staged("output directory", [&] {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw ConfigError("cannot create '" + out_dir.string() + "': " + ec.message());
    });
    const auto& p = cfg.portfolio;
    const auto file = [&](const std::string& suffix) {
        return out_dir / (cfg.name + "_" + suffix + ".csv");
    };

    if (!cfg.mu_sweep.empty()) {
        if (cfg.wants("minima")) {
            staged("sweep minima", [&] {
                write_sweep(cfg, file("sweep_minima"), risk::MinimaTarget{}, written);
            });
        }
        if (cfg.wants("maxima")) {
            staged("sweep maxima", [&] {
                write_sweep(cfg, file("sweep_maxima"), risk::MaximaTarget{}, written);
            });
        }
        return written;
    }

    if (cfg.wants("margins")) {
        for (std::size_t i = 1; i <= p.dimension(); ++i) {
            staged("margin " + std::to_string(i) + " risk", [&] {
                const auto report = risk::build_report(p, risk::MarginTarget{i}, cfg.grid);
                CsvFile out(file("margin" + std::to_string(i)), written);
                write_report_csv(out.stream(), report);
            });
        }
    }
    if (cfg.wants("minima")) {
        staged("minima risk", [&] {
            const auto report = risk::build_report(p, risk::MinimaTarget{}, cfg.grid);
            CsvFile out(file("minima"), written);
            write_report_csv(out.stream(), report);
        });
    }
    if (cfg.wants("maxima")) {
        staged("maxima risk", [&] {
            const auto report = risk::build_report(p, risk::MaximaTarget{}, cfg.grid);
            CsvFile out(file("maxima"), written);
            write_report_csv(out.stream(), report);
        });
    }
    if (cfg.wants("correlation")) {
        staged("correlation", [&] {
            CsvFile out(file("correlation"), written);
            write_correlation_csv(out.stream(), p);
        });
    }
    if (cfg.wants("economic") && p.dimension() >= 2) {
        staged("economic CTE", [&] {
            CsvFile out(file("economic"), written);
            auto& s = out.stream();
            s << "k,l,q,VaR_l,economic_CTE\n";
            for (std::size_t k = 1; k <= p.dimension(); ++k) {
                for (std::size_t l = 1; l <= p.dimension(); ++l) {
                    if (k == l) continue;
                    for (double q : cfg.grid.levels()) {
                        s << k << ',' << l << ',' << format_number(q) << ','
                          << format_number(risk::var_marginal(p, l, q)) << ','
                          << format_number(risk::economic_cte(p, k, l, q)) << '\n';
                    }
                }
            }
        });
    }
    if (cfg.wants("comparison") && cfg.samples > 0) {
        staged("Monte Carlo comparison", [&] {
            CsvFile out(file("mc_comparison"), written);
            write_comparison(cfg, out.stream());
        });
    }
    return written;
}

} // namespace mvpareto::app
