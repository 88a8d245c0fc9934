#include "mvpareto/config.hpp"
#include "mvpareto/dist.hpp"
#include "mvpareto/errors.hpp"
#include "mvpareto/extremes.hpp"
#include "mvpareto/risk.hpp"
#include "mvpareto/scenario.hpp"
#include "mvpareto/sim.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mp = mvpareto;
using mp::app::format_number;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kModel = 3, kConvergence = 4 };

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
    std::vector<double> values;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        double v = 0.0;
        const auto* end = token.data() + token.size();
        const auto [ptr, ec] = std::from_chars(token.data(), end, v);
        if (ec != std::errc{} || ptr != end) {
            throw mp::ConfigError(what + ": expected a comma-separated list of numbers, got '" +
                                  text + "'");
        }
        values.push_back(v);
    }
    if (values.empty()) throw mp::ConfigError(what + ": no values given");
    return values;
}

std::size_t as_index(double v, std::size_t n, const std::string& what) {
    if (v < 1 || v > static_cast<double>(n) || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw mp::ConfigError(what + ": component index must be an integer in 1.." + std::to_string(n));
    }
    return static_cast<std::size_t>(v);
}

// Output sink: a file when a path is given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw mp::ConfigError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void describe(const mp::app::ScenarioConfig& cfg) {
    const auto& p = cfg.portfolio;
    const std::size_t n = p.dimension();
    std::cout << "name: " << cfg.name << '\n'
              << "components: " << n << ", factors: " << p.factors() << '\n'
              << "exposure matrix:\n";
    for (std::size_t i = 1; i <= n; ++i) {
        std::cout << "  ";
        for (std::size_t j = 1; j <= p.factors(); ++j) std::cout << (p.exposed(i, j) ? '1' : '0') << ' ';
        std::cout << '\n';
    }
    std::cout << "factor shapes:";
    for (double g : p.gammas()) std::cout << ' ' << format_number(g);
    std::cout << "\ncomponent,sigma,tail_index,mean,variance\n";
    for (std::size_t i = 1; i <= n; ++i) {
        const double a = p.marginal_index(i);
        std::cout << i << ',' << format_number(p.sigma(i)) << ',' << format_number(a) << ','
                  << (a > 1.0 ? format_number(mp::dist::marginal_mean(p, i)) : "NA") << ','
                  << (a > 2.0 ? format_number(mp::dist::marginal_var(p, i)) : "NA") << '\n';
    }
    std::cout << "correlation:\n";
    mp::app::write_correlation_csv(std::cout, p);
}

struct EvalOptions {
    std::string ddf, pdf, cond_eq, cond_gt, regression, minima, maxima;
};

void evaluate(const mp::app::ScenarioConfig& cfg, const EvalOptions& o) {
    const auto& p = cfg.portfolio;
    const std::size_t n = p.dimension();
    std::cout << "quantity,arguments,value\n";
    const auto point = [&](const std::string& text, const std::string& what) {
        auto x = parse_numbers(text, what);
        if (x.size() != n) {
            throw mp::ConfigError(what + ": expected " + std::to_string(n) + " coordinates, got " +
                                  std::to_string(x.size()));
        }
        return x;
    };
    const auto quoted = [](const std::string& s) { return '"' + s + '"'; };
    if (!o.ddf.empty()) {
        std::cout << "ddf," << quoted(o.ddf) << ',' << format_number(mp::dist::joint_ddf(p, point(o.ddf, "--ddf")))
                  << '\n';
    }
    if (!o.pdf.empty()) {
        std::cout << "pdf," << quoted(o.pdf) << ',' << format_number(mp::dist::joint_pdf(p, point(o.pdf, "--pdf")))
                  << '\n';
    }
    const auto conditional = [&](const std::string& text, const std::string& what, auto fn) {
        const auto v = parse_numbers(text, what);
        if (v.size() != 4) throw mp::ConfigError(what + ": expected k,l,x_k,x_l");
        const auto k = as_index(v[0], n, what), l = as_index(v[1], n, what);
        std::cout << what.substr(2) << ',' << quoted(text) << ',' << format_number(fn(p, k, l, v[2], v[3]))
                  << '\n';
    };
    if (!o.cond_eq.empty()) conditional(o.cond_eq, "--cond-eq", mp::dist::conditional_ddf_eq);
    if (!o.cond_gt.empty()) conditional(o.cond_gt, "--cond-gt", mp::dist::conditional_ddf_gt);
    if (!o.regression.empty()) {
        const auto v = parse_numbers(o.regression, "--regression");
        if (v.size() != 3) throw mp::ConfigError("--regression: expected k,l,x_l");
        const auto k = as_index(v[0], n, "--regression"), l = as_index(v[1], n, "--regression");
        std::cout << "regression," << quoted(o.regression) << ','
                  << format_number(mp::dist::centred_regression(p, k, l, v[2])) << '\n';
    }
    if (!o.minima.empty()) {
        const auto all = mp::extremes::full_set(p);
        for (double x : parse_numbers(o.minima, "--minima")) {
            std::cout << "minima_ddf," << format_number(x) << ','
                      << format_number(mp::extremes::minima_ddf(p, all, x)) << '\n';
        }
    }
    if (!o.maxima.empty()) {
        const mp::extremes::MaximaLaw law(p);
        for (double x : parse_numbers(o.maxima, "--maxima")) {
            std::cout << "maxima_ddf," << format_number(x) << ',' << format_number(law.ddf(x)) << '\n';
        }
    }
}

void risk_command(const mp::app::ScenarioConfig& cfg, const std::string& target,
                  const mp::risk::QuantileGrid& grid, const std::string& out) {
    const auto& p = cfg.portfolio;
    const std::size_t n = p.dimension();
    std::vector<std::string> parts;
    {
        std::istringstream in(target);
        std::string part;
        while (std::getline(in, part, ':')) parts.push_back(part);
    }
    const auto index = [&](std::size_t at) {
        return as_index(parse_numbers(parts.at(at), "--target").front(), n, "--target");
    };
    Sink sink(out);
    if (parts.size() == 2 && parts[0] == "margin") {
        mp::app::write_report_csv(sink.stream(),
                                  mp::risk::build_report(p, mp::risk::MarginTarget{index(1)}, grid));
    } else if (parts.size() == 1 && parts[0] == "minima") {
        mp::app::write_report_csv(sink.stream(), mp::risk::build_report(p, mp::risk::MinimaTarget{}, grid));
    } else if (parts.size() == 1 && parts[0] == "maxima") {
        mp::app::write_report_csv(sink.stream(), mp::risk::build_report(p, mp::risk::MaximaTarget{}, grid));
    } else if (parts.size() == 3 && parts[0] == "economic") {
        const auto k = index(1), l = index(2);
        auto& s = sink.stream();
        s << "k,l,q,VaR_l,economic_CTE\n";
        for (double q : grid.levels()) {
            s << k << ',' << l << ',' << format_number(q) << ','
              << format_number(mp::risk::var_marginal(p, l, q)) << ','
              << format_number(mp::risk::economic_cte(p, k, l, q)) << '\n';
        }
    } else {
        throw mp::ConfigError("--target: expected margin:i, minima, maxima or economic:k:l, got '" +
                              target + "'");
    }
}

void simulate(const mp::app::ScenarioConfig& cfg, const std::string& representation,
              std::size_t samples, std::uint64_t seed, const std::string& out) {
    mp::sim::Representation rep;
    if (representation == "background_risk") {
        rep = mp::sim::Representation::background_risk;
    } else if (representation == "common_shock") {
        rep = mp::sim::Representation::common_shock;
    } else {
        throw mp::ConfigError("--representation: expected background_risk or common_shock, got '" +
                              representation + "'");
    }
    if (samples == 0) throw mp::ConfigError("--samples must be positive");
    const auto batch = mp::sim::sample(cfg.portfolio, rep, samples, seed);
    Sink sink(out);
    auto& s = sink.stream();
    for (std::size_t i = 1; i <= batch.n; ++i) s << (i > 1 ? "," : "") << 'X' << i;
    s << '\n';
    for (std::size_t r = 0; r < batch.m; ++r) {
        for (std::size_t i = 1; i <= batch.n; ++i) s << (i > 1 ? "," : "") << format_number(batch.at(r, i));
        s << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multivariate Pareto-II portfolios: distribution, extremes, risk measures, simulation"};
    app.require_subcommand(1);

    std::string config_path;
    auto* describe_cmd = app.add_subcommand("describe", "Summarise a portfolio config");
    describe_cmd->add_option("config", config_path, "Portfolio config file")->required();

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate distributional quantities at points");
    eval_cmd->add_option("config", config_path, "Portfolio config file")->required();
    eval_cmd->add_option("--ddf", eval.ddf, "Joint survival at x1,...,xn");
    eval_cmd->add_option("--pdf", eval.pdf, "Joint density at x1,...,xn");
    eval_cmd->add_option("--cond-eq", eval.cond_eq, "P[X_k > x_k | X_l = x_l] given k,l,x_k,x_l");
    eval_cmd->add_option("--cond-gt", eval.cond_gt, "P[X_k > x_k | X_l > x_l] given k,l,x_k,x_l");
    eval_cmd->add_option("--regression", eval.regression, "E[X_k - E X_k | X_l = x_l] given k,l,x_l");
    eval_cmd->add_option("--minima", eval.minima, "Survival of the portfolio minimum at x[,x...]");
    eval_cmd->add_option("--maxima", eval.maxima, "Survival of the portfolio maximum at x[,x...]");

    std::string target = "minima", grid_spec, out;
    auto* risk_cmd = app.add_subcommand("risk", "VaR and CTE over a quantile grid");
    risk_cmd->add_option("config", config_path, "Portfolio config file")->required();
    risk_cmd->add_option("--target", target, "margin:i, minima, maxima or economic:k:l")
        ->capture_default_str();
    risk_cmd->add_option("--grid", grid_spec, "Levels, e.g. 0,0.5,0.9 or linspace:0:0.99:100");
    risk_cmd->add_option("--out", out, "Output CSV (stdout when omitted)");

    std::string representation = "background_risk";
    std::size_t samples = 10000;
    std::uint64_t seed = mp::app::kDefaultSeed;
    auto* sim_cmd = app.add_subcommand("simulate", "Draw samples from a portfolio");
    sim_cmd->add_option("config", config_path, "Portfolio config file")->required();
    sim_cmd->add_option("--representation", representation, "background_risk or common_shock")
        ->capture_default_str();
    sim_cmd->add_option("--samples", samples, "Number of replicates")->capture_default_str();
    sim_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    sim_cmd->add_option("--out", out, "Output CSV (stdout when omitted)");

    double p_default = 0.0, horizon = 0.0, gamma_star = 0.0;
    auto* cal_cmd = app.add_subcommand("calibrate", "Scale matching a default probability by a horizon");
    cal_cmd->add_option("--p-default", p_default, "Default probability in (0,1)")->required();
    cal_cmd->add_option("--horizon", horizon, "Horizon (same units as losses)")->required();
    cal_cmd->add_option("--gamma-star", gamma_star, "Marginal tail index")->required();

    std::vector<std::string> configs;
    std::string out_dir = ".";
    std::optional<std::size_t> scenario_samples;
    std::optional<std::uint64_t> scenario_seed;
    auto* scen_cmd = app.add_subcommand("scenario", "Run scenario configs and write CSV artifacts");
    scen_cmd->add_option("configs", configs, "Scenario config files")->required();
    scen_cmd->add_option("--out-dir", out_dir, "Directory for CSV output")->capture_default_str();
    scen_cmd->add_option("--samples", scenario_samples, "Override Monte Carlo replicates");
    scen_cmd->add_option("--seed", scenario_seed, "Override random seed");
    scen_cmd->add_option("--grid", grid_spec, "Override quantile grid");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*cal_cmd) {
            const double sigma = mp::app::calibrate_sigma(p_default, horizon, gamma_star);
            std::cout << format_number(sigma) << '\n';
            return kOk;
        }
        if (*scen_cmd) {
            for (const auto& path : configs) {
                auto cfg = mp::app::parse_config(path);
                if (scenario_samples) cfg.samples = *scenario_samples;
                if (scenario_seed) cfg.seed = *scenario_seed;
                if (!grid_spec.empty()) cfg.grid = mp::app::parse_grid(grid_spec);
                for (const auto& written : mp::app::run_scenario(cfg, out_dir)) {
                    std::cout << written.string() << '\n';
                }
            }
            return kOk;
        }
        const auto cfg = mp::app::parse_config(config_path);
        if (*describe_cmd) {
            describe(cfg);
        } else if (*eval_cmd) {
            evaluate(cfg, eval);
        } else if (*risk_cmd) {
            const auto grid = grid_spec.empty() ? cfg.grid : mp::app::parse_grid(grid_spec);
            risk_command(cfg, target, grid, out);
        } else if (*sim_cmd) {
            simulate(cfg, representation, samples, seed, out);
        }
        return kOk;
    } catch (const mp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const mp::ModelError& e) {
        std::cerr << "model error: " << e.what() << '\n';
        return kModel;
    } catch (const mp::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << '\n';
        return kConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
}
