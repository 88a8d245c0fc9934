#include "mvpareto/config.hpp"

#include "mvpareto/dist.hpp"
#include "mvpareto/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mvpareto::app {

namespace {

const std::vector<std::string> kKnownOutputs{"margins", "minima",   "maxima",
                                             "correlation", "economic", "comparison"};

struct Token {
    std::string text;
    std::size_t column; // 1-based
};

struct Entry {
    std::string key;
    std::vector<Token> values;
    std::size_t line;
    std::size_t key_column;
};

class Diagnostics {
public:
    explicit Diagnostics(std::string_view origin) : origin_(origin) {}
    [[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& msg) const {
        throw ConfigError(origin_ + ":" + std::to_string(line) + ":" + std::to_string(column) +
                          ": " + msg);
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(origin_ + ": " + msg); }

private:
    std::string origin_;
};

std::vector<Token> split_tokens(std::string_view text, std::size_t offset) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ','))
            ++i;
        const std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != ',')
            ++i;
        if (i > start) out.push_back({std::string(text.substr(start, i - start)), offset + start + 1});
    }
    return out;
}

double to_double(const Diagnostics& d, std::size_t line, const Token& t) {
    double value = 0.0;
    const auto* end = t.text.data() + t.text.size();
    const auto [ptr, ec] = std::from_chars(t.text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        d.fail(line, t.column, "expected a number, got '" + t.text + "'");
    }
    return value;
}

std::uint64_t to_unsigned(const Diagnostics& d, std::size_t line, const Token& t) {
    std::uint64_t value = 0;
    const auto* end = t.text.data() + t.text.size();
    const auto [ptr, ec] = std::from_chars(t.text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        d.fail(line, t.column, "expected a nonnegative integer, got '" + t.text + "'");
    }
    return value;
}

std::vector<double> numbers(const Diagnostics& d, const Entry& e) {
    if (e.values.empty()) d.fail(e.line, e.key_column, "'" + e.key + "' needs at least one value");
    std::vector<double> out;
    for (const auto& t : e.values) out.push_back(to_double(d, e.line, t));
    return out;
}

const Entry& single(const Diagnostics& d, const Entry& e) {
    if (e.values.size() != 1) d.fail(e.line, e.key_column, "'" + e.key + "' takes exactly one value");
    return e;
}

std::vector<double> broadcast(const Diagnostics& d, const Entry& e, std::size_t size) {
    auto values = numbers(d, e);
    if (values.size() == 1) return std::vector<double>(size, values.front());
    if (values.size() != size) {
        d.fail(e.line, e.key_column, "'" + e.key + "' has " + std::to_string(values.size()) +
                                         " values, expected 1 or " + std::to_string(size));
    }
    return values;
}

risk::QuantileGrid grid_from_tokens(const std::vector<std::string>& parts,
                                    const std::function<double(std::size_t)>& number) {
    if (!parts.empty() && parts.front() == "linspace") {
        if (parts.size() != 4) throw ModelError("linspace grid needs: linspace first last count");
        const double count = number(3);
        if (count < 0 || count != std::floor(count)) throw ModelError("linspace count must be an integer");
        return risk::QuantileGrid::linspace(number(1), number(2), static_cast<std::size_t>(count));
    }
    std::vector<double> levels;
    for (std::size_t i = 0; i < parts.size(); ++i) levels.push_back(number(i));
    return risk::QuantileGrid(std::move(levels));
}

} // namespace

bool ScenarioConfig::wants(std::string_view output) const {
    return std::find(outputs.begin(), outputs.end(), output) != outputs.end();
}

ExposurePortfolio ScenarioConfig::sweep_portfolio(double mu) const {
    std::vector<double> gamma(gamma_per_mu);
    for (double& g : gamma) g *= mu;
    const auto& c = portfolio.exposure();
    std::vector<double> sigma(portfolio.dimension());
    for (std::size_t i = 1; i <= sigma.size(); ++i) {
        double index = 0.0;
        for (std::size_t j = 1; j <= c.factors(); ++j) {
            if (c(i, j)) index += gamma[j - 1];
        }
        sigma[i - 1] = calibrate_sigma(*default_probability, *horizon, index);
    }
    return ExposurePortfolio::build(c, std::move(sigma), std::move(gamma));
}

risk::QuantileGrid parse_grid(std::string_view spec) {
    std::string normalized(spec);
    std::replace(normalized.begin(), normalized.end(), ':', ' ');
    std::vector<std::string> parts;
    for (const auto& t : split_tokens(normalized, 0)) parts.push_back(t.text);
    return grid_from_tokens(parts, [&](std::size_t i) {
        double v = 0.0;
        const auto& s = parts[i];
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw ConfigError("grid: expected a number, got '" + s + "'");
        }
        return v;
    });
}

double calibrate_sigma(double p_default, double horizon, double gamma_star) {
    if (!(p_default > 0.0 && p_default < 1.0)) {
        throw ModelError("default probability must lie in (0, 1)");
    }
    if (!(horizon > 0.0) || !(gamma_star > 0.0)) {
        throw ModelError("horizon and tail index must be positive");
    }
    // (1 - p)^(-1/g) - 1 = expm1(-log1p(-p) / g), accurate for small p.
    return horizon / std::expm1(-std::log1p(-p_default) / gamma_star);
}

ScenarioConfig parse_config_text(std::string_view text, std::string_view origin) {
    const Diagnostics d(origin);
    std::vector<Entry> entries;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) d.fail(line_no, first + 1, "expected 'key = value'");
        std::string key = line.substr(first, eq - first);
        key.erase(key.find_last_not_of(" \t") + 1);
        if (key.empty()) d.fail(line_no, first + 1, "missing key before '='");
        entries.push_back({key, split_tokens(std::string_view(line).substr(eq + 1), eq + 1), line_no,
                           first + 1});
    }

    std::map<std::string, const Entry*> scalars;
    std::vector<const Entry*> rows;
    static const std::vector<std::string> known{
        "name", "preset", "n", "row", "sigma", "gamma", "default_probability", "horizon", "grid",
        "samples", "seed", "outputs", "mu_sweep", "gamma_per_mu"};
    for (const auto& e : entries) {
        if (std::find(known.begin(), known.end(), e.key) == known.end()) {
            d.fail(e.line, e.key_column, "unknown key '" + e.key + "'");
        }
        if (e.key == "row") {
            rows.push_back(&e);
        } else if (!scalars.emplace(e.key, &e).second) {
            d.fail(e.line, e.key_column, "duplicate key '" + e.key + "'");
        }
    }
    auto find = [&](const std::string& key) -> const Entry* {
        const auto it = scalars.find(key);
        return it == scalars.end() ? nullptr : it->second;
    };

    std::string name = "scenario";
    if (const auto* e = find("name")) name = single(d, *e).values.front().text;

    // Exposure matrix.
    std::vector<std::vector<int>> matrix;
    const auto* preset = find("preset");
    if (preset && !rows.empty()) {
        d.fail(preset->line, preset->key_column, "'preset' and 'row' are mutually exclusive");
    }
    if (preset) {
        const auto* n_entry = find("n");
        if (!n_entry) d.fail(preset->line, preset->key_column, "'preset' requires 'n'");
        const auto n = to_unsigned(d, n_entry->line, single(d, *n_entry).values.front());
        try {
            matrix = preset_matrix(parse_preset(single(d, *preset).values.front().text), n).rows();
        } catch (const ModelError& err) {
            d.fail(preset->line, preset->values.front().column, err.what());
        }
    } else {
        if (rows.empty()) d.fail("no exposure matrix: give 'row' lines or a 'preset'");
        const std::size_t n = rows.size();
        for (std::size_t r = 0; r < n; ++r) {
            const Entry& e = *rows[r];
            if (e.values.size() != n + 1) {
                d.fail(e.line, e.key_column, "row " + std::to_string(r + 1) + " has " +
                                                 std::to_string(e.values.size()) +
                                                 " entries, expected " + std::to_string(n + 1));
            }
            std::vector<int> row;
            for (const auto& t : e.values) {
                if (t.text != "0" && t.text != "1") {
                    d.fail(e.line, t.column, "row " + std::to_string(r + 1) + ": entry '" + t.text +
                                                 "' is not 0 or 1");
                }
                row.push_back(t.text == "1" ? 1 : 0);
            }
            matrix.push_back(std::move(row));
        }
        if (const auto* n_entry = find("n")) {
            if (to_unsigned(d, n_entry->line, single(d, *n_entry).values.front()) != n) {
                d.fail(n_entry->line, n_entry->key_column, "'n' disagrees with the number of rows");
            }
        }
    }
    const std::size_t n = matrix.size();

    std::optional<double> p_default, horizon;
    if (const auto* e = find("default_probability")) {
        p_default = to_double(d, e->line, single(d, *e).values.front());
    }
    if (const auto* e = find("horizon")) horizon = to_double(d, e->line, single(d, *e).values.front());
    if (p_default.has_value() != horizon.has_value()) {
        d.fail("'default_probability' and 'horizon' must be given together");
    }

    std::vector<double> mu_sweep, gamma_per_mu;
    if (const auto* e = find("mu_sweep")) {
        mu_sweep = numbers(d, *e);
        const auto* per = find("gamma_per_mu");
        if (!per) d.fail(e->line, e->key_column, "'mu_sweep' requires 'gamma_per_mu'");
        if (!p_default) d.fail(e->line, e->key_column, "'mu_sweep' requires 'default_probability' and 'horizon'");
        if (find("gamma")) d.fail(e->line, e->key_column, "'mu_sweep' replaces 'gamma'; remove one");
        gamma_per_mu = broadcast(d, *per, n + 1);
    } else if (const auto* per = find("gamma_per_mu")) {
        d.fail(per->line, per->key_column, "'gamma_per_mu' is only used with 'mu_sweep'");
    }

    std::vector<double> gamma;
    if (!mu_sweep.empty()) {
        gamma = gamma_per_mu;
        for (double& g : gamma) g *= mu_sweep.front();
    } else {
        const auto* e = find("gamma");
        if (!e) d.fail("missing 'gamma'");
        gamma = broadcast(d, *e, n + 1);
    }

    std::vector<double> sigma;
    const auto* sigma_entry = find("sigma");
    if (sigma_entry && p_default) {
        d.fail(sigma_entry->line, sigma_entry->key_column,
               "'sigma' and 'default_probability' are mutually exclusive");
    }
    if (sigma_entry) {
        sigma = broadcast(d, *sigma_entry, n);
    } else if (!p_default) {
        d.fail("missing 'sigma' (or 'default_probability' with 'horizon')");
    }

    std::optional<ExposurePortfolio> portfolio;
    try {
        if (p_default) {
            sigma.assign(n, 1.0);
            const auto probe = ExposurePortfolio::build(matrix, sigma, gamma);
            for (std::size_t i = 1; i <= n; ++i) {
                sigma[i - 1] = calibrate_sigma(*p_default, *horizon, probe.marginal_index(i));
            }
        }
        portfolio = ExposurePortfolio::build(matrix, sigma, gamma);
    } catch (const ModelError& err) {
        d.fail(std::string("invalid portfolio: ") + err.what());
    }

    risk::QuantileGrid grid = risk::QuantileGrid::linspace(0.0, 0.99, 100);
    if (const auto* e = find("grid")) {
        std::vector<std::string> parts;
        for (const auto& t : e->values) parts.push_back(t.text);
        try {
            grid = grid_from_tokens(parts, [&](std::size_t i) { return to_double(d, e->line, e->values[i]); });
        } catch (const ModelError& err) {
            d.fail(e->line, e->key_column, err.what());
        }
    }

    std::size_t samples = 0;
    if (const auto* e = find("samples")) samples = to_unsigned(d, e->line, single(d, *e).values.front());
    std::uint64_t seed = kDefaultSeed;
    if (const auto* e = find("seed")) seed = to_unsigned(d, e->line, single(d, *e).values.front());

    std::vector<std::string> outputs;
    if (const auto* e = find("outputs")) {
        for (const auto& t : e->values) {
            if (std::find(kKnownOutputs.begin(), kKnownOutputs.end(), t.text) == kKnownOutputs.end()) {
                d.fail(e->line, t.column, "unknown output '" + t.text + "'");
            }
            outputs.push_back(t.text);
        }
    } else {
        outputs = {"margins", "minima", "maxima", "correlation", "economic", "comparison"};
    }

    return ScenarioConfig{std::move(name),  std::move(*portfolio), std::move(grid),
                          samples,          seed,                  std::move(outputs),
                          p_default,        horizon,               std::move(mu_sweep),
                          std::move(gamma_per_mu)};
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path.string());
}

} // namespace mvpareto::app
