#pragma once

#include "mvpareto/config.hpp"
#include "mvpareto/risk.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mvpareto::app {

/// Fixed 10-significant-digit rendering used by every CSV writer.
std::string format_number(double value);

/// Header "q,VaR,CTE" followed by one row per grid level.
void write_report_csv(std::ostream& out, const risk::RiskReport& report);
/// Square correlation matrix; entries whose second moments are infinite print NA.
void write_correlation_csv(std::ostream& out, const ExposurePortfolio& p);

/// Writes every requested CSV artifact into `out_dir` and returns the paths.
/// Downstream errors are rethrown with the failing stage prefixed.
std::vector<std::filesystem::path> run_scenario(const ScenarioConfig& cfg,
                                                const std::filesystem::path& out_dir);

} // namespace mvpareto::app
