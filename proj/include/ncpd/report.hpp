#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ncpd/detection.hpp"
#include "ncpd/simulation.hpp"

namespace ncpd {

/// Detection report as an ordered JSON document: config echo, change points,
/// per-segment test records, failures.
[[nodiscard]] nlohmann::ordered_json report_to_json(const ChangePointReport& report,
                                                    const nlohmann::ordered_json& config_echo);

/// One gamma trace as CSV: position,gamma,eta,outlier.
[[nodiscard]] std::string trace_to_csv(const CandidateSeries& series);

/// Table-shaped simulation summary as CSV (one row).
[[nodiscard]] std::string metrics_to_csv(const SimMetrics& metrics, const SimSetting& setting,
                                         int K);

/// Write content to path atomically: temp file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// String names used in configs and reports.
[[nodiscard]] std::string to_string(ResampleMode mode);
[[nodiscard]] std::string to_string(CriterionBasis basis);
[[nodiscard]] ResampleMode resample_mode_from_string(const std::string& s);
[[nodiscard]] CriterionBasis criterion_basis_from_string(const std::string& s);

}  // namespace ncpd
