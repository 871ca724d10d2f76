#include "ncpd/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "ncpd/error.hpp"

namespace ncpd {

namespace {

nlohmann::ordered_json segment_json(const SegmentView& seg) {
  return {{"start", seg.start}, {"end", seg.end}};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

nlohmann::ordered_json report_to_json(const ChangePointReport& report,
                                      const nlohmann::ordered_json& config_echo) {
  nlohmann::ordered_json j;
  j["config"] = config_echo;
  j["T"] = report.T;
  j["p"] = report.p;
  j["change_points"] = report.change_points;

  auto& tests = j["tests"] = nlohmann::ordered_json::array();
  for (const auto& t : report.tests) {
    nlohmann::ordered_json tj;
    tj["segment"] = segment_json(t.segment);
    tj["candidate"] = t.candidate;
    tj["gamma_observed"] = t.gamma_observed;
    tj["c_alpha"] = t.c_alpha;
    tj["significant"] = t.significant;
    tj["resamples"] = t.resamples;
    tj["null_min"] = t.null_min;
    tj["null_median"] = t.null_median;
    tj["null_max"] = t.null_max;
    tj["num_candidates"] = t.num_candidates;
    tj["num_masked"] = t.num_masked;
    tj["near_edge"] = t.near_edge;
    tj["mask_warning"] = t.mask_warning;
    tests.push_back(std::move(tj));
  }

  auto& failures = j["failures"] = nlohmann::ordered_json::array();
  for (const auto& f : report.failures)
    failures.push_back({{"segment", segment_json(f.segment)}, {"error", f.message}});
  return j;
}

std::string trace_to_csv(const CandidateSeries& series) {
  std::ostringstream out;
  out << "position,gamma,eta,outlier\n";
  for (int j = 0; j < series.size(); ++j) {
    out << series.positions[static_cast<std::size_t>(j)] << ','
        << format_double(series.gammas[static_cast<std::size_t>(j)]) << ','
        << format_double(series.eta[static_cast<std::size_t>(j)]) << ','
        << static_cast<int>(series.outlier_mask[static_cast<std::size_t>(j)]) << '\n';
  }
  return out.str();
}

std::string metrics_to_csv(const SimMetrics& metrics, const SimSetting& setting, int K) {
  std::ostringstream out;
  out << "setting,K,reps";
  for (std::size_t k = 0; k < setting.true_change_points.size(); ++k) {
    out << ",cp" << k + 1 << "_true,cp" << k + 1 << "_mean,cp" << k + 1 << "_se,cp" << k + 1
        << "_matched";
  }
  out << ",tp_freq,fp_freq,mod_fp_freq\n";

  out << setting.id << ',' << K << ',' << metrics.reps;
  for (std::size_t k = 0; k < setting.true_change_points.size(); ++k) {
    out << ',' << setting.true_change_points[k] << ',' << format_double(metrics.tp_mean[k]) << ','
        << format_double(metrics.tp_se[k]) << ',' << metrics.tp_count[k];
  }
  out << ',' << format_double(metrics.tp_freq) << ',' << format_double(metrics.fp_freq) << ','
      << format_double(metrics.mod_fp_freq) << '\n';
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::filesystem::create_directories(dir);

  std::random_device rd;
  const auto tmp = dir / (".tmp-" + std::to_string(rd()) + "-" + path.filename().string());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::config, "cannot write to " + tmp.string());
    out << content;
    out.flush();
    if (!out) fail(errc::config, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail(errc::config, "cannot move results into place at " + path.string() + ": " + ec.message());
  }
}

std::string to_string(ResampleMode mode) {
  return mode == ResampleMode::stationary ? "stationary" : "permutation";
}

std::string to_string(CriterionBasis basis) {
  return basis == CriterionBasis::embedding ? "embedding" : "centroid";
}

ResampleMode resample_mode_from_string(const std::string& s) {
  if (s == "stationary") return ResampleMode::stationary;
  if (s == "permutation") return ResampleMode::permutation;
  fail(errc::config, "mode must be 'stationary' or 'permutation', got '" + s + "'");
}

CriterionBasis criterion_basis_from_string(const std::string& s) {
  if (s == "embedding") return CriterionBasis::embedding;
  if (s == "centroid") return CriterionBasis::centroid;
  fail(errc::config, "criterion must be 'embedding' or 'centroid', got '" + s + "'");
}

}  // namespace ncpd
