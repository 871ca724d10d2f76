// ncpd — change-point detection in the community structure of
// high-dimensional multivariate time series.
//
// Subcommands:
//   detect        find change points in a CSV/TSV series
//   simulate      run the built-in synthetic experiments and summarize them
//   similarity    pairwise gamma between networks listed in a manifest
//   export-graph  thresholded correlation graph with community labels
//
// Exit codes: 0 success, 2 configuration error, 3 parse error,
// 4 numerical/degeneracy error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ncpd/cluster.hpp"
#include "ncpd/criterion.hpp"
#include "ncpd/data.hpp"
#include "ncpd/detection.hpp"
#include "ncpd/parallel.hpp"
#include "ncpd/report.hpp"
#include "ncpd/rng.hpp"
#include "ncpd/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

int exit_code(ncpd::errc code) {
  switch (code) {
    case ncpd::errc::config:
    case ncpd::errc::bounds:
    case ncpd::errc::dimension:
      return 2;
    case ncpd::errc::parse:
      return 3;
    default:
      return 4;
  }
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Options shared by the input-reading commands.

struct InputOpts {
  std::string path;
  bool header = false;
  std::string delimiter = "auto";  // auto: by extension (.tsv/.tab = tab)
};

char resolve_delimiter(const std::string& spec, const fs::path& path) {
  if (spec == "auto") {
    const auto ext = path.extension().string();
    return (ext == ".tsv" || ext == ".tab") ? '\t' : ',';
  }
  if (spec == "tab" || spec == "\\t") return '\t';
  if (spec == "comma") return ',';
  if (spec.size() == 1) return spec[0];
  ncpd::fail(ncpd::errc::config, "delimiter must be a single character, 'tab', 'comma' or 'auto'");
}

ncpd::Matrix load_input(const InputOpts& in) {
  if (!fs::exists(in.path)) ncpd::fail(ncpd::errc::parse, "input file not found: " + in.path);
  ncpd::LoadOptions opts;
  opts.delimiter = resolve_delimiter(in.delimiter, in.path);
  opts.header = in.header;
  return ncpd::load_matrix(in.path, opts);
}

void add_input_flags(CLI::App* cmd, InputOpts& in) {
  cmd->add_option("--input", in.path, "input matrix file (rows = time points)")->required();
  cmd->add_flag("--header", in.header, "skip one header row");
  cmd->add_option("--delimiter", in.delimiter,
                  "cell delimiter: single char, 'tab', 'comma' or 'auto' (default)");
}

// ---------------------------------------------------------------------------
// Detection parameters shared by detect and simulate.

struct DetectOpts {
  int k = 3;
  int n_min = 50;
  double alpha = 0.05;
  int resamples = 1000;
  int block_len = 0;
  double block_frac = 0.2;
  std::string mode = "stationary";
  std::string criterion = "embedding";
  bool absolute_weights = false;
  std::uint64_t seed = 0;
  int threads = 0;
};

void add_detect_flags(CLI::App* cmd, DetectOpts& d, bool k_required) {
  auto* k = cmd->add_option("--k", d.k, "number of communities");
  if (k_required) k->required();
  cmd->add_option("--n-min", d.n_min, "minimum side length / spacing of change points")
      ->capture_default_str();
  cmd->add_option("--alpha", d.alpha, "significance level")->capture_default_str();
  cmd->add_option("--resamples", d.resamples, "bootstrap resamples per test")
      ->capture_default_str();
  auto* bl = cmd->add_option("--block-len", d.block_len, "mean bootstrap block length (absolute)");
  auto* bf = cmd->add_option("--block-frac", d.block_frac,
                             "mean block length as a fraction of the segment")
                 ->capture_default_str();
  bl->excludes(bf);
  bf->excludes(bl);
  cmd->add_option("--mode", d.mode, "resampling mode: stationary or permutation")
      ->capture_default_str()
      ->check(CLI::IsMember({"stationary", "permutation"}));
  cmd->add_option("--criterion", d.criterion, "criterion basis: embedding or centroid")
      ->capture_default_str()
      ->check(CLI::IsMember({"embedding", "centroid"}));
  cmd->add_flag("--absolute-weights", d.absolute_weights,
                "use |correlation| as edge weights (guarantees a PSD Laplacian)");
  cmd->add_option("--seed", d.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--threads", d.threads, "worker threads (0 = NCPD_THREADS or all cores)")
      ->capture_default_str();
}

ncpd::DetectConfig to_config(const DetectOpts& d) {
  ncpd::DetectConfig cfg;
  cfg.K = d.k;
  cfg.n_min = d.n_min;
  cfg.alpha = d.alpha;
  cfg.resamples = d.resamples;
  cfg.mean_block_length = d.block_len;
  cfg.block_frac = d.block_frac;
  cfg.mode = ncpd::resample_mode_from_string(d.mode);
  cfg.basis = ncpd::criterion_basis_from_string(d.criterion);
  cfg.absolute_weights = d.absolute_weights;
  cfg.seed = d.seed;
  cfg.threads = d.threads;
  return cfg;
}

ordered_json detect_echo(const DetectOpts& d) {
  ordered_json j;
  j["k"] = d.k;
  j["n_min"] = d.n_min;
  j["alpha"] = d.alpha;
  j["resamples"] = d.resamples;
  if (d.block_len > 0)
    j["block_len"] = d.block_len;
  else
    j["block_frac"] = d.block_frac;
  j["mode"] = d.mode;
  j["criterion"] = d.criterion;
  j["absolute_weights"] = d.absolute_weights;
  j["seed"] = d.seed;
  j["threads"] = ncpd::resolve_threads(d.threads);
  return j;
}

// ---------------------------------------------------------------------------
// detect

int run_detect(const InputOpts& in, const DetectOpts& d, const std::string& output_dir) {
  const ncpd::Matrix Y = load_input(in);
  if (static_cast<int>(Y.rows()) < 2 * d.n_min)
    ncpd::fail(ncpd::errc::config,
               "series has " + std::to_string(Y.rows()) + " rows; need at least 2*n_min = " +
                   std::to_string(2 * d.n_min));

  const ncpd::DetectConfig cfg = to_config(d);
  const ncpd::ChangePointReport report = ncpd::binary_segment(Y, cfg);

  ordered_json echo = detect_echo(d);
  echo["command"] = "detect";
  echo["input"] = in.path;
  echo["header"] = in.header;
  echo["delimiter"] = in.delimiter;

  const fs::path dir(output_dir);
  ncpd::write_file_atomic(dir / "report.json",
                          ncpd::report_to_json(report, echo).dump(2) + "\n");
  for (std::size_t i = 0; i < report.traces.size(); ++i) {
    const auto& seg = report.tests[i].segment;
    ncpd::write_file_atomic(dir / ("trace_" + std::to_string(seg.start) + "_" +
                                   std::to_string(seg.end) + ".csv"),
                            ncpd::trace_to_csv(report.traces[i]));
  }

  std::cout << "detected " << report.change_points.size() << " change point(s)";
  if (!report.change_points.empty()) {
    std::cout << ":";
    for (int cp : report.change_points) std::cout << ' ' << cp;
  }
  std::cout << "\nreport: " << (dir / "report.json").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

int run_simulate(int setting_id, int p, int T, int reps, int grid, const DetectOpts& d,
                 const std::string& output_dir) {
  if (reps < 1) ncpd::fail(ncpd::errc::config, "reps must be at least 1");
  const auto [dp, dT] = ncpd::setting_defaults(setting_id);
  if (p <= 0) p = dp;
  if (T <= 0) T = dT;

  std::vector<ncpd::RunEvaluation> evals;
  std::vector<int> pooled;
  std::ostringstream runs_csv;
  runs_csv << "rep,num_detected,detections,tp,fp,mod_fp\n";

  ncpd::SimSetting setting_shape;  // last repetition's schedule (same truth every rep)
  for (int rep = 0; rep < reps; ++rep) {
    auto setting_rng = ncpd::make_rng(ncpd::derive_seed(d.seed, {static_cast<std::uint64_t>(rep), 1}));
    const ncpd::SimSetting setting = ncpd::make_setting(setting_id, p, T, setting_rng);
    auto data_rng = ncpd::make_rng(ncpd::derive_seed(d.seed, {static_cast<std::uint64_t>(rep), 2}));
    const ncpd::Matrix Y = ncpd::generate(setting, data_rng);

    ncpd::DetectConfig cfg = to_config(d);
    cfg.seed = ncpd::derive_seed(d.seed, {static_cast<std::uint64_t>(rep), 3});
    const ncpd::ChangePointReport report = ncpd::binary_segment(Y, cfg);

    const ncpd::RunEvaluation ev = ncpd::evaluate(report.change_points, setting, d.n_min);
    evals.push_back(ev);
    pooled.insert(pooled.end(), report.change_points.begin(), report.change_points.end());

    runs_csv << rep << ',' << report.change_points.size() << ',';
    for (std::size_t i = 0; i < report.change_points.size(); ++i) {
      if (i) runs_csv << ';';
      runs_csv << report.change_points[i];
    }
    runs_csv << ',' << ev.matches.size() << ',' << ev.false_positives.size() << ','
             << ev.modified_false_positives.size() << '\n';
    setting_shape = setting;
  }

  const ncpd::SimMetrics metrics = ncpd::aggregate(evals, setting_shape);
  const ncpd::DensityCurve kde = ncpd::density(pooled, 0.0, 1.0, static_cast<double>(T), grid);

  std::ostringstream kde_csv;
  kde_csv << "t,density\n";
  if (!kde.empty)
    for (std::size_t i = 0; i < kde.grid.size(); ++i)
      kde_csv << format_value(kde.grid[i]) << ',' << format_value(kde.density[i]) << '\n';

  ordered_json echo = detect_echo(d);
  echo["command"] = "simulate";
  echo["setting"] = setting_id;
  echo["p"] = p;
  echo["T"] = T;
  echo["reps"] = reps;
  echo["grid"] = grid;
  echo["true_change_points"] = setting_shape.true_change_points;
  echo["kde_bandwidth"] = kde.empty ? 0.0 : kde.bandwidth;

  const fs::path dir(output_dir);
  ncpd::write_file_atomic(dir / "summary.csv", ncpd::metrics_to_csv(metrics, setting_shape, d.k));
  ncpd::write_file_atomic(dir / "runs.csv", runs_csv.str());
  ncpd::write_file_atomic(dir / "kde.csv", kde_csv.str());
  ncpd::write_file_atomic(dir / "config.json", echo.dump(2) + "\n");

  std::cout << "setting " << setting_id << " (p=" << p << ", T=" << T << ", K=" << d.k << ", "
            << reps << " reps): tp_freq=" << format_value(metrics.tp_freq)
            << " fp_freq=" << format_value(metrics.fp_freq)
            << " mod_fp_freq=" << format_value(metrics.mod_fp_freq) << '\n'
            << "summary: " << (dir / "summary.csv").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// similarity

struct NetworkSpec {
  std::string label;
  std::string path;
  int start = 0, end = 0;  // 0 = full range
};

std::vector<NetworkSpec> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) ncpd::fail(ncpd::errc::parse, "cannot open networks manifest: " + path);
  std::vector<NetworkSpec> specs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("label,", 0) == 0) continue;  // header row
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
      const auto next = line.find(',', pos);
      if (next == std::string::npos) {
        cells.push_back(line.substr(pos));
        break;
      }
      cells.push_back(line.substr(pos, next - pos));
      pos = next + 1;
    }
    if (cells.size() != 2 && cells.size() != 4)
      ncpd::fail(ncpd::errc::parse, "manifest row " + std::to_string(line_no) +
                                        " must be 'label,path' or 'label,path,start,end'");
    NetworkSpec spec;
    spec.label = cells[0];
    spec.path = cells[1];
    if (cells.size() == 4) {
      try {
        spec.start = cells[2].empty() ? 0 : std::stoi(cells[2]);
        spec.end = cells[3].empty() ? 0 : std::stoi(cells[3]);
      } catch (const std::exception&) {
        ncpd::fail(ncpd::errc::parse,
                   "manifest row " + std::to_string(line_no) + " has non-numeric bounds");
      }
    }
    specs.push_back(std::move(spec));
  }
  if (specs.size() < 2)
    ncpd::fail(ncpd::errc::config, "similarity needs at least 2 networks, got " +
                                       std::to_string(specs.size()));
  return specs;
}

int run_similarity(const std::string& manifest, const InputOpts& in_defaults, int K,
                   std::uint64_t seed, bool absolute_weights, const std::string& output_dir) {
  const auto specs = read_manifest(manifest);
  const fs::path base = fs::path(manifest).parent_path();

  std::vector<ncpd::Matrix> expansions;
  ncpd::KMeansConfig km;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    InputOpts in = in_defaults;
    fs::path p(specs[i].path);
    in.path = (p.is_absolute() ? p : base / p).string();
    const ncpd::Matrix Y = load_input(in);
    ncpd::SegmentView seg{specs[i].start > 0 ? specs[i].start : 1,
                          specs[i].end > 0 ? specs[i].end : static_cast<int>(Y.rows())};
    const ncpd::Matrix R = ncpd::correlation(Y, seg);
    const auto assignment = ncpd::spectral_clustering(
        R, K, km, ncpd::derive_seed(seed, {static_cast<std::uint64_t>(i)}), absolute_weights);
    expansions.push_back(ncpd::centroid_expand(assignment));
  }

  std::ostringstream csv;
  csv << "label";
  for (const auto& s : specs) csv << ',' << s.label;
  csv << '\n';
  for (std::size_t i = 0; i < specs.size(); ++i) {
    csv << specs[i].label;
    for (std::size_t j = 0; j < specs.size(); ++j) {
      csv << ',';
      if (j >= i)
        csv << format_value(ncpd::network_similarity(expansions[i], expansions[j]).gamma);
    }
    csv << '\n';
  }

  ordered_json echo;
  echo["command"] = "similarity";
  echo["networks"] = manifest;
  echo["k"] = K;
  echo["seed"] = seed;
  echo["absolute_weights"] = absolute_weights;

  const fs::path dir(output_dir);
  ncpd::write_file_atomic(dir / "similarity.csv", csv.str());
  ncpd::write_file_atomic(dir / "config.json", echo.dump(2) + "\n");
  std::cout << specs.size() << " networks compared\nmatrix: "
            << (dir / "similarity.csv").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// export-graph

int run_export_graph(const InputOpts& in, int start, int end, int K, double threshold,
                     const std::string& format, std::uint64_t seed, bool absolute_weights,
                     const std::string& output_dir) {
  if (threshold < 0.0)
    ncpd::fail(ncpd::errc::config, "threshold must be nonnegative");
  const ncpd::Matrix Y = load_input(in);
  const ncpd::SegmentView seg{start > 0 ? start : 1,
                              end > 0 ? end : static_cast<int>(Y.rows())};
  const ncpd::Matrix R = ncpd::correlation(Y, seg);
  ncpd::KMeansConfig km;
  const auto assignment = ncpd::spectral_clustering(R, K, km, seed, absolute_weights);

  struct Edge {
    int i, j;
    double w;
  };
  std::vector<Edge> edges;
  for (int i = 0; i < static_cast<int>(R.rows()); ++i)
    for (int j = i + 1; j < static_cast<int>(R.cols()); ++j)
      if (std::abs(R(i, j)) > threshold) edges.push_back({i + 1, j + 1, R(i, j)});

  ordered_json echo;
  echo["command"] = "export-graph";
  echo["input"] = in.path;
  echo["segment"] = {{"start", seg.start}, {"end", seg.end}};
  echo["k"] = K;
  echo["threshold"] = threshold;
  echo["format"] = format;
  echo["seed"] = seed;
  echo["absolute_weights"] = absolute_weights;

  const fs::path dir(output_dir);
  const int p = static_cast<int>(R.rows());

  if (format == "dot") {
    std::ostringstream out;
    out << "graph network {\n";
    for (int i = 0; i < p; ++i)
      out << "  n" << i + 1 << " [community=" << assignment.labels[static_cast<std::size_t>(i)]
          << "];\n";
    for (const auto& e : edges)
      out << "  n" << e.i << " -- n" << e.j << " [weight=" << format_value(e.w) << "];\n";
    out << "}\n";
    ncpd::write_file_atomic(dir / "graph.dot", out.str());
    std::cout << "graph: " << (dir / "graph.dot").string();
  } else if (format == "json") {
    ordered_json g;
    g["config"] = echo;
    auto& nodes = g["nodes"] = ordered_json::array();
    for (int i = 0; i < p; ++i)
      nodes.push_back({{"id", i + 1}, {"community", assignment.labels[static_cast<std::size_t>(i)]}});
    auto& edge_list = g["edges"] = ordered_json::array();
    for (const auto& e : edges)
      edge_list.push_back({{"source", e.i}, {"target", e.j}, {"weight", e.w}});
    ncpd::write_file_atomic(dir / "graph.json", g.dump(2) + "\n");
    std::cout << "graph: " << (dir / "graph.json").string();
  } else {  // csv: node and edge tables
    std::ostringstream nodes;
    nodes << "id,community\n";
    for (int i = 0; i < p; ++i)
      nodes << i + 1 << ',' << assignment.labels[static_cast<std::size_t>(i)] << '\n';
    std::ostringstream edge_csv;
    edge_csv << "source,target,weight\n";
    for (const auto& e : edges)
      edge_csv << e.i << ',' << e.j << ',' << format_value(e.w) << '\n';
    ncpd::write_file_atomic(dir / "nodes.csv", nodes.str());
    ncpd::write_file_atomic(dir / "edges.csv", edge_csv.str());
    std::cout << "graph: " << (dir / "nodes.csv").string() << ", "
              << (dir / "edges.csv").string();
  }
  ncpd::write_file_atomic(dir / "config.json", echo.dump(2) + "\n");
  std::cout << " (" << edges.size() << " edges)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"change-point detection in the community structure of multivariate time series"};
  app.require_subcommand(1);

  // detect
  auto* detect = app.add_subcommand("detect", "find change points in a data matrix");
  InputOpts det_in;
  DetectOpts det_opts;
  std::string det_out = ".";
  add_input_flags(detect, det_in);
  add_detect_flags(detect, det_opts, /*k_required=*/true);
  detect->add_option("--output-dir", det_out, "directory for report and traces")
      ->capture_default_str();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run a built-in synthetic experiment");
  DetectOpts sim_opts;
  int sim_setting = 0, sim_p = 0, sim_T = 0, sim_reps = 100, sim_grid = 512;
  std::string sim_out = ".";
  simulate->add_option("--setting", sim_setting, "experiment id: 1, 2 or 3")
      ->required()
      ->check(CLI::Range(1, 3));
  simulate->add_option("--p", sim_p, "node count override (0 = setting default)")
      ->capture_default_str();
  simulate->add_option("--t", sim_T, "series length override (0 = setting default)")
      ->capture_default_str();
  simulate->add_option("--reps", sim_reps, "number of repetitions")->capture_default_str();
  simulate->add_option("--grid", sim_grid, "kernel density grid size")->capture_default_str();
  add_detect_flags(simulate, sim_opts, /*k_required=*/false);
  simulate->add_option("--output-dir", sim_out, "directory for summary, runs, kde")
      ->capture_default_str();

  // similarity
  auto* similarity = app.add_subcommand("similarity", "pairwise gamma between listed networks");
  InputOpts simil_in;  // header/delimiter defaults for the listed matrices
  std::string simil_manifest, simil_out = ".";
  int simil_k = 0;
  std::uint64_t simil_seed = 0;
  bool simil_abs = false;
  similarity
      ->add_option("--networks", simil_manifest,
                   "manifest CSV: label,path[,start,end] (one network per row)")
      ->required();
  similarity->add_option("--k", simil_k, "number of communities")->required();
  similarity->add_option("--seed", simil_seed, "RNG seed")->capture_default_str();
  similarity->add_flag("--absolute-weights", simil_abs, "use |correlation| edge weights");
  similarity->add_flag("--header", simil_in.header, "listed matrices have a header row");
  similarity->add_option("--delimiter", simil_in.delimiter, "delimiter for listed matrices")
      ->capture_default_str();
  similarity->add_option("--output-dir", simil_out, "directory for similarity.csv")
      ->capture_default_str();

  // export-graph
  auto* graph = app.add_subcommand("export-graph", "thresholded correlation graph");
  InputOpts g_in;
  int g_start = 0, g_end = 0, g_k = 0;
  double g_threshold = 0.3;
  std::string g_format = "dot", g_out = ".";
  std::uint64_t g_seed = 0;
  bool g_abs = false;
  add_input_flags(graph, g_in);
  graph->add_option("--start", g_start, "segment start (default 1)")->capture_default_str();
  graph->add_option("--end", g_end, "segment end (default T)")->capture_default_str();
  graph->add_option("--k", g_k, "number of communities")->required();
  graph->add_option("--threshold", g_threshold, "edge threshold on |correlation|")
      ->capture_default_str();
  graph->add_option("--format", g_format, "output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"dot", "json", "csv"}));
  graph->add_option("--seed", g_seed, "RNG seed")->capture_default_str();
  graph->add_flag("--absolute-weights", g_abs, "use |correlation| edge weights");
  graph->add_option("--output-dir", g_out, "directory for the graph file")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage problems are configuration errors
  }

  try {
    if (detect->parsed()) return run_detect(det_in, det_opts, det_out);
    if (simulate->parsed())
      return run_simulate(sim_setting, sim_p, sim_T, sim_reps, sim_grid, sim_opts, sim_out);
    if (similarity->parsed())
      return run_similarity(simil_manifest, simil_in, simil_k, simil_seed, simil_abs, simil_out);
    if (graph->parsed())
      return run_export_graph(g_in, g_start, g_end, g_k, g_threshold, g_format, g_seed, g_abs,
                              g_out);
  } catch (const ncpd::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 4;
  }
  return 2;  // no subcommand dispatched (unreachable with require_subcommand)
}
