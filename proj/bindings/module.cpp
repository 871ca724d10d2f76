// Python bindings for the ncpd core: matrix ingestion, spectral pipeline,
// gamma criterion, resampling, full detection, and the synthetic generator.
//
// Matrices cross the boundary as numpy float64 arrays (copied). detect() and
// generate() release the GIL while the C++ side runs.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ncpd/cluster.hpp"
#include "ncpd/criterion.hpp"
#include "ncpd/data.hpp"
#include "ncpd/detection.hpp"
#include "ncpd/inference.hpp"
#include "ncpd/parallel.hpp"
#include "ncpd/report.hpp"
#include "ncpd/rng.hpp"
#include "ncpd/simulation.hpp"
#include "ncpd/spectral.hpp"

namespace py = pybind11;

namespace {

char parse_delimiter(const std::string& d) {
  if (d == "tab" || d == "\\t") return '\t';
  if (d.size() == 1) return d[0];
  ncpd::fail(ncpd::errc::config, "delimiter must be a single character or \"tab\"");
}

py::dict assignment_to_dict(const ncpd::ClusterAssignment& a) {
  py::dict d;
  d["labels"] = a.labels;
  d["centroids"] = a.centroids;
  d["objective"] = a.objective;
  d["converged"] = a.converged;
  return d;
}

ncpd::KMeansConfig kmeans_config(int restarts, int max_iters, double tol) {
  ncpd::KMeansConfig cfg;
  cfg.restarts = restarts;
  cfg.max_iters = max_iters;
  cfg.tol = tol;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Change-point detection in the community structure of multivariate time series";
  m.attr("__version__") = "0.1.0";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ncpd::error& e) {
      switch (e.code()) {
        case ncpd::errc::config:
        case ncpd::errc::bounds:
        case ncpd::errc::dimension:
        case ncpd::errc::parse:
          PyErr_SetString(PyExc_ValueError, e.what());
          break;
        default:
          PyErr_SetString(PyExc_RuntimeError, e.what());
      }
    }
  });

  m.def(
      "load_matrix",
      [](const std::string& path, const std::string& delimiter, bool header) {
        ncpd::LoadOptions opts;
        opts.delimiter = parse_delimiter(delimiter);
        opts.header = header;
        return ncpd::load_matrix(path, opts);
      },
      py::arg("path"), py::arg("delimiter") = ",", py::arg("header") = false,
      "Read a T x p matrix from delimited text; rows are time points.");

  m.def(
      "correlation", [](const ncpd::Matrix& y) { return ncpd::correlation(y); }, py::arg("y"),
      "Pearson correlation of the rows of y: symmetric, unit diagonal, clamped to [-1, 1].");

  m.def("laplacian", &ncpd::laplacian, py::arg("a"),
        "Graph Laplacian D - A of a symmetric adjacency matrix.");

  m.def(
      "embed",
      [](const ncpd::Matrix& l, int k) {
        const ncpd::Embedding e = ncpd::embed(l, k);
        return py::make_tuple(e.vectors, e.eigenvalues);
      },
      py::arg("l"), py::arg("k"),
      "(vectors, eigenvalues) for the k smallest Laplacian eigenvalues.");

  m.def(
      "kmeans",
      [](const ncpd::Matrix& points, int k, std::uint64_t seed, int restarts, int max_iters,
         double tol) {
        return assignment_to_dict(ncpd::kmeans(points, k, kmeans_config(restarts, max_iters, tol), seed));
      },
      py::arg("points"), py::arg("k"), py::arg("seed") = 0, py::arg("restarts") = 10,
      py::arg("max_iters") = 100, py::arg("tol") = 1e-8,
      "k-means++ / Lloyd clustering; returns labels (1-based), centroids, objective, converged.");

  m.def(
      "spectral_clustering",
      [](const ncpd::Matrix& a, int k, std::uint64_t seed, int restarts, int max_iters, double tol,
         bool absolute_weights) {
        return assignment_to_dict(ncpd::spectral_clustering(
            a, k, kmeans_config(restarts, max_iters, tol), seed, absolute_weights));
      },
      py::arg("a"), py::arg("k"), py::arg("seed") = 0, py::arg("restarts") = 10,
      py::arg("max_iters") = 100, py::arg("tol") = 1e-8, py::arg("absolute_weights") = false,
      "laplacian -> embed -> kmeans on an adjacency matrix.");

  m.def(
      "centroid_expand",
      [](const std::vector<int>& labels, const ncpd::Matrix& centroids) {
        ncpd::ClusterAssignment a;
        a.labels = labels;
        a.centroids = centroids;
        return ncpd::centroid_expand(a);
      },
      py::arg("labels"), py::arg("centroids"),
      "p x K matrix whose row i is the centroid of node i's community.");

  m.def(
      "gamma",
      [](const ncpd::Matrix& ul, const ncpd::Matrix& ur) {
        const ncpd::CriterionValue v = ncpd::gamma_similarity(ul, ur);
        return py::make_tuple(v.gamma, v.singular_values);
      },
      py::arg("ul"), py::arg("ur"),
      "(gamma, singular_values) of ul^T ur; small gamma = dissimilar structure.");

  m.def(
      "stationary_resample",
      [](const ncpd::Matrix& segment, double block_prob, std::uint64_t seed) {
        auto rng = ncpd::make_rng(seed);
        return ncpd::stationary_resample(segment, block_prob, rng);
      },
      py::arg("segment"), py::arg("block_prob"), py::arg("seed") = 0,
      "Stationary bootstrap pseudo-sample of the segment's rows.");

  m.def(
      "permutation_resample",
      [](const ncpd::Matrix& segment, std::uint64_t seed) {
        auto rng = ncpd::make_rng(seed);
        return ncpd::permutation_resample(segment, rng);
      },
      py::arg("segment"), py::arg("seed") = 0,
      "Uniformly random row permutation of the segment.");

  m.def("stationary_indices", &ncpd::stationary_indices, py::arg("t"), py::arg("blocks"),
        "1-based rows selected by explicit (start, length) blocks with wraparound.");

  m.def(
      "detect_json",
      [](const ncpd::Matrix& y, int k, int n_min, double alpha, int resamples,
         int mean_block_length, double block_frac, const std::string& mode,
         const std::string& criterion, bool absolute_weights, std::uint64_t seed, int threads) {
        ncpd::DetectConfig cfg;
        cfg.K = k;
        cfg.n_min = n_min;
        cfg.alpha = alpha;
        cfg.resamples = resamples;
        cfg.mean_block_length = mean_block_length;
        cfg.block_frac = block_frac;
        cfg.mode = ncpd::resample_mode_from_string(mode);
        cfg.basis = ncpd::criterion_basis_from_string(criterion);
        cfg.absolute_weights = absolute_weights;
        cfg.seed = seed;
        cfg.threads = threads;

        ncpd::ChangePointReport report;
        {
          py::gil_scoped_release release;
          report = ncpd::binary_segment(y, cfg);
        }

        nlohmann::ordered_json echo;
        echo["k"] = cfg.K;
        echo["n_min"] = cfg.n_min;
        echo["alpha"] = cfg.alpha;
        echo["resamples"] = cfg.resamples;
        if (cfg.mean_block_length > 0)
          echo["block_len"] = cfg.mean_block_length;
        else
          echo["block_frac"] = cfg.block_frac;
        echo["mode"] = ncpd::to_string(cfg.mode);
        echo["criterion"] = ncpd::to_string(cfg.basis);
        echo["absolute_weights"] = cfg.absolute_weights;
        echo["seed"] = cfg.seed;
        echo["threads"] = ncpd::resolve_threads(cfg.threads);
        return ncpd::report_to_json(report, echo).dump(2);
      },
      py::arg("y"), py::arg("k") = 3, py::arg("n_min") = 50, py::arg("alpha") = 0.05,
      py::arg("resamples") = 1000, py::arg("block_len") = 0, py::arg("block_frac") = 0.2,
      py::arg("mode") = "stationary", py::arg("criterion") = "embedding",
      py::arg("absolute_weights") = false, py::arg("seed") = 0, py::arg("threads") = 0,
      "Full binary-segmentation search; returns the report as a JSON string.");

  m.def(
      "generate",
      [](int setting, int p, int t, std::uint64_t seed) {
        if (p == 0 || t == 0) {
          const auto [dp, dt] = ncpd::setting_defaults(setting);
          if (p == 0) p = dp;
          if (t == 0) t = dt;
        }
        auto shuffle_rng = ncpd::make_rng(ncpd::derive_seed(seed, {1}));
        const ncpd::SimSetting s = ncpd::make_setting(setting, p, t, shuffle_rng);
        ncpd::Matrix y;
        {
          py::gil_scoped_release release;
          auto data_rng = ncpd::make_rng(ncpd::derive_seed(seed, {2}));
          y = ncpd::generate(s, data_rng);
        }
        py::dict d;
        d["y"] = y;
        d["true_change_points"] = s.true_change_points;
        d["regimes"] = s.regimes;
        d["within"] = s.within;
        d["between"] = s.between;
        d["rule"] = s.rule == ncpd::BetweenRule::constant ? "constant" : "geometric";
        return d;
      },
      py::arg("setting"), py::arg("p") = 0, py::arg("t") = 0, py::arg("seed") = 0,
      "Draw one synthetic series (settings 1-3); p/t of 0 use the setting defaults.");

  m.def(
      "regime_covariance",
      [](const std::vector<int>& labels, double within, double between, const std::string& rule) {
        ncpd::BetweenRule r;
        if (rule == "constant")
          r = ncpd::BetweenRule::constant;
        else if (rule == "geometric")
          r = ncpd::BetweenRule::geometric;
        else
          ncpd::fail(ncpd::errc::config, "rule must be constant or geometric");
        return ncpd::regime_covariance(labels, within, between, r);
      },
      py::arg("labels"), py::arg("within") = 0.75, py::arg("between") = 0.20,
      py::arg("rule") = "constant", "Covariance matrix implied by one regime's labels.");
}
