#pragma once

#include <cstdint>
#include <map>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "bridgelab/characteristics.hpp"
#include "bridgelab/graph.hpp"
#include "bridgelab/windows.hpp"

namespace bridgelab {

/// What one command produces. The CLI writes report as <stem>.json, csv as
/// <stem>.csv and every extra file under its own name.
struct RunOutput {
  int exit_code = 0;  // 0 pass, 2 condition or bound failure
  nlohmann::json report;
  std::string csv;
  std::map<std::string, std::string> extra_files;
};

/// Exactly one source should be set.
struct GraphSpec {
  std::string graph_file;
  std::vector<int> lattice;  // width height
  std::vector<int> tree;     // Delta depth
};

struct LoadedGraph {
  DirectedGraph graph;
  std::optional<LatticeWindow> lattice;
  int tree_delta = 0;
  std::string kind;  // "lattice", "tree" or "file"
};

LoadedGraph load_graph(const GraphSpec& spec);

nlohmann::json to_json(const DirectedGraph& g, const CharacteristicReport& r);

RunOutput run_check_lattice(const std::vector<int>& lattice, const std::string& rates_file,
                            double lambda, int margin);
RunOutput run_check_tree(const GraphSpec& graph, const std::string& rates_file, double lambda,
                         const std::string& root);
RunOutput run_patch_bound(const GraphSpec& graph, const std::string& rates_file, double base,
                          int max_len);

struct SynthOptions {
  GraphSpec graph;
  std::string prescription_file;
  bool random = false;
  double lambda = 1;
  std::uint64_t seed = 1;
  bool normalize = false;
  std::string root;
};

RunOutput run_synth_lattice(const SynthOptions& opt);
RunOutput run_synth_basis(const SynthOptions& opt);

/// CSV (R, exact_log_tail, herbst_log_bound, t70_log_envelope) with
/// exact_log_tail = log P(n - E n >= R) under rho_Phi, R = 0..r_max; exit 2 if
/// the envelope is beaten.
RunOutput run_pinned_tail(int k, double phi, int r_max);
RunOutput run_pinned_mlsi(int k, double phi, int m_max);

struct CtmcOptions {
  GraphSpec graph;
  std::string rates_file;
  double lambda = 1;
  bool open_boundary = false;
  bool normalize = false;
  std::string from;
  std::string to;
  double t = 0.5;
  long long paths = 100000;
  std::uint64_t seed = 1;
  int r_max = 12;
  int workers = 0;
};

/// CSV (R, exact_log_tail, empirical_log_tail, envelope, residual) of
/// d(X_t, from) under the bridge, plus a JSON summary.
RunOutput run_bridge_ctmc(const CtmcOptions& opt);

struct DiffusionOptions {
  std::string potential = "ou";
  double alpha = 1;
  double eps = 0.1;
  int dim = 1;
  std::vector<double> x{0.0};
  std::vector<double> y{0.0};
  double t = 0.5;
  int steps = 200;
  long long paths = 100000;
  std::uint64_t seed = 1;
  std::vector<double> r_grid;
  double box_half_width = 6;
  int grid_n = 0;
  int workers = 0;
};

/// CSV (R, empirical_log_tail, gaussian_envelope, sigma_log, exceedances,
/// checked) for f = first coordinate; exit 2 if the Hessian condition or
/// the envelope fails.
RunOutput run_bridge_diffusion(const DiffusionOptions& opt);

/// Summary of every *.manifest.json in dir; exit 2 if any run failed.
RunOutput run_report(const std::string& dir);

}  // namespace bridgelab
