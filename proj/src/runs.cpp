#include "bridgelab/runs.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "bridgelab/ctmc_bridge.hpp"
#include "bridgelab/diffusion_bridge.hpp"
#include "bridgelab/error.hpp"
#include "bridgelab/io.hpp"
#include "bridgelab/pinned_poisson.hpp"
#include "bridgelab/synthesis.hpp"

namespace bridgelab {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// JSON has no inf/nan; such values are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

LatticeWindow make_window(const std::vector<int>& dims) {
  if (dims.size() != 2) throw Error(ErrorCode::ParseError, "--lattice takes W H");
  return LatticeWindow(dims[0], dims[1]);
}

int resolve_vertex(const DirectedGraph& g, const std::string& label, int fallback) {
  return label.empty() ? fallback : g.vertex(label);
}

JumpIntensity load_rates(const DirectedGraph& g, const std::string& rates_file) {
  if (rates_file.empty()) throw Error(ErrorCode::MissingRate, "--rates is required");
  return parse_rates(g, read_text_file(rates_file));
}

json eigen_json(const EigenResult& e) {
  return {{"eigenvalue", e.eigenvalue}, {"residual", e.residual}, {"iterations", e.iterations}};
}

}  // namespace

LoadedGraph load_graph(const GraphSpec& spec) {
  int sources = !spec.graph_file.empty() + !spec.lattice.empty() + !spec.tree.empty();
  if (sources != 1)
    throw Error(ErrorCode::ParseError, "give exactly one of --graph, --lattice, --tree");
  LoadedGraph out;
  if (!spec.lattice.empty()) {
    out.lattice.emplace(make_window(spec.lattice));
    out.graph = out.lattice->graph();
    out.kind = "lattice";
  } else if (!spec.tree.empty()) {
    if (spec.tree.size() != 2) throw Error(ErrorCode::ParseError, "--tree takes DELTA DEPTH");
    out.graph = regular_tree_window(spec.tree[0], spec.tree[1]);
    out.tree_delta = spec.tree[0];
    out.kind = "tree";
  } else {
    out.graph = parse_graph(read_text_file(spec.graph_file));
    out.kind = "file";
  }
  return out;
}

json to_json(const DirectedGraph& g, const CharacteristicReport& r) {
  json witnesses = json::array();
  for (const auto& w : r.witnesses) {
    witnesses.push_back({{"relation", w.relation},
                         {"walk", w.walk_text.empty() ? format_walk(g, w.walk) : w.walk_text},
                         {"lhs", number(w.lhs)},
                         {"rhs", number(w.rhs)}});
  }
  return {{"condition", to_string(r.checked_condition)},
          {"passed", r.passed},
          {"checks", r.checks},
          {"witnesses", witnesses},
          {"notes", r.notes}};
}

RunOutput run_check_lattice(const std::vector<int>& lattice, const std::string& rates_file,
                            double lambda, int margin) {
  LatticeWindow win = make_window(lattice);
  JumpIntensity j = load_rates(win.graph(), rates_file);
  auto rep = check_lattice_conditions(win, j, lambda, margin);
  RunOutput out;
  out.report = to_json(win.graph(), rep);
  out.report["lambda"] = lambda;
  out.report["margin"] = margin;
  out.exit_code = rep.passed ? 0 : 2;
  return out;
}

RunOutput run_check_tree(const GraphSpec& graph, const std::string& rates_file, double lambda,
                         const std::string& root) {
  auto lg = load_graph(graph);
  JumpIntensity j = load_rates(lg.graph, rates_file);
  auto basis = t_basis(lg.graph, spanning_tree(lg.graph, resolve_vertex(lg.graph, root, 0)));
  auto rep = check_tree_conditions(lg.graph, j, lambda, basis);
  RunOutput out;
  out.report = to_json(lg.graph, rep);
  out.report["lambda"] = lambda;
  json cycles = json::array();
  for (const auto& c : basis.chosen_cycles)
    cycles.push_back({{"id", c.id}, {"walk", format_walk(lg.graph, c.walk)}});
  out.report["basis_cycles"] = cycles;
  out.exit_code = rep.passed ? 0 : 2;
  return out;
}

RunOutput run_patch_bound(const GraphSpec& graph, const std::string& rates_file, double base,
                          int max_len) {
  auto lg = load_graph(graph);
  JumpIntensity j = load_rates(lg.graph, rates_file);
  auto rep = verify_patch_bound(lg.graph, j, base, max_len);
  RunOutput out;
  out.report = to_json(lg.graph, rep);
  out.report["base"] = base;
  out.report["max_len"] = max_len;
  out.exit_code = rep.passed ? 0 : 2;
  return out;
}

namespace {

constexpr double kSynthTolerance = 1e-9;

RunOutput finish_synth(const DirectedGraph& g, JumpIntensity j,
                       const CharacteristicPrescription& phi,
                       const std::map<std::string, Walk>& cycles, bool normalize) {
  RunOutput out;
  double err = prescription_error(g, j, phi, cycles);
  json rep = {{"vertices", g.num_vertices()},
              {"arcs", g.num_arcs()},
              {"cycles", phi.values.size()},
              {"prescription_error", err}};
  if (normalize) {
    auto n = normalize_constant_speed(g, j);
    j = n.k;
    rep["eigen"] = eigen_json(n.eigen);
    rep["normalized_prescription_error"] = prescription_error(g, j, phi, cycles);
    err = std::max(err, rep["normalized_prescription_error"].get<double>());
  }
  rep["speed"] = j.speed ? json(*j.speed) : json(nullptr);
  rep["passed"] = err <= kSynthTolerance;
  out.report = rep;
  out.extra_files["rates.txt"] = format_rates(g, j);
  out.extra_files["prescription.txt"] = format_prescription(phi);
  out.exit_code = err <= kSynthTolerance ? 0 : 2;
  return out;
}

}  // namespace

RunOutput run_synth_lattice(const SynthOptions& opt) {
  if (opt.graph.lattice.empty()) throw Error(ErrorCode::ParseError, "synth lattice needs --lattice");
  LatticeWindow win = make_window(opt.graph.lattice);
  CharacteristicPrescription phi;
  if (opt.random) {
    std::mt19937_64 rng(opt.seed);
    phi = random_lattice_prescription(win, opt.lambda, rng);
  } else {
    if (opt.prescription_file.empty())
      throw Error(ErrorCode::PrescriptionIncomplete, "give --prescription or --random");
    phi = parse_prescription(win.graph(), read_text_file(opt.prescription_file),
                             PrescriptionDomain::LatticeFacesAndEdges);
  }
  JumpIntensity j = synth_lattice(win, phi);
  auto out = finish_synth(win.graph(), j, phi, lattice_cycles(win), opt.normalize);
  if (opt.random) {
    auto rep = check_lattice_conditions(win, j, opt.lambda);
    out.report["conditions"] = to_json(win.graph(), rep);
    if (!rep.passed) out.exit_code = 2;
  }
  return out;
}

RunOutput run_synth_basis(const SynthOptions& opt) {
  auto lg = load_graph(opt.graph);
  const auto& g = lg.graph;
  auto basis = t_basis(g, spanning_tree(g, resolve_vertex(g, opt.root, 0)));
  CharacteristicPrescription phi;
  if (opt.random) {
    std::mt19937_64 rng(opt.seed);
    phi = random_tree_prescription(g, basis, opt.lambda, rng);
  } else {
    if (opt.prescription_file.empty())
      throw Error(ErrorCode::PrescriptionIncomplete, "give --prescription or --random");
    phi = parse_prescription(g, read_text_file(opt.prescription_file),
                             PrescriptionDomain::TreeBasis);
  }
  JumpIntensity j = synth_basis(g, basis, phi);
  auto out = finish_synth(g, j, phi, basis_cycles(basis), opt.normalize);
  if (opt.random) {
    auto rep = check_tree_conditions(g, j, opt.lambda, basis);
    out.report["conditions"] = to_json(g, rep);
    if (!rep.passed) out.exit_code = 2;
  }
  return out;
}

RunOutput run_pinned_tail(int k, double phi, int r_max) {
  if (r_max < 0) throw Error(ErrorCode::RangeTooSmall, "--r-max must be >= 0");
  auto dist = rho(k, phi);
  T70Envelope env(k, phi);
  const double mean = dist.mean();
  CsvTable csv({"R", "exact_log_tail", "herbst_log_bound", "t70_log_envelope"});
  bool passed = true;
  json violations = json::array();
  for (int R = 0; R <= r_max; ++R) {
    double exact = dist.log_tail(mean + R);
    double herbst = herbst_log_bound(env.lambda_mlsi(), R);
    double t70 = R >= env.threshold() ? env.log_bound(R) : kNaN;
    if (std::isfinite(t70) && exact > t70 + 1e-12) {
      passed = false;
      violations.push_back({{"R", R}, {"exact_log_tail", exact}, {"t70_log_envelope", t70}});
    }
    csv.add_row({double(R), exact, herbst, t70});
  }
  RunOutput out;
  out.csv = csv.str();
  out.report = {{"k", k},
                {"phi", phi},
                {"mean", mean},
                {"support_cut", dist.support_cut},
                {"norm_error", dist.norm_error},
                {"threshold", env.threshold()},
                {"lambda_mlsi", env.lambda_mlsi()},
                {"passed", passed},
                {"violations", violations}};
  out.exit_code = passed ? 0 : 2;
  return out;
}

RunOutput run_pinned_mlsi(int k, double phi, int m_max) {
  auto rep = mlsi_machinery(k, phi, m_max);
  CsvTable csv({"m", "c", "c_tilde"});
  for (size_t m = 0; m < rep.c_tilde.size(); ++m)
    csv.add_row({double(m), rep.c[m], rep.c_tilde[m]});
  RunOutput out;
  out.csv = csv.str();
  out.report = {{"k", rep.k},
                {"phi", rep.phi},
                {"delta", rep.delta},
                {"delta_asymptote", rep.delta_asymptote},
                {"block_asymptote", rep.block_asymptote},
                {"epsilon", rep.epsilon},
                {"direct_constant", number(rep.direct_constant)},
                {"structural_constant", number(rep.structural_constant)},
                {"mlsi_constant", number(rep.mlsi_constant)},
                {"passed", true}};
  return out;
}

RunOutput run_bridge_ctmc(const CtmcOptions& opt) {
  if (!(opt.t > 0 && opt.t < 1)) throw Error(ErrorCode::DomainError, "--t must lie in (0,1)");
  if (!(opt.lambda > 0)) throw Error(ErrorCode::DomainError, "--lambda must be positive");
  auto lg = load_graph(opt.graph);
  const auto& g = lg.graph;

  JumpIntensity j;
  if (!opt.rates_file.empty())
    j = load_rates(g, opt.rates_file);
  else
    j = JumpIntensity(g, lg.kind == "tree" ? opt.lambda / lg.tree_delta : opt.lambda);

  std::vector<double> exit;
  if (opt.open_boundary) {
    if (opt.normalize) throw Error(ErrorCode::DomainError, "--normalize needs --boundary closed");
    if (lg.lattice) {
      exit.resize(g.num_vertices());
      for (int v = 0; v < g.num_vertices(); ++v) exit[v] = lg.lattice->exit_rate(v, opt.lambda);
    } else if (lg.kind == "tree") {
      exit = regular_tree_exit_rates(g, lg.tree_delta, opt.lambda);
    } else {
      throw Error(ErrorCode::DomainError, "--boundary open needs --lattice or --tree");
    }
  }
  json rep;
  if (opt.normalize) {
    auto n = normalize_constant_speed(g, j);
    j = n.k;
    rep["eigen"] = eigen_json(n.eigen);
  }

  int fallback = 0;
  if (lg.lattice) fallback = lg.lattice->vertex(lg.lattice->width() / 2, lg.lattice->height() / 2);
  const int x = resolve_vertex(g, opt.from, fallback);
  const int y = resolve_vertex(g, opt.to, x);

  UniformizedChain chain(g, j, exit);
  auto marginal = bridge_marginal(chain, x, y, opt.t);
  auto exact = distance_log_tail(g, marginal.pmf, x, opt.r_max);

  std::vector<TailPoint> empirical;
  if (opt.paths > 0) {
    auto paths = sample_bridge_paths(g, j, x, y, opt.paths, opt.seed, exit, opt.workers);
    empirical = distance_log_tail(g, empirical_marginal(paths, opt.t, g.num_vertices()), x,
                                  opt.r_max);
  }

  // Sampled tails must agree with the exact ones up to binomial noise.
  constexpr double kZLimit = 5;
  double max_z = 0;
  CsvTable csv({"R", "exact_log_tail", "empirical_log_tail", "envelope", "residual"});
  for (int R = 0; R <= opt.r_max; ++R) {
    double ex = exact[R].log_tail;
    double em = empirical.empty() ? kNaN : empirical[R].log_tail;
    double env = kNaN;
    if (lg.kind == "lattice") env = lattice_envelope(opt.lambda, opt.t, R);
    if (lg.kind == "tree") env = tree_envelope(opt.lambda, lg.tree_delta, opt.t, R);
    if (!empirical.empty()) {
      double p = std::exp(ex);
      double q = std::isfinite(em) ? std::exp(em) : 0.0;
      double sd = std::sqrt(std::max(p * (1 - p), 0.0) / opt.paths);
      if (sd > 0) max_z = std::max(max_z, std::abs(q - p) / sd);
      else if (q != p) max_z = std::numeric_limits<double>::infinity();
    }
    csv.add_row({double(R), ex, em, env, ex - env});
  }

  rep["graph"] = lg.kind;
  rep["vertices"] = g.num_vertices();
  rep["from"] = g.label(x);
  rep["to"] = g.label(y);
  rep["t"] = opt.t;
  rep["lambda"] = opt.lambda;
  rep["boundary"] = opt.open_boundary ? "open" : "closed";
  rep["uniformization_rate"] = chain.rate();
  rep["p1"] = marginal.p1;
  rep["leak"] = marginal.leak;
  rep["speed"] = j.speed ? json(*j.speed) : json(nullptr);
  rep["paths"] = opt.paths;
  rep["seed"] = opt.seed;
  rep["max_z_score"] = number(max_z);
  rep["passed"] = max_z <= kZLimit;

  RunOutput out;
  out.csv = csv.str();
  out.report = rep;
  out.exit_code = max_z <= kZLimit ? 0 : 2;
  return out;
}

RunOutput run_bridge_diffusion(const DiffusionOptions& opt) {
  const int d = opt.dim;
  if (d < 1) throw Error(ErrorCode::DimensionTooSmall, "--dim must be >= 1");
  auto endpoint = [d](const std::vector<double>& v, const char* name) {
    if (v.size() == 1) return Eigen::VectorXd::Constant(d, v[0]).eval();
    if (static_cast<int>(v.size()) != d)
      throw Error(ErrorCode::ParseError, std::string(name) + " needs 1 or dim values");
    return Eigen::Map<const Eigen::VectorXd>(v.data(), d).eval();
  };
  Eigen::VectorXd x = endpoint(opt.x, "--x");
  Eigen::VectorXd y = endpoint(opt.y, "--y");

  auto p = make_potential(opt.potential, opt.alpha, opt.eps, d);
  validate_potential(p, opt.seed);

  Box box{Eigen::VectorXd::Constant(d, -opt.box_half_width),
          Eigen::VectorXd::Constant(d, opt.box_half_width)};
  int grid_n = opt.grid_n > 0 ? opt.grid_n : (d <= 2 ? 16 : 8);
  auto e17 = check_condition_e17(script_u(p), opt.alpha, box, grid_n);

  std::vector<double> r_grid = opt.r_grid;
  if (r_grid.empty())
    for (int i = 1; i <= 30; ++i) r_grid.push_back(0.1 * i);

  SamplerOptions so;
  so.steps = opt.steps;
  so.n_paths = opt.paths;
  so.seed = opt.seed;
  so.box = box;
  so.workers = opt.workers;
  auto acc = accordeon_check(
      p, opt.alpha, x, y, [](const Eigen::VectorXd& z) { return z[0]; }, opt.t, r_grid, so);

  CsvTable csv({"R", "empirical_log_tail", "gaussian_envelope", "sigma_log", "exceedances",
                "checked"});
  json violations = json::array();
  for (const auto& row : acc.rows) {
    csv.add_row({row.R, row.empirical_log_tail, row.gaussian_envelope, row.sigma_log,
                 double(row.exceedances), row.checked ? 1.0 : 0.0});
    if (!row.passed) violations.push_back({{"R", row.R}, {"empirical_log_tail", row.empirical_log_tail}});
  }

  json witness = json::array();
  for (int i = 0; i < e17.witness_z.size(); ++i) witness.push_back(e17.witness_z[i]);
  RunOutput out;
  out.csv = csv.str();
  out.report = {{"potential", p.name},
                {"alpha", opt.alpha},
                {"dim", d},
                {"t", opt.t},
                {"seed", opt.seed},
                {"M", opt.steps},
                {"paths", opt.paths},
                {"gamma", acc.gamma},
                {"mean_f", acc.mean_f},
                {"ess", acc.effective_sample_size},
                {"box_leak_fraction", acc.box_leak_fraction},
                {"e17",
                 {{"passed", e17.passed},
                  {"threshold", e17.threshold},
                  {"min_eigenvalue", e17.min_eigenvalue},
                  {"witness_t", e17.witness_t},
                  {"witness_z", witness},
                  {"points", e17.points}}},
                {"accordeon_passed", acc.passed},
                {"violations", violations},
                {"passed", e17.passed && acc.passed}};
  out.exit_code = e17.passed && acc.passed ? 0 : 2;
  return out;
}

RunOutput run_report(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::ParseError, "no directory '" + dir + "'");
  std::vector<fs::path> manifests;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.size() > 14 && name.ends_with(".manifest.json")) manifests.push_back(entry.path());
  }
  std::sort(manifests.begin(), manifests.end());

  json runs = json::array();
  int failed = 0;
  CsvTable csv({"run", "exit_code"});
  for (size_t i = 0; i < manifests.size(); ++i) {
    json m;
    try {
      m = json::parse(read_text_file(manifests[i].string()));
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::ParseError, manifests[i].string() + ": " + ex.what());
    }
    int code = m.value("exit_code", 1);
    if (code != 0) ++failed;
    runs.push_back({{"manifest", manifests[i].filename().string()},
                    {"command", m.value("command", "")},
                    {"exit_code", code}});
    csv.add_row({double(i), double(code)});
  }
  RunOutput out;
  out.csv = csv.str();
  out.report = {{"directory", dir}, {"runs", runs}, {"failed", failed}, {"passed", failed == 0}};
  out.exit_code = failed == 0 ? 0 : 2;
  return out;
}

}  // namespace bridgelab
