#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "bridgelab/error.hpp"
#include "bridgelab/io.hpp"
#include "bridgelab/parallel.hpp"
#include "bridgelab/runs.hpp"

namespace bl = bridgelab;
using nlohmann::json;

namespace {

struct Common {
  std::string out_dir = ".";
  std::string stem;
  int workers = 0;
};

void add_graph_options(CLI::App* app, bl::GraphSpec& g) {
  auto* file = app->add_option("--graph", g.graph_file, "Arc list file, one \"src dst\" per line");
  auto* lat = app->add_option("--lattice", g.lattice, "Lattice window W H")->expected(2);
  auto* tree = app->add_option("--tree", g.tree, "Regular tree ball DELTA DEPTH")->expected(2);
  file->excludes(lat)->excludes(tree);
  lat->excludes(tree);
}

void add_common(CLI::App* app, Common& c, bool parallel = false) {
  app->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
  app->add_option("--stem", c.stem, "Output file stem (default: command name)");
  if (parallel)
    app->add_option("--workers", c.workers, "Worker threads (0: BRIDGELAB_WORKERS or all cores)")
        ->capture_default_str();
}

// Every option of the leaf command with its resolved value.
json resolved_config(const CLI::App* app) {
  json cfg = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    std::vector<std::string> values;
    if (opt->count() > 0) {
      values = opt->reduced_results();
    } else {
      std::string def = opt->get_default_str();
      if (!def.empty()) {
        // Vector defaults render as "[a,b]".
        if (def.front() == '[' && def.back() == ']') def = def.substr(1, def.size() - 2);
        std::stringstream ss(def);
        for (std::string v; std::getline(ss, v, ',');) values.push_back(v);
      }
    }
    if (values.empty())
      cfg[name] = nullptr;
    else if (values.size() == 1 && opt->get_expected_max() <= 1)
      cfg[name] = values[0];
    else
      cfg[name] = values;
  }
  return cfg;
}

void emit(const bl::RunOutput& out, const CLI::App* leaf, const std::string& command,
          const Common& c, int workers) {
  namespace fs = std::filesystem;
  std::string stem = c.stem;
  if (stem.empty()) {
    stem = command;
    std::replace(stem.begin(), stem.end(), ' ', '-');
  }
  const fs::path dir(c.out_dir);
  json outputs = json::array();
  auto put = [&](const std::string& name, const std::string& content) {
    bl::write_file_atomic((dir / name).string(), content);
    outputs.push_back(name);
  };
  if (!out.csv.empty()) put(stem + ".csv", out.csv);
  put(stem + ".json", out.report.dump(2) + "\n");
  for (const auto& [suffix, content] : out.extra_files) put(stem + "." + suffix, content);

  json manifest = {{"command", command},
                   {"version", bl::kVersion},
                   {"config", resolved_config(leaf)},
                   {"workers", workers},
                   {"outputs", outputs},
                   {"exit_code", out.exit_code}};
  bl::write_file_atomic((dir / (stem + ".manifest.json")).string(), manifest.dump(2) + "\n");
  std::cout << out.report.dump(2) << "\n";
}

// Splices "key = value" lines of the --config file into argv right after the
// subcommand tokens, so flags given on the command line come later and win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string file;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (file.empty()) return args;

  size_t insert_at = 1;
  if (args.size() > 1) insert_at = args[1] == "report" ? 2 : std::min<size_t>(3, args.size());
  std::vector<std::string> injected;
  for (const auto& [key, value] : bl::parse_config(bl::read_text_file(file))) {
    if (value == "true" || value == "false") {
      if (value == "true") injected.push_back("--" + key);
      continue;
    }
    injected.push_back("--" + key);
    std::stringstream ss(value);
    for (std::string tok; ss >> tok;) injected.push_back(tok);
  }
  args.insert(args.begin() + insert_at, injected.begin(), injected.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reciprocal characteristics, bridge sampling and concentration checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bl::kVersion));
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--config", "Flat key=value file; command-line flags override it");

  Common common;
  std::function<bl::RunOutput()> action;
  CLI::App* leaf = nullptr;
  std::string command;
  bool parallel = false;
  auto bind = [&](CLI::App* sub, std::string name, std::function<bl::RunOutput()> fn,
                  bool uses_workers = false) {
    add_common(sub, common, uses_workers);
    sub->callback([&, sub, name, fn, uses_workers] {
      leaf = sub;
      command = name;
      action = fn;
      parallel = uses_workers;
    });
  };

  // characteristics
  auto* chars = app.add_subcommand("characteristics", "Check closed-walk conditions");
  chars->require_subcommand(1);

  std::vector<int> cl_lattice;
  std::string cl_rates;
  double cl_lambda = 1;
  int cl_margin = 0;
  auto* cl = chars->add_subcommand("check-lattice", "Two-cycle and face conditions on a window");
  cl->add_option("--lattice", cl_lattice, "Lattice window W H")->expected(2)->required();
  cl->add_option("--rates", cl_rates, "Rates file, \"src dst rate\" per line")->required();
  cl->add_option("--lambda", cl_lambda, "Reference rate")->capture_default_str();
  cl->add_option("--margin", cl_margin, "Skip cycles closer than this to the boundary")
      ->capture_default_str();
  bind(cl, "characteristics check-lattice",
       [&] { return bl::run_check_lattice(cl_lattice, cl_rates, cl_lambda, cl_margin); });

  bl::GraphSpec ct_graph;
  std::string ct_rates, ct_root;
  double ct_lambda = 1;
  auto* ct = chars->add_subcommand("check-tree", "Tree-basis conditions");
  add_graph_options(ct, ct_graph);
  ct->add_option("--rates", ct_rates, "Rates file")->required();
  ct->add_option("--lambda", ct_lambda, "Reference rate")->capture_default_str();
  ct->add_option("--root", ct_root, "Root label of the BFS tree (default: first vertex)");
  bind(ct, "characteristics check-tree",
       [&] { return bl::run_check_tree(ct_graph, ct_rates, ct_lambda, ct_root); });

  bl::GraphSpec cp_graph;
  std::string cp_rates;
  double cp_base = 1;
  int cp_len = 10;
  auto* cp = chars->add_subcommand("patch", "Brute-force Phi(c) <= base^len(c) on simple cycles");
  add_graph_options(cp, cp_graph);
  cp->add_option("--rates", cp_rates, "Rates file")->required();
  cp->add_option("--base", cp_base, "Per-step bound")->required();
  cp->add_option("--max-len", cp_len, "Longest cycle")->capture_default_str();
  bind(cp, "characteristics patch",
       [&] { return bl::run_patch_bound(cp_graph, cp_rates, cp_base, cp_len); });

  // synth
  auto* synth = app.add_subcommand("synth", "Rates with prescribed characteristics");
  synth->require_subcommand(1);
  auto synth_options = [](CLI::App* sub, bl::SynthOptions& o) {
    auto* file = sub->add_option("--prescription", o.prescription_file, "Prescription file");
    auto* rnd = sub->add_flag("--random", o.random, "Random compliant prescription")
                    ->default_str("false");
    file->excludes(rnd);
    sub->add_option("--lambda", o.lambda, "Reference rate for --random")->capture_default_str();
    sub->add_option("--seed", o.seed, "Seed for --random")->capture_default_str();
    sub->add_flag("--normalize", o.normalize, "Gauge to constant speed")->default_str("false");
  };
  bl::SynthOptions sl;
  auto* sl_app = synth->add_subcommand("lattice", "Faces and two-cycles of a lattice window");
  sl_app->add_option("--lattice", sl.graph.lattice, "Lattice window W H")->expected(2)->required();
  synth_options(sl_app, sl);
  bind(sl_app, "synth lattice", [&] { return bl::run_synth_lattice(sl); });

  bl::SynthOptions sb;
  auto* sb_app = synth->add_subcommand("basis", "Tree basis of closed walks");
  add_graph_options(sb_app, sb.graph);
  sb_app->add_option("--root", sb.root, "Root label of the BFS tree");
  synth_options(sb_app, sb);
  bind(sb_app, "synth basis", [&] { return bl::run_synth_basis(sb); });

  // pinned-poisson
  auto* pp = app.add_subcommand("pinned-poisson", "Pinned Poisson law and its tail bounds");
  pp->require_subcommand(1);
  int pt_k = 1, pt_r = 20;
  double pt_phi = 1;
  auto* pt = pp->add_subcommand("tail", "Exact tail against the Herbst and envelope bounds");
  pt->add_option("--k", pt_k, "Pinning ratio")->required();
  pt->add_option("--phi", pt_phi, "Characteristic")->required();
  pt->add_option("--r-max", pt_r, "Largest R")->capture_default_str();
  bind(pt, "pinned-poisson tail", [&] { return bl::run_pinned_tail(pt_k, pt_phi, pt_r); });

  int pm_k = 1, pm_m = 0;
  double pm_phi = 1;
  auto* pm = pp->add_subcommand("mlsi", "Modified log-Sobolev constant");
  pm->add_option("--k", pm_k, "Pinning ratio")->required();
  pm->add_option("--phi", pm_phi, "Characteristic")->required();
  pm->add_option("--m-max", pm_m, "Range of the ratio check (0: automatic)")->capture_default_str();
  bind(pm, "pinned-poisson mlsi", [&] { return bl::run_pinned_mlsi(pm_k, pm_phi, pm_m); });

  // bridge
  auto* bridge = app.add_subcommand("bridge", "Bridge tails against concentration envelopes");
  bridge->require_subcommand(1);
  bl::CtmcOptions bc;
  std::string boundary = "closed";
  auto* bc_app = bridge->add_subcommand("ctmc", "Random-walk bridge on a graph");
  add_graph_options(bc_app, bc.graph);
  bc_app->add_option("--rates", bc.rates_file, "Rates file (default: uniform walk)");
  bc_app->add_option("--lambda", bc.lambda, "Reference rate")->capture_default_str();
  bc_app->add_option("--boundary", boundary, "Window boundary")
      ->check(CLI::IsMember({"open", "closed"}))
      ->capture_default_str();
  bc_app->add_flag("--normalize", bc.normalize, "Gauge the rates to constant speed")
      ->default_str("false");
  bc_app->add_option("--from", bc.from, "Start label (default: window centre or first vertex)");
  bc_app->add_option("--to", bc.to, "End label (default: --from)");
  bc_app->add_option("--t", bc.t, "Marginal time in (0,1)")->capture_default_str();
  bc_app->add_option("--paths", bc.paths, "Sampled paths (0: exact only)")->capture_default_str();
  bc_app->add_option("--seed", bc.seed, "Seed")->capture_default_str();
  bc_app->add_option("--r-max", bc.r_max, "Largest distance")->capture_default_str();
  bind(
      bc_app, "bridge ctmc",
      [&] {
        bc.open_boundary = boundary == "open";
        bc.workers = common.workers;
        return bl::run_bridge_ctmc(bc);
      },
      true);

  auto diffusion_options = [](CLI::App* sub, bl::DiffusionOptions& o) {
    sub->add_option("--alpha", o.alpha, "Convexity parameter")->capture_default_str();
    sub->add_option("--dim", o.dim, "Dimension")->capture_default_str();
    sub->add_option("--x", o.x, "Start point (1 or dim values)")->capture_default_str();
    sub->add_option("--y", o.y, "End point (1 or dim values)")->capture_default_str();
    sub->add_option("--t", o.t, "Marginal time, a multiple of 1/steps")->capture_default_str();
    sub->add_option("--steps", o.steps, "Time steps M")->capture_default_str();
    sub->add_option("--paths", o.paths, "Sampled paths")->capture_default_str();
    sub->add_option("--seed", o.seed, "Seed")->capture_default_str();
    sub->add_option("--r", o.r_grid, "Deviation grid (default 0.1..3.0)");
    sub->add_option("--box", o.box_half_width, "Half width of the check box")
        ->capture_default_str();
    sub->add_option("--grid-n", o.grid_n, "Points per axis for the Hessian check (0: automatic)")
        ->capture_default_str();
  };
  bl::DiffusionOptions bo;
  auto* bo_app = bridge->add_subcommand("ou", "Ornstein-Uhlenbeck bridge");
  diffusion_options(bo_app, bo);
  bind(
      bo_app, "bridge ou",
      [&] {
        bo.potential = "ou";
        bo.workers = common.workers;
        return bl::run_bridge_diffusion(bo);
      },
      true);

  bl::DiffusionOptions bd;
  auto* bd_app = bridge->add_subcommand("diffusion", "Gradient diffusion bridge");
  bd_app->add_option("--potential", bd.potential, "ou, ou-plus-logcosh, quartic or zero")
      ->capture_default_str();
  bd_app->add_option("--eps", bd.eps, "log cosh weight")->capture_default_str();
  diffusion_options(bd_app, bd);
  bind(
      bd_app, "bridge diffusion",
      [&] {
        bd.workers = common.workers;
        return bl::run_bridge_diffusion(bd);
      },
      true);

  // report
  std::string report_dir;
  auto* rep = app.add_subcommand("report", "Summarise the manifests in a directory");
  rep->add_option("dir", report_dir, "Directory holding *.manifest.json")->required();
  bind(rep, "report", [&] { return bl::run_report(report_dir); });

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(args);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);

  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << e.what() << "\n\n";
    const CLI::App* help_for = &app;
    for (const CLI::App* sub = &app;;) {
      auto subs = sub->get_subcommands();
      if (subs.empty()) break;
      sub = subs.front();
      help_for = sub;
    }
    std::cerr << help_for->help();
    return 1;
  }

  try {
    int workers = parallel ? bl::resolve_workers(common.workers) : 1;
    auto out = action();
    emit(out, leaf, command, common, workers);
    return out.exit_code;
  } catch (const bl::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
