// One PASS/FAIL line per acceptance criterion. Optional arguments select
// criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bridgelab/characteristics.hpp"
#include "bridgelab/ctmc_bridge.hpp"
#include "bridgelab/diffusion_bridge.hpp"
#include "bridgelab/error.hpp"
#include "bridgelab/pinned_poisson.hpp"
#include "bridgelab/runs.hpp"
#include "bridgelab/special.hpp"
#include "bridgelab/synthesis.hpp"
#include "bridgelab/windows.hpp"
#include "support.hpp"

using namespace bridgelab;
using Eigen::VectorXd;

namespace {

// Collects failures; a criterion passes when none were recorded.
struct Outcome {
  std::vector<std::string> failures;
  std::string summary;

  void require(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok && failures.size() == 5) failures.push_back("...");
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// ---------------------------------------------------------------- 1
void gamma_profile(Outcome& o) {
  const double closed = 2 * (1 - std::exp(-2.0)) / std::pow(1 - std::exp(-1.0), 2);
  o.require(std::abs(gamma_alpha(1.0, 0.5) - closed) <= 1e-12, "closed form at alpha=1, t=1/2");

  std::vector<double> ts;
  for (int i = 1; i <= 1000; ++i) ts.push_back(i / 1001.0);
  const std::vector<double> alphas{0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  double worst_limit = 0;
  for (size_t a = 0; a < alphas.size(); ++a) {
    const double al = alphas[a];
    for (size_t i = 0; i < ts.size(); ++i) {
      const double t = ts[i];
      const double g = gamma_alpha(al, t);
      o.require(std::abs(g - gamma_alpha(al, 1 - t)) <= 1e-12 * g,
                fmt("symmetry alpha=%g t=%g", al, t));
      if (i > 0 && i + 1 < ts.size()) {
        double second = gamma_alpha(al, ts[i - 1]) - 2 * g + gamma_alpha(al, ts[i + 1]);
        o.require(second >= -1e-9 * g, fmt("convexity alpha=%g t=%g", al, t));
      }
      if (a > 0)
        o.require(g >= gamma_alpha(alphas[a - 1], t), fmt("monotone in alpha at %g, t=%g", al, t));
    }
  }
  for (double t : ts) {
    double limit = 1 / (t * (1 - t));
    worst_limit = std::max(worst_limit, std::abs(gamma_alpha(1e-6, t) / limit - 1));
  }
  o.require(worst_limit <= 1e-5, fmt("alpha -> 0 limit off by %g", worst_limit));
  o.summary = fmt("closed-form err %.1e, limit rel err %.1e",
                  std::abs(gamma_alpha(1.0, 0.5) - closed), worst_limit);
}

// ---------------------------------------------------------------- 2
void ou_variance(Outcome& o) {
  double lo = 1e9, hi = -1e9;
  for (double alpha : {0.5, 1.0, 2.0}) {
    SamplerOptions opt;
    opt.steps = 200;
    opt.n_paths = 100000;
    opt.seed = 2;
    opt.record = {50, 100, 150};
    auto e = sample_diffusion_bridge(ou_potential(alpha, 1), VectorXd::Zero(1), VectorXd::Zero(1),
                                     opt);
    for (int idx : opt.record) {
      const double t = idx / 200.0;
      double ratio = weighted_variance(e, e.record_index(idx), 0).value * gamma_alpha(alpha, t);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      o.require(ratio >= 0.98 && ratio <= 1.02, fmt("alpha=%g t=%g ratio %.4f", alpha, t, ratio));
    }
  }
  o.summary = fmt("variance*gamma in [%.4f, %.4f]", lo, hi);
}

// ---------------------------------------------------------------- 3
void accordeon(Outcome& o) {
  const VectorXd x = (VectorXd(2) << 0.3, 0.0).finished();
  const VectorXd y = (VectorXd(2) << -0.2, 0.0).finished();
  std::vector<double> Rs;
  for (int i = 1; i <= 30; ++i) Rs.push_back(i / 10.0);
  auto first = [](const VectorXd& z) { return z[0]; };
  const Box box{VectorXd::Constant(2, -3), VectorXd::Constant(2, 3)};
  SamplerOptions opt;
  opt.steps = 200;
  opt.n_paths = 100000;
  opt.seed = 3;
  int rows_checked = 0;
  double worst_margin = -1e9;
  for (double alpha : {0.5, 1.0, 2.0}) {
    auto pert = ou_logcosh_potential(alpha, 0.1, 2);
    o.require(check_condition_e17(script_u(pert), alpha, box, 25).passed,
              fmt("logcosh fails the Hessian condition at alpha=%g", alpha));
    for (const auto& p : {ou_potential(alpha, 2), pert}) {
      auto rep = accordeon_check(p, alpha, x, y, first, 0.5, Rs, opt);
      int checked = 0;
      for (const auto& r : rep.rows) {
        if (!r.checked) continue;
        ++checked;
        worst_margin = std::max(worst_margin, r.empirical_log_tail -
                                                  (r.gaussian_envelope + 3 * r.sigma_log));
        o.require(r.passed, p.name + fmt(" alpha=%g R=%g above the envelope", alpha, r.R));
      }
      o.require(checked > 0, p.name + fmt(" alpha=%g: no R with 50 exceedances", alpha));
      rows_checked += checked;
    }
  }
  o.summary = fmt("%g rows checked, max(log tail - envelope - 3 sigma) = %.3f", rows_checked,
                  worst_margin);
}

// ---------------------------------------------------------------- 4
// Condition independent Poisson counts on k N_k = N_{-1} directly.
std::vector<double> conditional_poisson(int k, double phi, int n_max) {
  const long double jm = 1.7L;
  const long double jk = phi / std::pow(jm, k);
  std::vector<long double> w(n_max + 1);
  long double total = 0;
  for (int n = 0; n <= n_max; ++n) {
    w[n] = std::exp(-jk + n * std::log(jk) - std::lgamma(n + 1.0L)) *
           std::exp(-jm + k * n * std::log(jm) - std::lgamma(k * n + 1.0L));
    total += w[n];
  }
  std::vector<double> out(n_max + 1);
  for (int n = 0; n <= n_max; ++n) out[n] = static_cast<double>(w[n] / total);
  return out;
}

void pinned_exactness(Outcome& o) {
  std::vector<IntegerFunction> polys = {
      [](long long) { return 1.0; }, [](long long n) { return double(n); },
      [](long long n) { return 2.0 * n * n - n; },
      [](long long n) { return double(n) * n * n - 4.0 * n * n + 1; }};
  double worst_tv = 0, worst_dual = 0;
  for (int k = 1; k <= 3; ++k) {
    for (double phi : {0.5, 1.0, 4.0}) {
      auto r = rho(k, phi);
      auto oracle = conditional_poisson(k, phi, 80);
      double tv = 0;
      for (int n = 0; n <= 80; ++n) tv += std::abs(r.pmf(n) - oracle[n]);
      tv *= 0.5;
      double dual = check_duality(r, polys);
      worst_tv = std::max(worst_tv, tv);
      worst_dual = std::max(worst_dual, dual);
      o.require(tv <= 1e-12, fmt("TV %.2e at k=%g phi=%g", tv, k, phi));
      o.require(dual <= 1e-10, fmt("duality residual %.2e at k=%g phi=%g", dual, k, phi));
    }
  }
  o.summary = fmt("max TV %.1e, max duality residual %.1e", worst_tv, worst_dual);
}

// ---------------------------------------------------------------- 5
void herbst_domination(Outcome& o) {
  double tightest = -1e9;
  for (double lambda : {0.5, 1.0, 5.0}) {
    for (int R = 0; R <= 30; ++R) {
      // P(N >= lambda + R) by direct summation.
      double exact = 0;
      for (long long n = static_cast<long long>(std::ceil(lambda + R - 1e-12)); n < 400; ++n)
        exact += std::exp(poisson_log_pmf(n, lambda));
      double bound = herbst_bound(lambda, R);
      tightest = std::max(tightest, exact / bound);
      o.require(exact <= bound * (1 + 1e-12), fmt("lambda=%g R=%g: exact %.3e > %.3e", lambda, R,
                                                   exact, bound));
      if (R >= 4 * lambda && R > 0)
        o.require(herbst_log_bound(lambda, R) < bobkov_log_bound(lambda, R),
                  fmt("not tighter than the Bobkov form at lambda=%g R=%g", lambda, R));
    }
  }
  o.summary = fmt("max exact/bound %.3f", tightest);
}

// ---------------------------------------------------------------- 6
void t70(Outcome& o) {
  double worst_slope = 0;
  for (int k = 1; k <= 3; ++k) {
    for (double phi : {0.5, 1.0, 4.0}) {
      auto r = rho(k, phi);
      T70Envelope env(k, phi);
      const double mean = r.mean();
      for (int R = 0; R <= 40; ++R) {
        if (R < env.threshold()) continue;
        double exact = r.log_tail(mean + R);
        o.require(exact <= env.log_bound(R),
                  fmt("k=%g phi=%g R=%g: exact above envelope", k, phi, R));
      }
      std::vector<double> Rs, ys;
      for (int R = 10; R <= 40; ++R) {
        Rs.push_back(R);
        ys.push_back(r.log_tail(mean + R));
      }
      double a = fit_tail_expansion(Rs, ys).a;
      double rel = std::abs(a / -(k + 1.0) - 1);
      worst_slope = std::max(worst_slope, rel);
      o.require(rel <= 0.05, fmt("k=%g phi=%g fitted slope %.3f", k, phi, a));
    }
  }
  o.summary = fmt("worst relative slope error %.2e", worst_slope);
}

// ---------------------------------------------------------------- 7, 8, 9
struct Instance {
  DirectedGraph g;
  JumpIntensity j;
  std::string name;
};
std::vector<Instance> g_instances;

// Raise one two-cycle to 1.05 base^2 and check that every witness uses the
// raised arc.
bool injection_caught(const DirectedGraph& g, JumpIntensity j, double base, int max_len,
                      std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, g.num_arcs() - 1);
  const int a = pick(rng);
  const int x = g.arc_source(a), y = g.arc_target(a);
  const double two = j.at(a) * j.at(g.reverse_arc(a));
  j.set(a, j.at(a) * 1.05 * base * base / two);
  auto rep = verify_patch_bound(g, j, base, max_len);
  if (rep.passed || rep.witnesses.empty()) return false;
  for (const auto& w : rep.witnesses) {
    bool uses = false;
    for (size_t i = 0; i + 1 < w.walk.vertices.size(); ++i)
      uses = uses || (w.walk.vertices[i] == x && w.walk.vertices[i + 1] == y);
    if (!uses) return false;
  }
  return true;
}

void square_patch(Outcome& o) {
  std::mt19937_64 rng(7);
  LatticeWindow w(8, 8);
  long long walks = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const double lambda = 0.5 + 0.1 * rep;
    auto phi = random_lattice_prescription(w, lambda, rng);
    auto j = synth_lattice(w, phi);
    o.require(prescription_error(w.graph(), j, phi, lattice_cycles(w)) < 1e-10,
              fmt("instance %g does not realise its prescription", rep));
    o.require(check_lattice_conditions(w, j, lambda).passed,
              fmt("instance %g is not compliant", rep));
    auto patch = verify_patch_bound(w.graph(), j, lambda, 10);
    walks = patch.checks;
    o.require(patch.passed, fmt("instance %g: closed walk above lambda^length", rep));
    o.require(injection_caught(w.graph(), j, lambda, 10, rng),
              fmt("instance %g: injected violation not caught", rep));
    g_instances.push_back({w.graph(), j, fmt("lattice %g", rep)});
  }
  o.summary = fmt("20 instances, %g closed walks each", double(walks));
}

void tree_patch(Outcome& o) {
  std::mt19937_64 rng(8);
  long long walks = 0;
  for (int rep = 0; rep < 10; ++rep) {
    auto g = testsupport::random_graph(rng, 6 + rep % 7, 2 + rep % 5);
    auto basis = t_basis(g, spanning_tree(g, 0));
    const double lambda = 1.0 + 0.3 * rep;
    auto phi = random_tree_prescription(g, basis, lambda, rng);
    auto j = synth_basis(g, basis, phi);
    o.require(prescription_error(g, j, phi, basis_cycles(basis)) < 1e-10,
              fmt("graph %g does not realise its prescription", rep));
    o.require(check_tree_conditions(g, j, lambda, basis).passed,
              fmt("graph %g fails the tree conditions", rep));
    const double base = lambda / g.max_out_degree();
    auto patch = verify_patch_bound(g, j, base, g.num_vertices());
    walks += patch.checks;
    o.require(patch.passed, fmt("graph %g: closed walk above (lambda/Delta)^length", rep));
    o.require(injection_caught(g, j, base, g.num_vertices(), rng),
              fmt("graph %g: injected violation not caught", rep));
    g_instances.push_back({g, j, fmt("graph %g", rep)});
  }
  o.summary = fmt("10 graphs, %g closed walks in total", double(walks));
}

void gauge(Outcome& o) {
  if (g_instances.empty()) {
    Outcome a, b;
    square_patch(a);
    tree_patch(b);
  }
  double worst_phi = 0, worst_speed = 0;
  for (const auto& inst : g_instances) {
    auto n = normalize_constant_speed(inst.g, inst.j);
    const double v = n.eigen.eigenvalue;
    for (int z = 0; z < inst.g.num_vertices(); ++z) {
      double dev = std::abs(out_rate(inst.g, n.k, z) - v);
      worst_speed = std::max(worst_speed, dev / v);
      o.require(dev <= 1e-10 * v, inst.name + ": speed not constant");
    }
    for_each_simple_closed_walk(inst.g, 8, [&](const Walk& w) {
      double gap = std::abs(std::expm1(log_phi(inst.g, n.k, w) - log_phi(inst.g, inst.j, w)));
      worst_phi = std::max(worst_phi, gap);
      return true;
    });
  }
  o.require(worst_phi <= 1e-10, fmt("characteristic changed by %.2e", worst_phi));
  o.summary = fmt("%g instances, max char gap %.1e, max speed dev %.1e",
                  double(g_instances.size()), worst_phi, worst_speed);
}

// ---------------------------------------------------------------- 10
void ctmc_exactness(Outcome& o) {
  const int radius = 24;
  auto g = line_window(radius);
  JumpIntensity j(g, 1.0);
  std::vector<double> exit(g.num_vertices(), 0.0);
  exit.front() = exit.back() = 1.0;
  const int x = radius;
  double worst_tv = 0, worst_z = 0;
  auto paths = sample_bridge_paths(g, j, x, x, 100000, 10, exit);
  for (double t : {0.25, 0.5, 0.75}) {
    auto b = bridge_marginal(g, j, x, x, t, exit);
    double tv = 0;
    for (int i = -radius; i <= radius; ++i)
      tv += std::abs(b.pmf[i + radius] - std::exp(line_bridge_log_pmf(i, 1.0, t)));
    tv *= 0.5;
    worst_tv = std::max(worst_tv, tv);
    o.require(tv <= 1e-10, fmt("t=%g: TV to the Bessel oracle %.2e", t, tv));
    auto emp = empirical_marginal(paths, t, g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) {
      const double p = b.pmf[v];
      if (p * 100000 < 5) continue;
      const double z = std::abs(emp[v] - p) / std::sqrt(p * (1 - p) / 100000);
      worst_z = std::max(worst_z, z);
      o.require(z <= 3, fmt("t=%g state %g: %.2f sigma", t, v - radius, z));
    }
  }
  o.summary = fmt("max TV %.1e, max |z| %.2f", worst_tv, worst_z);
}

// ---------------------------------------------------------------- 11
void lattice_expansion(Outcome& o) {
  const double lambda = 1, t = 0.5;
  auto tail = exact_lattice_tail(lambda, t, 16);
  std::vector<double> Rs, ys;
  for (int R = 8; R <= 16; ++R) {
    Rs.push_back(R);
    ys.push_back(tail[R].log_tail);
  }
  double a = fit_tail_expansion(Rs, ys).a;
  double b = fit_tail_expansion_fixed_leading(Rs, ys, -2).b;
  double b_expected = std::log(4 * lambda * lambda * t * (1 - t)) + 2;
  o.require(std::abs(a + 2) <= 0.1, fmt("R log R coefficient %.4f", a));
  o.require(std::abs(b - b_expected) <= 0.15, fmt("linear coefficient %.4f vs %.4f", b, b_expected));
  o.summary = fmt("a = %.4f, b = %.4f (expected %.4f)", a, b, b_expected);
}

// ---------------------------------------------------------------- 12
void lattice_comparison(Outcome& o) {
  LatticeWindow w(10, 10);
  const auto& g = w.graph();
  const double lambda = 1.0;
  const int x = w.vertex(4, 4);
  const int r_max = 10;
  auto flat = normalize_constant_speed(g, JumpIntensity(g, lambda));
  auto ref = distance_log_tail(g, bridge_marginal(g, flat.k, x, x, 0.5).pmf, x, r_max);
  std::mt19937_64 rng(12);
  double worst = -1e9;
  for (int rep = 0; rep < 5; ++rep) {
    auto phi = random_lattice_prescription(w, lambda, rng);
    double min_two = 1e9;
    for (const auto& [id, v] : phi.values)
      if (id.rfind("e:", 0) == 0) min_two = std::min(min_two, v);
    o.require(min_two < lambda * lambda * (1 - 1e-6), fmt("instance %g is the flat walk", rep));
    auto j = synth_lattice(w, phi);
    o.require(check_lattice_conditions(w, j, lambda).passed, fmt("instance %g not compliant", rep));
    auto nj = normalize_constant_speed(g, j);
    auto tail = distance_log_tail(g, bridge_marginal(g, nj.k, x, x, 0.5).pmf, x, r_max);
    for (int R = 1; R <= r_max; ++R) {
      worst = std::max(worst, tail[R].log_tail - ref[R].log_tail);
      o.require(tail[R].log_tail <= ref[R].log_tail,
                fmt("instance %g R=%g: %.4f > %.4f", rep, R, tail[R].log_tail, ref[R].log_tail));
    }
  }
  o.summary = fmt("max(log tail_j - log tail_flat) = %.4f over R=1..10", worst);
}

// ---------------------------------------------------------------- 13
void appendix(Outcome& o) {
  std::vector<double> grid;
  for (int i = 1; i <= 500; ++i) grid.push_back(0.01 * i);
  double worst = -1e9;
  for (double lambda : {0.5, 1.0, 2.0}) {
    for (int sign : {1, -1}) {
      double r = psi_vs_h_check(lambda, [sign](long long n) { return sign * double(n); }, grid);
      worst = std::max(worst, r);
      o.require(r <= 1e-10, fmt("psi - h = %.2e at lambda=%g sign=%g", r, lambda, sign));
    }
  }
  for (int k = 1; k <= 2; ++k) {
    for (double phi : {0.5, 1.0}) {
      o.require(lemma_ll_check(k, phi, [](long long n) { return double(n); }).passed,
                fmt("identity fails at k=%g phi=%g", k, phi));
      o.require(lemma_ll_check(k, phi, [](long long n) { return double(n / 2); }).passed,
                fmt("floor(n/2) fails at k=%g phi=%g", k, phi));
    }
  }
  o.summary = fmt("max(psi - h) = %.1e", worst);
}

// ---------------------------------------------------------------- 14
void reproducibility(Outcome& o) {
  auto same = [&](const std::function<RunOutput()>& run, const std::string& name) {
    auto a = run(), b = run();
    o.require(!a.csv.empty() && a.csv == b.csv, name + ": CSV changed between runs");
  };
  same([] { return run_pinned_tail(3, 4.0, 30); }, "pinned-poisson tail");
  CtmcOptions c;
  c.graph.lattice = {11, 11};
  c.paths = 20000;
  c.seed = 7;
  c.workers = 2;
  same([&] { return run_bridge_ctmc(c); }, "bridge ctmc");
  DiffusionOptions d;
  d.potential = "ou-plus-logcosh";
  d.dim = 2;
  d.paths = 20000;
  d.steps = 100;
  d.seed = 7;
  d.workers = 2;
  same([&] { return run_bridge_diffusion(d); }, "bridge diffusion");
  o.summary = "pinned tail, ctmc and diffusion CSVs repeat byte for byte";
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    void (*fn)(Outcome&);
  };
  const std::vector<Criterion> criteria = {
      {1, "gamma_alpha correctness", gamma_profile},
      {2, "OU bridge variance", ou_variance},
      {3, "Gaussian envelope for OU and log cosh perturbation", accordeon},
      {4, "pinned Poisson exactness", pinned_exactness},
      {5, "Herbst bound domination", herbst_domination},
      {6, "pinned Poisson tail envelope", t70},
      {7, "square patch oracle", square_patch},
      {8, "tree patch oracle", tree_patch},
      {9, "gauge normalization", gauge},
      {10, "CTMC bridge exactness", ctmc_exactness},
      {11, "lattice tail expansion", lattice_expansion},
      {12, "compliant tails below the simple walk", lattice_comparison},
      {13, "appendix checks", appendix},
      {14, "reproducibility", reproducibility},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      c.fn(o);
    } catch (const std::exception& e) {
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.failures.empty();
    failed += !pass;
    std::printf("%s %2d %s (%.1fs): %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.summary.c_str());
    for (const auto& f : o.failures) std::printf("       %s\n", f.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
