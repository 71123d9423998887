#include "bridgelab/ctmc_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bridgelab/error.hpp"
#include "bridgelab/parallel.hpp"
#include "bridgelab/special.hpp"

namespace bridgelab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_time(double t) {
  if (!(t >= 0 && t <= 1)) throw Error(ErrorCode::DomainError, "time must lie in [0,1]");
}

void require_vertex(const DirectedGraph& g, int v) {
  if (v < 0 || v >= g.num_vertices())
    throw Error(ErrorCode::VertexUnknown, "vertex index " + std::to_string(v));
}

}  // namespace

PoissonWeights poisson_weights(double mean, double tol) {
  PoissonWeights out;
  if (mean <= 0) {
    out.w = {1.0};
    return out;
  }
  const double log_tol = std::log(tol);
  for (long long n = 0;; ++n) {
    double lw = poisson_log_pmf(n, mean);
    out.w.push_back(std::exp(lw));
    // Past the mode the tail beyond n is at most w_n / (1 - mean/(n+2)).
    if (n + 2 > 2 * mean && lw + std::log(2.0) < log_tol) break;
  }
  out.truncated_mass = std::exp(poisson_log_tail(static_cast<long long>(out.w.size()), mean));
  return out;
}

UniformizedChain::UniformizedChain(const DirectedGraph& g, const JumpIntensity& j,
                                   const std::vector<double>& exit)
    : total_(g.num_vertices(), 0.0), exit_(exit) {
  const int n = g.num_vertices();
  if (!exit_.empty() && static_cast<int>(exit_.size()) != n)
    throw Error(ErrorCode::DomainError, "exit rates need one entry per vertex");
  for (int v = 0; v < n; ++v) {
    double e = exit_rate(v);
    if (!(e >= 0) || !std::isfinite(e))
      throw Error(ErrorCode::NonPositiveRate, "exit rate must be finite and >= 0");
    total_[v] = out_rate(g, j, v) + e;
    rate_ = std::max(rate_, total_[v]);
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(g.num_arcs() + n);
  for (int v = 0; v < n; ++v) {
    double diag = rate_ > 0 ? 1.0 - total_[v] / rate_ : 1.0;
    if (diag > 0) entries.emplace_back(v, v, diag);
    for (int a = g.first_arc(v); a < g.first_arc(v) + g.degree(v); ++a)
      entries.emplace_back(v, g.arc_target(a), j.at(a) / rate_);
  }
  U_.resize(n, n);
  U_.setFromTriplets(entries.begin(), entries.end());
}

Eigen::VectorXd UniformizedChain::unit(int v) const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(size());
  e[v] = 1.0;
  return e;
}

Eigen::VectorXd UniformizedChain::forward(const Eigen::VectorXd& mu, double t, double tol,
                                          double* truncated) const {
  auto pw = poisson_weights(rate_ * t, tol);
  if (truncated) *truncated = pw.truncated_mass;
  Eigen::VectorXd v = mu;
  Eigen::VectorXd acc = pw.w[0] * v;
  for (size_t n = 1; n < pw.w.size(); ++n) {
    v = U_.transpose() * v;
    acc += pw.w[n] * v;
  }
  return acc;
}

Eigen::VectorXd UniformizedChain::backward(const Eigen::VectorXd& f, double t, double tol,
                                           double* truncated) const {
  auto pw = poisson_weights(rate_ * t, tol);
  if (truncated) *truncated = pw.truncated_mass;
  Eigen::VectorXd v = f;
  Eigen::VectorXd acc = pw.w[0] * v;
  for (size_t n = 1; n < pw.w.size(); ++n) {
    v = U_ * v;
    acc += pw.w[n] * v;
  }
  return acc;
}

TransitionKernel transition_kernel(const DirectedGraph& g, const JumpIntensity& j, double t,
                                   double tol, const std::vector<double>& exit, double leak_tol) {
  if (!(t > 0 && t <= 1)) throw Error(ErrorCode::DomainError, "kernel time must lie in (0,1]");
  UniformizedChain chain(g, j, exit);
  auto pw = poisson_weights(chain.rate() * t, tol);
  const int n = chain.size();
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  TransitionKernel k;
  k.t = t;
  k.uniformization_error = pw.truncated_mass;
  k.P = pw.w[0] * power;
  for (size_t m = 1; m < pw.w.size(); ++m) {
    power = chain.jump_matrix() * power;
    k.P += pw.w[m] * power;
  }
  k.leak.resize(n);
  for (int v = 0; v < n; ++v) {
    k.leak[v] = std::max(0.0, 1.0 - k.P.row(v).sum());
    k.max_leak = std::max(k.max_leak, k.leak[v]);
  }
  if (!exit.empty() && k.max_leak > leak_tol)
    throw Error(ErrorCode::WindowLeak, "kernel row leaks " + std::to_string(k.max_leak));
  return k;
}

BridgeMarginal bridge_marginal(const UniformizedChain& chain, int x, int y, double t,
                               double leak_tol) {
  require_time(t);
  if (x < 0 || y < 0 || x >= chain.size() || y >= chain.size())
    throw Error(ErrorCode::VertexUnknown, "bridge endpoint out of range");
  BridgeMarginal m;
  m.x = x;
  m.y = y;
  m.t = t;
  Eigen::VectorXd full = chain.forward(chain.unit(x), 1.0);
  m.p1 = full[y];
  m.leak = std::max(0.0, 1.0 - full.sum());
  if (!(m.p1 > 0)) throw Error(ErrorCode::UnreachableEndpoint, "P_1(x,y) is zero");
  if (m.leak > leak_tol)
    throw Error(ErrorCode::WindowLeak, "bridge start leaks " + std::to_string(m.leak));
  Eigen::VectorXd a = chain.forward(chain.unit(x), t);
  Eigen::VectorXd b = chain.backward(chain.unit(y), 1.0 - t);
  Eigen::VectorXd p = a.cwiseProduct(b);
  double s = p.sum();
  if (!(s > 0)) throw Error(ErrorCode::UnreachableEndpoint, "bridge marginal underflows");
  m.pmf.assign(p.data(), p.data() + p.size());
  for (double& v : m.pmf) v /= s;
  return m;
}

BridgeMarginal bridge_marginal(const DirectedGraph& g, const JumpIntensity& j, int x, int y,
                               double t, const std::vector<double>& exit, double leak_tol) {
  require_vertex(g, x);
  require_vertex(g, y);
  return bridge_marginal(UniformizedChain(g, j, exit), x, y, t, leak_tol);
}

int PathSample::state_at(double t) const {
  auto k = std::upper_bound(times.begin(), times.end(), t) - times.begin();
  return walk.vertices[k];
}

std::vector<PathSample> sample_bridge_paths(const DirectedGraph& g, const JumpIntensity& j, int x,
                                            int y, long long n_paths, std::uint64_t seed,
                                            const std::vector<double>& exit, int workers) {
  require_vertex(g, x);
  require_vertex(g, y);
  UniformizedChain chain(g, j, exit);
  const double rate = chain.rate();
  auto pw = poisson_weights(rate, kDefaultUniformizationTol);
  const int steps = static_cast<int>(pw.w.size());
  // back.col(m) = U^m e_y.
  Eigen::MatrixXd back(chain.size(), steps);
  back.col(0) = chain.unit(y);
  for (int m = 1; m < steps; ++m) back.col(m) = chain.jump_matrix() * back.col(m - 1);
  std::vector<double> count_cdf(steps);
  double acc = 0;
  for (int m = 0; m < steps; ++m) count_cdf[m] = (acc += pw.w[m] * back(x, m));
  if (!(acc > 0)) throw Error(ErrorCode::UnreachableEndpoint, "P_1(x,y) is zero");

  std::vector<PathSample> out(n_paths);
  for_each_block(n_paths, workers, [&](long long block, long long begin, long long end) {
    std::mt19937_64 rng(mix_seed(seed, block));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> clock;
    for (long long p = begin; p < end; ++p) {
      double u = unif(rng) * acc;
      int N = static_cast<int>(std::lower_bound(count_cdf.begin(), count_cdf.end(), u) -
                               count_cdf.begin());
      N = std::min(N, steps - 1);
      clock.resize(N);
      for (double& c : clock) c = unif(rng);
      std::sort(clock.begin(), clock.end());
      PathSample& path = out[p];
      path.walk.vertices = {x};
      int z = x;
      for (int i = 0; i < N; ++i) {
        const int rest = N - i - 1;
        const double stay = rate > 0 ? 1.0 - chain.total_rate(z) / rate : 1.0;
        const double total = back(z, rest + 1);
        double r = unif(rng) * total;
        int next = z;
        double w = std::max(stay, 0.0) * back(z, rest);
        if (r >= w) {
          r -= w;
          const int first = g.first_arc(z);
          const int last = first + g.degree(z);
          for (int a = first; a < last; ++a) {
            int target = g.arc_target(a);
            double wa = j.at(a) / rate * back(target, rest);
            next = target;
            if (r < wa) break;
            r -= wa;
          }
          // Rounding can leave r just above the last weight; fall back to the
          // last admissible target.
          if (back(next, rest) <= 0)
            for (int a = first; a < last; ++a)
              if (back(g.arc_target(a), rest) > 0) next = g.arc_target(a);
        }
        if (next != z) {
          path.times.push_back(clock[i]);
          path.walk.vertices.push_back(next);
          z = next;
        }
      }
    }
  });
  return out;
}

std::optional<PathSample> sample_forward_path(const DirectedGraph& g, const JumpIntensity& j,
                                              int x, std::mt19937_64& rng,
                                              const std::vector<double>& exit) {
  require_vertex(g, x);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PathSample path;
  path.walk.vertices = {x};
  double now = 0;
  int z = x;
  for (;;) {
    double e = exit.empty() ? 0.0 : exit[z];
    double total = out_rate(g, j, z) + e;
    if (total <= 0) return path;
    now += -std::log1p(-unif(rng)) / total;
    if (now >= 1) return path;
    double r = unif(rng) * total;
    if (r < e) return std::nullopt;
    r -= e;
    int first = g.first_arc(z);
    int last = first + g.degree(z);
    int next = g.arc_target(last - 1);
    for (int a = first; a < last; ++a) {
      if (r < j.at(a)) {
        next = g.arc_target(a);
        break;
      }
      r -= j.at(a);
    }
    path.times.push_back(now);
    path.walk.vertices.push_back(next);
    z = next;
  }
}

std::vector<PathSample> sample_bridge_paths_rejection(const DirectedGraph& g,
                                                      const JumpIntensity& j, int x, int y,
                                                      long long n_paths, std::uint64_t seed,
                                                      long long max_attempts) {
  require_vertex(g, y);
  std::mt19937_64 rng(mix_seed(seed, 0));
  std::vector<PathSample> out;
  out.reserve(n_paths);
  for (long long attempt = 0; static_cast<long long>(out.size()) < n_paths; ++attempt) {
    if (attempt >= max_attempts)
      throw Error(ErrorCode::UnreachableEndpoint, "rejection sampler ran out of attempts");
    auto path = sample_forward_path(g, j, x, rng);
    if (path && path->walk.vertices.back() == y) out.push_back(std::move(*path));
  }
  return out;
}

std::vector<double> empirical_marginal(const std::vector<PathSample>& paths, double t,
                                       int num_vertices) {
  std::vector<double> freq(num_vertices, 0.0);
  if (paths.empty()) return freq;
  for (const auto& p : paths) freq[p.state_at(t)] += 1;
  for (double& f : freq) f /= static_cast<double>(paths.size());
  return freq;
}

GirsanovWeight girsanov_log_weight(const DirectedGraph& g, const PathSample& path,
                                   const JumpIntensity& j, double lambda) {
  if (!(lambda > 0)) throw Error(ErrorCode::DomainError, "lambda must be positive");
  GirsanovWeight w;
  const auto& v = path.walk.vertices;
  const double log_lambda = std::log(lambda);
  double start = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    double stop = i < path.times.size() ? path.times[i] : 1.0;
    w.time_term -= (out_rate(g, j, v[i]) - lambda * g.degree(v[i])) * (stop - start);
    start = stop;
    if (i + 1 < v.size()) {
      int a = g.arc_id(v[i], v[i + 1]);
      if (a < 0) throw Error(ErrorCode::MissingRate, "path step is not an arc");
      w.jump_term += std::log(j.at(a)) - log_lambda;
    }
  }
  return w;
}

double lattice_envelope(double lambda, double t, double R) {
  if (R <= 0) return 0;
  return -2 * R * std::log(R) + (std::log(4 * lambda * lambda * t * (1 - t)) + 2) * R;
}

double tree_envelope(double lambda, int delta, double t, double R) {
  if (R <= 0) return 0;
  return -2 * R * std::log(R) +
         (2 + 2 * std::log(lambda * t * (1 - t)) + 3 * std::log(delta - 1.0)) * R;
}

double countingest_log_bound(double lambda, int delta, double t, double R) {
  return R * std::log(lambda * lambda * t * (1 - t)) + 3 * R * std::log(delta - 1.0) -
         2 * std::lgamma(R + 1);
}

double skellam_log_pmf(long long i, double lambda, double t) {
  if (t <= 0 || lambda <= 0) return i == 0 ? 0.0 : kNegInf;
  return -2 * lambda * t + log_bessel_i(static_cast<int>(i), 2 * lambda * t);
}

double line_bridge_log_pmf(long long i, double lambda, double t) {
  if (t <= 0 || t >= 1 || lambda <= 0) return i == 0 ? 0.0 : kNegInf;
  const int n = static_cast<int>(i);
  return log_bessel_i(n, 2 * lambda * t) + log_bessel_i(n, 2 * lambda * (1 - t)) -
         log_bessel_i(0, 2 * lambda);
}

namespace {

std::vector<TailPoint> suffix_log_tail(const std::vector<double>& log_mass, int R_max) {
  // Accumulate from the far end so small terms are never swamped.
  const int n = static_cast<int>(log_mass.size());
  std::vector<double> suffix(n + 1, kNegInf);
  for (int d = n - 1; d >= 0; --d) suffix[d] = log_add_exp(suffix[d + 1], log_mass[d]);
  std::vector<TailPoint> out;
  for (int R = 0; R <= R_max; ++R)
    out.push_back({R, R == 0 ? 0.0 : (R < n ? suffix[R] - suffix[0] : kNegInf)});
  return out;
}

}  // namespace

std::vector<TailPoint> exact_lattice_tail(double lambda, double t, int R_max) {
  if (R_max < 0) throw Error(ErrorCode::RangeTooSmall, "R_max must be >= 0");
  const int K = R_max + 40 + static_cast<int>(std::ceil(10 * lambda));
  // Law of |X^1| for one coordinate.
  std::vector<double> abs_mass(K + 1);
  for (int i = 0; i <= K; ++i)
    abs_mass[i] = line_bridge_log_pmf(i, lambda, t) + (i > 0 ? std::log(2.0) : 0.0);
  std::vector<double> dist(2 * K + 1, kNegInf);
  for (int a = 0; a <= K; ++a)
    for (int b = 0; b <= K; ++b) dist[a + b] = log_add_exp(dist[a + b], abs_mass[a] + abs_mass[b]);
  return suffix_log_tail(dist, R_max);
}

std::vector<TailPoint> distance_log_tail(const DirectedGraph& g, const std::vector<double>& pmf,
                                         int x, int R_max) {
  auto d = distances_from(g, x);
  int far = 0;
  for (int v : d) far = std::max(far, v);
  std::vector<double> mass(far + 1, 0.0);
  for (int v = 0; v < g.num_vertices(); ++v)
    if (d[v] >= 0) mass[d[v]] += pmf[v];
  std::vector<double> log_mass(mass.size());
  for (size_t i = 0; i < mass.size(); ++i) log_mass[i] = mass[i] > 0 ? std::log(mass[i]) : kNegInf;
  return suffix_log_tail(log_mass, R_max);
}

LevelChain regular_tree_level_chain(int delta, double lambda, int depth) {
  if (delta < 2 || depth < 1)
    throw Error(ErrorCode::DimensionTooSmall, "level chain needs delta>=2, depth>=1");
  LevelChain c;
  std::vector<std::pair<int, int>> arcs;
  std::vector<std::string> labels(depth + 1);
  for (int l = 0; l <= depth; ++l) {
    labels[l] = std::to_string(l);
    if (l < depth) {
      arcs.emplace_back(l, l + 1);
      arcs.emplace_back(l + 1, l);
    }
  }
  c.graph = DirectedGraph::from_index_arcs(depth + 1, arcs, std::move(labels));
  c.rates = JumpIntensity(c.graph);
  const double up = lambda * (delta - 1) / delta;
  const double down = lambda / delta;
  for (int l = 0; l < depth; ++l) {
    c.rates.set(c.graph, l, l + 1, l == 0 ? lambda : up);
    c.rates.set(c.graph, l + 1, l, down);
  }
  c.exit.assign(depth + 1, 0.0);
  c.exit[depth] = up;
  return c;
}

std::vector<TailPoint> exact_tree_tail(int delta, double lambda, double t, int R_max) {
  if (R_max < 0) throw Error(ErrorCode::RangeTooSmall, "R_max must be >= 0");
  const int depth = R_max + 20 + static_cast<int>(std::ceil(6 * lambda));
  auto chain = regular_tree_level_chain(delta, lambda, depth);
  auto m = bridge_marginal(chain.graph, chain.rates, 0, 0, t, chain.exit);
  return distance_log_tail(chain.graph, m.pmf, 0, R_max);
}

}  // namespace bridgelab
