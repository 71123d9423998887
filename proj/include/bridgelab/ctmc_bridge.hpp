#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "bridgelab/characteristics.hpp"
#include "bridgelab/graph.hpp"

namespace bridgelab {

constexpr double kDefaultUniformizationTol = 1e-300;
constexpr double kLeakThreshold = 1e-9;

/// Poisson(mean) weights w_0..w_N with the tail beyond N below tol.
struct PoissonWeights {
  std::vector<double> w;
  double truncated_mass = 0;
};

PoissonWeights poisson_weights(double mean, double tol);

/// Jump chain of a rate matrix on a finite graph. Optional per-vertex exit
/// rates kill the walk (mass leaving the window).
class UniformizedChain {
 public:
  UniformizedChain(const DirectedGraph& g, const JumpIntensity& j,
                   const std::vector<double>& exit = {});

  int size() const { return static_cast<int>(total_.size()); }
  /// Uniformization rate: max total rate including exit.
  double rate() const { return rate_; }
  double total_rate(int v) const { return total_[v]; }
  double exit_rate(int v) const { return exit_.empty() ? 0.0 : exit_[v]; }
  /// U = I + Q/rate, substochastic when exit rates are present.
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& jump_matrix() const { return U_; }

  /// Row vector mu P_t.
  Eigen::VectorXd forward(const Eigen::VectorXd& mu, double t,
                          double tol = kDefaultUniformizationTol,
                          double* truncated = nullptr) const;
  /// Column vector P_t f.
  Eigen::VectorXd backward(const Eigen::VectorXd& f, double t,
                           double tol = kDefaultUniformizationTol,
                           double* truncated = nullptr) const;
  Eigen::VectorXd unit(int v) const;

 private:
  std::vector<double> total_;
  std::vector<double> exit_;
  double rate_ = 0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> U_;
};

struct TransitionKernel {
  double t = 0;
  Eigen::MatrixXd P;
  double uniformization_error = 0;
  std::vector<double> leak;  // 1 - row sum
  double max_leak = 0;
};

/// Dense P_t by uniformization. Meant for small graphs. Throws WindowLeak when
/// some row loses more than leak_tol through the exit rates.
TransitionKernel transition_kernel(const DirectedGraph& g, const JumpIntensity& j, double t,
                                   double tol = 1e-16, const std::vector<double>& exit = {},
                                   double leak_tol = kLeakThreshold);

struct BridgeMarginal {
  int x = 0;
  int y = 0;
  double t = 0;
  std::vector<double> pmf;
  double p1 = 0;    // P_1(x,y)
  double leak = 0;  // mass from x lost through the window over [0,1]
};

/// pmf(z) proportional to P_t(x,z) P_{1-t}(z,y). Throws UnreachableEndpoint
/// when P_1(x,y) underflows and WindowLeak when the leak exceeds leak_tol.
BridgeMarginal bridge_marginal(const DirectedGraph& g, const JumpIntensity& j, int x, int y,
                               double t, const std::vector<double>& exit = {},
                               double leak_tol = kLeakThreshold);
BridgeMarginal bridge_marginal(const UniformizedChain& chain, int x, int y, double t,
                               double leak_tol = kLeakThreshold);

struct PathSample {
  std::vector<double> times;  // jump times, increasing in (0,1)
  Walk walk;                  // visited states, one more than times
  double weight = 1;

  int state_at(double t) const;
};

/// Exact bridge paths: the number of uniformized steps is drawn from its
/// conditional law, then each step is tilted by the backward likelihood of
/// reaching y. Block b uses the seed mix_seed(seed, b).
std::vector<PathSample> sample_bridge_paths(const DirectedGraph& g, const JumpIntensity& j, int x,
                                            int y, long long n_paths, std::uint64_t seed,
                                            const std::vector<double>& exit = {},
                                            int workers = 0);

/// Forward path on [0,1]; empty when the walk is killed.
std::optional<PathSample> sample_forward_path(const DirectedGraph& g, const JumpIntensity& j,
                                              int x, std::mt19937_64& rng,
                                              const std::vector<double>& exit = {});

/// Cross-check sampler for tiny cases: forward paths kept when they end at y.
/// Throws UnreachableEndpoint if max_attempts are used up.
std::vector<PathSample> sample_bridge_paths_rejection(const DirectedGraph& g,
                                                      const JumpIntensity& j, int x, int y,
                                                      long long n_paths, std::uint64_t seed,
                                                      long long max_attempts = 100000000);

/// Fraction of paths in each state at time t.
std::vector<double> empirical_marginal(const std::vector<PathSample>& paths, double t,
                                       int num_vertices);

/// Log density of the j-walk with respect to the walk with rate lambda per
/// arc, on [0,1].
struct GirsanovWeight {
  double jump_term = 0;  // sum of log j(arc) - log lambda
  double time_term = 0;  // -int (out_rate_j - lambda deg) ds
  double total() const { return jump_term + time_term; }
};

GirsanovWeight girsanov_log_weight(const DirectedGraph& g, const PathSample& path,
                                   const JumpIntensity& j, double lambda);

/// Envelope -2R log R + [log(4 lambda^2 t(1-t)) + 2] R for the square lattice.
double lattice_envelope(double lambda, double t, double R);
/// Envelope -2R log R + [2 + 2 log(lambda t(1-t)) + 3 log(Delta-1)] R.
double tree_envelope(double lambda, int delta, double t, double R);
/// log of (lambda^2 t(1-t))^R (Delta-1)^(3R) / R!^2.
double countingest_log_bound(double lambda, int delta, double t, double R);

/// log P(X_t = i) for the walk on Z with rate lambda in each direction.
double skellam_log_pmf(long long i, double lambda, double t);
/// log P(X_t = i) for its bridge 0 -> 0.
double line_bridge_log_pmf(long long i, double lambda, double t);

struct TailPoint {
  int R = 0;
  double log_tail = 0;
};

/// log P(|X_t^1| + |X_t^2| >= R) for the bridge 0 -> 0 of the walk on Z^2 with
/// rate lambda per arc, from two independent line bridges.
std::vector<TailPoint> exact_lattice_tail(double lambda, double t, int R_max);

/// log P(d(X, x) >= R) for R = 0..R_max under the given pmf.
std::vector<TailPoint> distance_log_tail(const DirectedGraph& g, const std::vector<double>& pmf,
                                         int x, int R_max);

/// Distance-from-root chain of the walk with rate lambda/Delta per arc on the
/// Delta-regular tree, cut at the given depth with exit rates at the cut.
struct LevelChain {
  DirectedGraph graph;
  JumpIntensity rates;
  std::vector<double> exit;
};

LevelChain regular_tree_level_chain(int delta, double lambda, int depth);

/// log P(d(X_t, root) >= R) for the bridge root -> root on the Delta-regular
/// tree, through the level chain.
std::vector<TailPoint> exact_tree_tail(int delta, double lambda, double t, int R_max);

}  // namespace bridgelab
