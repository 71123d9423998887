#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bridgelab {

using ScalarField = std::function<double(double t, const Eigen::VectorXd& z)>;
using VectorField = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& z)>;
using MatrixField = std::function<Eigen::MatrixXd(double t, const Eigen::VectorXd& z)>;

enum class DerivativeSource { Analytic, FiniteDifference };

/// Potential U of dX = -grad U(t,X) dt + dB. Empty derivative evaluators are
/// replaced by central differences. A potential may also carry the analytic
/// reciprocal characteristic and its derivatives.
struct GradientPotential {
  std::string name;
  int dim = 1;
  ScalarField U;
  VectorField grad;
  ScalarField laplacian;
  ScalarField dt;
  ScalarField script_u;
  VectorField script_u_grad;
  MatrixField script_u_hess;
  double fd_step = 1e-4;

  DerivativeSource source() const {
    return grad ? DerivativeSource::Analytic : DerivativeSource::FiniteDifference;
  }
};

GradientPotential zero_potential(int dim);
/// U = alpha |z|^2 / 2.
GradientPotential ou_potential(double alpha, int dim);
/// U = alpha |z|^2 / 2 + eps log cosh(z_1).
GradientPotential ou_logcosh_potential(double alpha, double eps, int dim);
/// U = a sum_i (z_i^2 - 1)^2.
GradientPotential quartic_potential(double a, int dim);
/// Built-in registry: "zero", "ou", "ou-plus-logcosh", "quartic".
GradientPotential make_potential(const std::string& name, double alpha, double eps, int dim);

/// Compare analytic grad U with central differences at random probe points;
/// throws EvaluatorFailure above 1e-5 relative or on non-finite values.
void validate_potential(const GradientPotential& p, std::uint64_t seed = 1, int probes = 16);

/// U_script = |grad U|^2/2 - dU/dt - Lap U / 2 with its gradient and Hessian.
struct ReciprocalCharacteristicField {
  int dim = 1;
  bool analytic = false;
  ScalarField value;
  VectorField gradient;
  MatrixField hessian;
};

/// Analytic pieces when the potential supplies them, otherwise central
/// differences; the Hessian uses Richardson extrapolation with step 1e-3.
ReciprocalCharacteristicField script_u(const GradientPotential& p);

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  bool contains(const Eigen::VectorXd& z) const;
};

struct E17Report {
  bool passed = true;
  double threshold = 0;  // alpha^2 / 2
  double min_eigenvalue = 0;
  double witness_t = 0;
  Eigen::VectorXd witness_z;
  long long points = 0;
};

/// Smallest eigenvalue of Hess U_script over a grid of grid_n points per axis
/// in the box and grid_n times in [0,1]; passes iff it is >= alpha^2/2 - 1e-6.
E17Report check_condition_e17(const ReciprocalCharacteristicField& field, double alpha,
                              const Box& box, int grid_n);

[[noreturn]] void throw_gamma_domain();

namespace detail {

/// -expm1(-x)/x, with its series near zero.
template <class T>
T one_minus_exp_ratio(T x) {
  using std::abs;
  using std::expm1;
  if (abs(x) < T(1e-5)) return T(1) - x / T(2) + x * x / T(6) - x * x * x / T(24);
  return -expm1(-x) / x;
}

}  // namespace detail

/// Inverse variance of the OU bridge marginal:
/// 2 alpha (1 - e^{-2 alpha}) / ((1 - e^{-2 alpha t})(1 - e^{-2 alpha (1-t)})),
/// with the alpha -> 0 limit 1/(t(1-t)).
template <class T>
T gamma_alpha(T alpha, T t) {
  if (!(t > T(0) && t < T(1))) throw_gamma_domain();
  if (!(alpha >= T(0))) throw_gamma_domain();
  using detail::one_minus_exp_ratio;
  const T two_a = T(2) * alpha;
  return one_minus_exp_ratio(two_a) /
         (t * (T(1) - t) * one_minus_exp_ratio(two_a * t) * one_minus_exp_ratio(two_a * (T(1) - t)));
}

struct OuBridgeMoments {
  Eigen::VectorXd mean;
  double variance = 0;  // per coordinate
};

OuBridgeMoments ou_bridge_moments(double alpha, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                  double t);

struct SamplerOptions {
  int steps = 200;                    // M
  long long n_paths = 100000;
  std::uint64_t seed = 1;
  std::vector<int> record;            // grid indices to keep; empty keeps all
  std::optional<Box> box;             // paths leaving it are counted
  int workers = 0;
  double min_ess_fraction = 0.01;
};

/// Weighted Brownian-bridge proposals on the grid t_m = m/M.
struct PathEnsemble {
  int dim = 1;
  std::vector<double> grid;
  std::vector<int> record;
  long long n_paths = 0;
  std::vector<double> values;  // [path][record][dim]
  std::vector<double> log_weights;
  std::vector<double> weights;  // self-normalized
  double effective_sample_size = 0;
  double min_script_u = 0;
  double box_leak_fraction = 0;

  double at(long long path, int rec, int coord) const {
    return values[(path * static_cast<long long>(record.size()) + rec) * dim + coord];
  }
  int record_index(int grid_index) const;
};

/// Throws DegenerateWeights when ESS < min_ess_fraction * n_paths.
PathEnsemble sample_diffusion_bridge(const GradientPotential& p, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& y, const SamplerOptions& opt);

/// Weighted mean of f over one recorded time, with its MC standard error.
struct WeightedEstimate {
  double value = 0;
  double std_error = 0;
};

using PathFunction = std::function<double(const Eigen::VectorXd& z)>;

WeightedEstimate weighted_mean(const PathEnsemble& e, int rec, const PathFunction& f);
/// Weighted variance of one coordinate with a delta-method standard error.
WeightedEstimate weighted_variance(const PathEnsemble& e, int rec, int coord);

struct AccordeonRow {
  double R = 0;
  double empirical_log_tail = 0;
  double sigma_log = 0;
  double gaussian_envelope = 0;  // -gamma R^2 / 2
  long long exceedances = 0;
  bool checked = false;
  bool passed = true;
};

struct AccordeonReport {
  bool passed = true;
  double gamma = 0;
  double mean_f = 0;
  double effective_sample_size = 0;
  double box_leak_fraction = 0;
  std::vector<AccordeonRow> rows;
};

constexpr long long kMinExceedances = 50;

/// Weighted tail of f(X_t) - E f(X_t) against -gamma_alpha(t) R^2 / 2 at every
/// R with at least kMinExceedances samples. t must be a grid time.
AccordeonReport accordeon_check(const GradientPotential& p, double alpha,
                                const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                const PathFunction& f, double t, const std::vector<double>& R_grid,
                                SamplerOptions opt);

}  // namespace bridgelab
