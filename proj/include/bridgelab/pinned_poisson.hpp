#pragma once

#include <functional>
#include <vector>

namespace bridgelab {

/// Law of n when k N_k = N_{-1} for independent Poisson counts with
/// j_{-1}^k j_k = Phi: rho(n) proportional to Phi^n / (n! (kn)!).
struct PinnedPoisson {
  int k = 1;
  double phi = 1;
  std::vector<double> log_pmf;  // n = 0..support_cut
  int support_cut = 0;
  double norm_error = 0;      // upper bound on the truncated mass
  double log_normalizer = 0;  // log of the sum of unnormalised weights

  double log_weight(long long n) const;
  /// Valid for every n >= 0, also past the stored support.
  double log_pmf_at(long long n) const;
  double pmf(long long n) const;
  double mean() const;
  /// log P(n >= threshold), summed analytically past the support cut.
  double log_tail(double threshold) const;
};

/// Weights accumulated until w(n)/w(argmax) < tail_tol * 1e-6.
PinnedPoisson rho(int k, double phi, double tail_tol = 1e-294);

/// n * prod_{i<k} (k n - i).
double ratio_polynomial(int k, double n);

using IntegerFunction = std::function<double(long long)>;

/// max over f of |Phi E f(n+1) - E f(n) n prod_{i<k}(kn-i)|.
double check_duality(const PinnedPoisson& dist, const std::vector<IntegerFunction>& test_fns);

/// max over f of |lambda E f(n+1) - E n f(n)| under Poisson(lambda).
double chen_identity_residual(double lambda, const std::vector<IntegerFunction>& test_fns);

/// Geometric interpolation of rho on the refined grid m, with
/// n(m) = floor(m/(k+1)) and alpha(m) = m/(k+1) - n(m).
struct InterpolationMeasure {
  int k = 1;
  double phi = 1;
  std::vector<double> log_pmf;  // m = 0..(k+1)*(support_cut+1)
  double log_z = 0;             // log Z_Phi against the normalised rho

  long long n_of(long long m) const { return m / (k + 1); }
  double alpha_of(long long m) const {
    return static_cast<double>(m) / (k + 1) - static_cast<double>(n_of(m));
  }
  double pmf(long long m) const;
};

/// Throws DomainError if the normaliser exceeds k+1.
InterpolationMeasure interpolation_measure(const PinnedPoisson& rho);

struct MlsiReport {
  int k = 1;
  double phi = 1;
  std::vector<double> c;        // c(m) = pi(m-1)/pi(m), m = 0..m_max+k; c(0) = 0
  std::vector<double> c_tilde;  // smoothed with v = k+1, m = 0..m_max
  double delta = 0;             // smallest increment of c_tilde over the range
  double delta_asymptote = 0;   // limiting per-step increment
  double block_asymptote = 0;   // limiting increment over k+1 steps
  double epsilon = 0;           // min of pi/pi_tilde and its inverse
  double direct_constant = 0;   // delta^-1 exp(4/epsilon) at this Phi
  double structural_constant = 0;  // delta_1^-1 exp(4/epsilon_1^2), from Phi = 1
  double mlsi_constant = 0;        // Phi^(1/(k+1)) structural_constant
};

/// Throws RangeTooSmall when m_max < 10(k+1) or c_tilde is not strictly
/// increasing over the range.
MlsiReport mlsi_machinery(int k, double phi, int m_max = 0);

/// Deviation bound for 1-Lipschitz functions under a measure with the
/// modified log-Sobolev constant lambda:
/// exp(R - (R + 2 lambda) log(1 + R/(2 lambda))).
double herbst_bound(double lambda_mlsi, double R);
double herbst_log_bound(double lambda_mlsi, double R);
/// The same bound in the form -(R+2lambda)[log(1+R/(2lambda)) + 1]; kept
/// for comparison, it does not dominate Poisson tails near R = 0.
double herbst_log_bound_alternative(double lambda_mlsi, double R);
/// -(R/4) log(1 + R/(2 lambda)).
double bobkov_log_bound(double lambda, double R);
/// Chernoff bound for the Poisson identity: -R(log(1+R/l) - 1) - l log(1+R/l).
double poisson_chernoff_log_bound(double lambda, double R);

/// Explicit tail envelope for 1-Lipschitz f under rho_Phi:
///   log(k+1) + R' - (R' + 2 L) log(1 + R'/(2 L)),  R' = (k+1)(R - M),
/// with M = Phi + Phi^(1/(k+1))/(k+1) and L the modified log-Sobolev
/// constant of the interpolation measure.
class T70Envelope {
 public:
  T70Envelope(int k, double phi);

  double threshold() const { return M_; }
  double lambda_mlsi() const { return lambda_; }
  double structural_constant() const { return structural_; }
  /// Coefficients of the large-R expansion -(k+1) R log R + (log Phi + c) R.
  double leading_coefficient() const { return -(k_ + 1.0); }
  double linear_coefficient() const;
  /// Throws RNotInRegime for R < threshold().
  double log_bound(double R) const;

 private:
  int k_;
  double phi_;
  double M_;
  double structural_;
  double lambda_;
};

double t70_envelope(int k, double phi, double R);

/// max over tau of psi_tau - h_tau, psi_tau = log E exp(tau f) under
/// Poisson(lambda), h_tau = tau E f + lambda tau gamma(tau).
double psi_vs_h_check(double lambda, const IntegerFunction& f, const std::vector<double>& tau_grid);

/// gamma(tau) = sum_k tau^k / (k k!).
double herbst_gamma(double tau);

struct LemmaLLResult {
  bool passed = false;
  double lhs = 0;  // E_pi g - M
  double rhs = 0;  // E_rho f
  double max_increment = 0;  // max |g(m+1) - g(m)|
  bool lipschitz = false;    // max_increment <= 1/(k+1)
};

/// Checks E_pi g - M <= E_rho f with g the interpolation of f on the
/// refined grid; f must be 1-Lipschitz with f(0) = 0.
LemmaLLResult lemma_ll_check(int k, double phi, const IntegerFunction& f);

}  // namespace bridgelab
