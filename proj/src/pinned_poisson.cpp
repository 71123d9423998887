#include "bridgelab/pinned_poisson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "bridgelab/error.hpp"
#include "bridgelab/special.hpp"

namespace bridgelab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double ratio_polynomial(int k, double n) {
  double p = n;
  for (int i = 0; i < k; ++i) p *= k * n - i;
  return p;
}

double PinnedPoisson::log_weight(long long n) const {
  if (n < 0) return kNegInf;
  return n * std::log(phi) - std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(k) * n + 1.0);
}

double PinnedPoisson::log_pmf_at(long long n) const {
  if (n < 0) return kNegInf;
  if (n <= support_cut) return log_pmf[n];
  return log_weight(n) - log_normalizer;
}

double PinnedPoisson::pmf(long long n) const { return std::exp(log_pmf_at(n)); }

double PinnedPoisson::mean() const {
  double s = 0;
  for (int n = 0; n <= support_cut; ++n) s += n * std::exp(log_pmf[n]);
  return s;
}

double PinnedPoisson::log_tail(double threshold) const {
  long long n0 = static_cast<long long>(std::ceil(threshold));
  if (n0 <= 0) return 0.0;
  double top = kNegInf;
  std::vector<double> terms;
  for (long long n = n0;; ++n) {
    double lp = log_pmf_at(n);
    terms.push_back(lp);
    top = std::max(top, lp);
    // Weights are unimodal; stop once past the peak and negligible.
    if (n > n0 && lp < terms[terms.size() - 2] && lp < top - 60) break;
  }
  return log_sum_exp(terms);
}

PinnedPoisson rho(int k, double phi, double tail_tol) {
  if (k < 1) throw Error(ErrorCode::DomainError, "k must be >= 1");
  if (!(phi > 0) || !std::isfinite(phi)) throw Error(ErrorCode::DomainError, "Phi must be positive");
  if (!(tail_tol > 0) || tail_tol > 1e-6) throw Error(ErrorCode::DomainError, "tail_tol must lie in (0, 1e-6]");
  PinnedPoisson d;
  d.k = k;
  d.phi = phi;
  const double cut = std::log(tail_tol) + std::log(1e-6);
  double top = kNegInf;
  std::vector<double> lw;
  for (long long n = 0;; ++n) {
    double w = d.log_weight(n);
    top = std::max(top, w);
    if (n > 0 && w < lw.back() && w - top < cut) break;
    lw.push_back(w);
  }
  d.support_cut = static_cast<int>(lw.size()) - 1;
  d.log_normalizer = log_sum_exp(lw);
  d.log_pmf.resize(lw.size());
  for (size_t n = 0; n < lw.size(); ++n) d.log_pmf[n] = lw[n] - d.log_normalizer;
  // Past the cut the ratio w(n+1)/w(n) = Phi / h(n+1) keeps shrinking, so the
  // dropped mass is bounded by a geometric series.
  const long long next = d.support_cut + 1;
  const double r = phi / ratio_polynomial(k, static_cast<double>(next + 1));
  d.norm_error = std::exp(d.log_weight(next) - d.log_normalizer) / (1 - std::min(r, 0.5));
  return d;
}

double check_duality(const PinnedPoisson& dist, const std::vector<IntegerFunction>& test_fns) {
  double worst = 0;
  for (const auto& f : test_fns) {
    double lhs = 0, rhs = 0;
    for (int n = 0; n <= dist.support_cut; ++n) {
      double p = std::exp(dist.log_pmf[n]);
      lhs += p * f(n + 1);
      rhs += p * f(n) * ratio_polynomial(dist.k, n);
    }
    worst = std::max(worst, std::abs(dist.phi * lhs - rhs));
  }
  return worst;
}

double chen_identity_residual(double lambda, const std::vector<IntegerFunction>& test_fns) {
  const long long N = static_cast<long long>(lambda + 40 * std::sqrt(lambda + 1) + 60);
  double worst = 0;
  for (const auto& f : test_fns) {
    double lhs = 0, rhs = 0;
    for (long long n = 0; n <= N; ++n) {
      double p = std::exp(poisson_log_pmf(n, lambda));
      lhs += p * f(n + 1);
      rhs += p * n * f(n);
    }
    worst = std::max(worst, std::abs(lambda * lhs - rhs));
  }
  return worst;
}

double InterpolationMeasure::pmf(long long m) const {
  if (m < 0 || m >= static_cast<long long>(log_pmf.size())) return 0.0;
  return std::exp(log_pmf[m]);
}

namespace {

double interpolated_log_weight(const PinnedPoisson& r, long long m) {
  const long long n = m / (r.k + 1);
  const double a = static_cast<double>(m) / (r.k + 1) - static_cast<double>(n);
  double lw = (1 - a) * r.log_pmf_at(n);
  if (a > 0) lw += a * r.log_pmf_at(n + 1);
  return lw;
}

}  // namespace

InterpolationMeasure interpolation_measure(const PinnedPoisson& r) {
  InterpolationMeasure pi;
  pi.k = r.k;
  pi.phi = r.phi;
  const long long m_end = static_cast<long long>(r.k + 1) * (r.support_cut + 1);
  std::vector<double> lw(m_end + 1);
  for (long long m = 0; m <= m_end; ++m) lw[m] = interpolated_log_weight(r, m);
  pi.log_z = log_sum_exp(lw);
  if (pi.log_z > std::log(r.k + 1.0) + 1e-12)
    throw Error(ErrorCode::DomainError, "interpolation normaliser exceeds k+1");
  pi.log_pmf.resize(lw.size());
  for (size_t m = 0; m < lw.size(); ++m) pi.log_pmf[m] = lw[m] - pi.log_z;
  return pi;
}

MlsiReport mlsi_machinery(int k, double phi, int m_max) {
  auto r = rho(k, phi);
  const int v = k + 1;
  if (m_max == 0) m_max = std::max(10 * v, v * (r.support_cut + 1));
  if (m_max < 10 * v)
    throw Error(ErrorCode::RangeTooSmall, "m_max must be at least 10(k+1) = " + std::to_string(10 * v));

  MlsiReport rep;
  rep.k = k;
  rep.phi = phi;
  // c(m) = pi(m-1)/pi(m) = (h(n(m-1)+1)/Phi)^(1/(k+1)) for m >= 1.
  rep.c.assign(m_max + v + 1, 0.0);
  for (int m = 1; m < static_cast<int>(rep.c.size()); ++m) {
    double n = (m - 1) / v + 1;
    rep.c[m] = std::exp((std::log(ratio_polynomial(k, n)) - std::log(phi)) / v);
  }
  auto c_at = [&](int m) { return m <= 0 ? 0.0 : rep.c[m]; };
  rep.c_tilde.assign(m_max + 1, 0.0);
  for (int m = 0; m <= m_max; ++m) {
    double s = 0;
    for (int i = 0; i < v; ++i)
      s += static_cast<double>(v - i) / v * (c_at(m + i) + c_at(m - i) - 2 * c_at(m));
    rep.c_tilde[m] = c_at(m) + s / v;
  }
  rep.delta = std::numeric_limits<double>::infinity();
  for (int m = 0; m < m_max; ++m) rep.delta = std::min(rep.delta, rep.c_tilde[m + 1] - rep.c_tilde[m]);
  if (!(rep.delta > 0))
    throw Error(ErrorCode::RangeTooSmall, "smoothed ratio is not strictly increasing over the range");
  const double scale = std::exp(-std::log(phi) / v);
  rep.block_asymptote = scale * std::exp(k * std::log(static_cast<double>(k)) / v);
  rep.delta_asymptote = rep.block_asymptote / v;

  // Compare pi with the measure built from c_tilde, both normalised on the range.
  std::vector<double> lpi(m_max + 1), lpt(m_max + 1);
  double acc = 0;
  for (int m = 0; m <= m_max; ++m) {
    lpi[m] = interpolated_log_weight(r, m);
    if (m > 0) acc -= std::log(rep.c_tilde[m]);
    lpt[m] = acc;
  }
  const double zpi = log_sum_exp(lpi);
  const double zpt = log_sum_exp(lpt);
  double worst = 0;
  for (int m = 0; m <= m_max; ++m) worst = std::max(worst, std::abs((lpi[m] - zpi) - (lpt[m] - zpt)));
  rep.epsilon = std::exp(-worst);
  rep.direct_constant = std::exp(4 / rep.epsilon) / rep.delta;
  if (phi == 1.0) {
    rep.structural_constant = std::exp(4 / (rep.epsilon * rep.epsilon)) / rep.delta;
  } else {
    rep.structural_constant = mlsi_machinery(k, 1.0, 0).structural_constant;
  }
  rep.mlsi_constant = std::exp(std::log(phi) / v) * rep.structural_constant;
  return rep;
}

double herbst_log_bound(double lambda, double R) {
  if (!(lambda > 0) || R < 0) throw Error(ErrorCode::DomainError, "herbst bound needs lambda > 0, R >= 0");
  return R - (R + 2 * lambda) * std::log1p(R / (2 * lambda));
}

double herbst_bound(double lambda, double R) { return std::exp(herbst_log_bound(lambda, R)); }

double herbst_log_bound_alternative(double lambda, double R) {
  return -(R + 2 * lambda) * (std::log1p(R / (2 * lambda)) + 1);
}

double bobkov_log_bound(double lambda, double R) { return -0.25 * R * std::log1p(R / (2 * lambda)); }

double poisson_chernoff_log_bound(double lambda, double R) {
  double l = std::log1p(R / lambda);
  return -R * (l - 1) - lambda * l;
}

namespace {

double cached_structural_constant(int k) {
  static std::mutex mu;
  static std::map<int, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  double c = mlsi_machinery(k, 1.0, 0).structural_constant;
  cache.emplace(k, c);
  return c;
}

}  // namespace

T70Envelope::T70Envelope(int k, double phi) : k_(k), phi_(phi) {
  if (k < 1 || !(phi > 0)) throw Error(ErrorCode::DomainError, "envelope needs k >= 1, Phi > 0");
  const double root = std::exp(std::log(phi) / (k + 1));
  M_ = phi + root / (k + 1);
  structural_ = cached_structural_constant(k);
  lambda_ = root * structural_;
}

double T70Envelope::linear_coefficient() const {
  return std::log(phi_) + (k_ + 1) * (1 + std::log(2 * structural_ / (k_ + 1)));
}

double T70Envelope::log_bound(double R) const {
  if (R < M_)
    throw Error(ErrorCode::RNotInRegime,
                "R = " + std::to_string(R) + " is below the threshold " + std::to_string(M_));
  return std::log(k_ + 1.0) + herbst_log_bound(lambda_, (k_ + 1) * (R - M_));
}

double t70_envelope(int k, double phi, double R) { return T70Envelope(k, phi).log_bound(R); }

double herbst_gamma(double tau) {
  double term = 1;
  double s = 0;
  for (int k = 1; k < 1000; ++k) {
    term *= tau / k;
    s += term / k;
    if (std::abs(term / k) < 1e-18 * std::abs(s)) break;
  }
  return s;
}

double psi_vs_h_check(double lambda, const IntegerFunction& f, const std::vector<double>& tau_grid) {
  double worst = kNegInf;
  double ef = 0;
  {
    for (long long n = 0;; ++n) {
      double lp = poisson_log_pmf(n, lambda);
      ef += std::exp(lp) * f(n);
      if (n > lambda && lp < -800) break;
    }
  }
  for (double tau : tau_grid) {
    std::vector<double> terms;
    double top = kNegInf;
    const double tilted_mean = lambda * std::exp(std::abs(tau));
    for (long long n = 0;; ++n) {
      double t = poisson_log_pmf(n, lambda) + tau * f(n);
      terms.push_back(t);
      top = std::max(top, t);
      if (n > tilted_mean + 10 && t < top - 60) break;
    }
    double psi = log_sum_exp(terms);
    double h = tau * ef + lambda * tau * herbst_gamma(tau);
    worst = std::max(worst, psi - h);
  }
  return worst;
}

LemmaLLResult lemma_ll_check(int k, double phi, const IntegerFunction& f) {
  if (f(0) != 0) throw Error(ErrorCode::DomainError, "f(0) must be 0");
  auto r = rho(k, phi);
  auto pi = interpolation_measure(r);
  LemmaLLResult res;
  for (int n = 0; n <= r.support_cut; ++n) res.rhs += std::exp(r.log_pmf[n]) * f(n);
  double eg = 0;
  double prev = 0;
  for (long long m = 0; m < static_cast<long long>(pi.log_pmf.size()); ++m) {
    long long n = pi.n_of(m);
    double a = pi.alpha_of(m);
    double g = (1 - a) * f(n) + a * f(n + 1);
    eg += std::exp(pi.log_pmf[m]) * g;
    if (m > 0) res.max_increment = std::max(res.max_increment, std::abs(g - prev));
    prev = g;
  }
  const double M = phi + std::exp(std::log(phi) / (k + 1)) / (k + 1);
  res.lhs = eg - M;
  res.lipschitz = res.max_increment <= 1.0 / (k + 1) + 1e-12;
  res.passed = res.lhs <= res.rhs + 1e-12 && res.lipschitz;
  return res;
}

}  // namespace bridgelab
