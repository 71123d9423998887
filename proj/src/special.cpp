#include "bridgelab/special.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bridgelab/error.hpp"

namespace bridgelab {

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double log_sum_exp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double log_bessel_i(int n, double x) {
  if (!(x > 0)) throw Error(ErrorCode::DomainError, "log_bessel_i needs x > 0");
  n = std::abs(n);
  // Terms t_k = (x/2)^(2k+n) / (k! (k+n)!); sum relative to the largest.
  const double lh = std::log(0.5 * x);
  auto log_term = [&](long long k) {
    return (2.0 * k + n) * lh - std::lgamma(k + 1.0) - std::lgamma(k + n + 1.0);
  };
  // Peak where (x/2)^2 ~ (k+1)(k+n+1).
  double q = 0.25 * x * x;
  long long peak = std::max(0LL, static_cast<long long>(std::floor(
                                     0.5 * (-(n + 2.0) + std::sqrt(n * n + 4.0 * q)))));
  const double top = log_term(peak);
  double s = 0;
  for (long long k = peak; k >= 0; --k) {
    double r = log_term(k) - top;
    s += std::exp(r);
    if (r < -745) break;
  }
  for (long long k = peak + 1;; ++k) {
    double r = log_term(k) - top;
    s += std::exp(r);
    if (r < -745 || (r < -60 && k > peak + 10)) break;
  }
  return top + std::log(s);
}

double poisson_log_pmf(long long n, double lambda) {
  if (n < 0) return -std::numeric_limits<double>::infinity();
  if (lambda == 0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return n * std::log(lambda) - lambda - std::lgamma(n + 1.0);
}

double poisson_log_tail(long long n, double lambda) {
  if (n <= 0) return 0.0;
  if (n <= lambda) {
    // The complement is at most about one half here; no cancellation issue.
    double below = 0;
    for (long long i = 0; i < n; ++i) below += std::exp(poisson_log_pmf(i, lambda));
    return std::log1p(-below);
  }
  const double first = poisson_log_pmf(n, lambda);
  double s = 0;
  for (long long i = n;; ++i) {
    double r = poisson_log_pmf(i, lambda) - first;
    s += std::exp(r);
    if (r < -60) break;
  }
  return first + std::log(s);
}

std::vector<double> least_squares(const std::vector<std::vector<double>>& columns,
                                  const std::vector<double>& y) {
  const Eigen::Index rows = static_cast<Eigen::Index>(y.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(columns.size());
  if (rows < cols) throw Error(ErrorCode::DomainError, "fewer data points than fit parameters");
  Eigen::MatrixXd A(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) A(r, c) = columns[c][r];
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(y.data(), rows);
  Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  return {x.data(), x.data() + cols};
}

namespace {

std::vector<double> column(const std::vector<double>& R, double (*f)(double)) {
  std::vector<double> out(R.size());
  std::transform(R.begin(), R.end(), out.begin(), f);
  return out;
}

double r_log_r(double r) { return r * std::log(r); }
double ident(double r) { return r; }
double log_of(double r) { return std::log(r); }
double one(double) { return 1.0; }

}  // namespace

TailExpansionFit fit_tail_expansion(const std::vector<double>& R, const std::vector<double>& log_tail) {
  auto x = least_squares({column(R, r_log_r), column(R, ident), column(R, log_of), column(R, one)},
                         log_tail);
  TailExpansionFit fit{x[0], x[1], x[2], x[3], 0};
  for (size_t i = 0; i < R.size(); ++i) {
    double pred = fit.a * r_log_r(R[i]) + fit.b * R[i] + fit.c * std::log(R[i]) + fit.d;
    fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(pred - log_tail[i]));
  }
  return fit;
}

TailExpansionFit fit_tail_expansion_fixed_leading(const std::vector<double>& R,
                                                  const std::vector<double>& log_tail, double a) {
  std::vector<double> y(R.size());
  for (size_t i = 0; i < R.size(); ++i) y[i] = log_tail[i] - a * r_log_r(R[i]);
  auto x = least_squares({column(R, ident), column(R, log_of), column(R, one)}, y);
  TailExpansionFit fit{a, x[0], x[1], x[2], 0};
  for (size_t i = 0; i < R.size(); ++i) {
    double pred = fit.b * R[i] + fit.c * std::log(R[i]) + fit.d;
    fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(pred - y[i]));
  }
  return fit;
}

}  // namespace bridgelab
