#pragma once

#include <span>
#include <vector>

namespace bridgelab {

double log_add_exp(double a, double b);
double log_sum_exp(std::span<const double> xs);

/// log I_n(x) for integer n and x > 0, by the power series summed in log space.
double log_bessel_i(int n, double x);

double poisson_log_pmf(long long n, double lambda);

/// log P(N >= n) for N ~ Poisson(lambda).
double poisson_log_tail(long long n, double lambda);

/// Least-squares fit of y against the given basis columns.
std::vector<double> least_squares(const std::vector<std::vector<double>>& columns,
                                  const std::vector<double>& y);

/// Coefficients of log tail(R) ~ a R log R + b R + c log R + d.
struct TailExpansionFit {
  double a = 0;
  double b = 0;
  double c = 0;
  double d = 0;
  double max_abs_residual = 0;
};

TailExpansionFit fit_tail_expansion(const std::vector<double>& R, const std::vector<double>& log_tail);

/// Fit of y ~ b R + c log R + d with the R log R coefficient held fixed at a.
TailExpansionFit fit_tail_expansion_fixed_leading(const std::vector<double>& R,
                                                  const std::vector<double>& log_tail, double a);

}  // namespace bridgelab
