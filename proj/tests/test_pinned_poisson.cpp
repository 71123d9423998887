#include <doctest.h>

#include <cmath>
#include <vector>

#include "bridgelab/error.hpp"
#include "bridgelab/pinned_poisson.hpp"
#include "bridgelab/special.hpp"

using namespace bridgelab;

namespace {

// Independent route: condition two Poisson counts on k N_k = N_{-1}.
std::vector<double> conditional_poisson(int k, double phi, int n_max) {
  const double jm = 1.3;
  const double jk = phi / std::pow(jm, k);
  std::vector<long double> w(n_max + 1);
  long double total = 0;
  for (int n = 0; n <= n_max; ++n) {
    long double a = std::exp(static_cast<long double>(-jk) + n * std::log(static_cast<long double>(jk)) -
                             std::lgamma(static_cast<long double>(n) + 1));
    long double b = std::exp(static_cast<long double>(-jm) + k * n * std::log(static_cast<long double>(jm)) -
                             std::lgamma(static_cast<long double>(k) * n + 1));
    w[n] = a * b;
    total += w[n];
  }
  std::vector<double> out(n_max + 1);
  for (int n = 0; n <= n_max; ++n) out[n] = static_cast<double>(w[n] / total);
  return out;
}

std::vector<IntegerFunction> polynomials() {
  return {[](long long) { return 1.0; }, [](long long n) { return double(n); },
          [](long long n) { return double(n) * n - 3.0 * n + 1; },
          [](long long n) { return double(n) * n * n - 0.5 * n; }};
}

// Exact P(f(N) >= E f + R) for N ~ Poisson(lambda).
double exact_poisson_tail(double lambda, const IntegerFunction& f, double R) {
  const long long N = static_cast<long long>(lambda + 200);
  double ef = 0;
  for (long long n = 0; n <= N; ++n) ef += std::exp(poisson_log_pmf(n, lambda)) * f(n);
  double tail = 0;
  for (long long n = 0; n <= N; ++n)
    if (f(n) >= ef + R - 1e-12) tail += std::exp(poisson_log_pmf(n, lambda));
  return tail;
}

}  // namespace

TEST_CASE("rho for k=1, Phi=1 is 1/(I0(2) n!^2)") {
  auto r = rho(1, 1.0);
  const double i0_2 = 2.2795853023360673;
  CHECK(r.pmf(0) == doctest::Approx(1 / i0_2).epsilon(1e-14));
  CHECK(r.pmf(0) == doctest::Approx(0.43868).epsilon(1e-5));
  CHECK(r.pmf(3) == doctest::Approx(1 / (i0_2 * 36.0)).epsilon(1e-13));
  CHECK(std::exp(log_bessel_i(0, 2.0)) == doctest::Approx(i0_2).epsilon(1e-14));
}

TEST_CASE("rho matches the conditional Poisson oracle") {
  for (int k = 1; k <= 3; ++k) {
    for (double phi : {0.5, 1.0, 4.0}) {
      auto r = rho(k, phi);
      auto oracle = conditional_poisson(k, phi, 60);
      double tv = 0;
      for (int n = 0; n <= 60; ++n) tv += std::abs(r.pmf(n) - oracle[n]);
      CHECK(0.5 * tv <= 1e-12);
      double mass = 0;
      for (int n = 0; n <= r.support_cut; ++n) mass += r.pmf(n);
      CHECK(mass >= 1 - 1e-12);
      CHECK(mass <= 1 + 1e-12);
      CHECK(r.norm_error < 1e-200);
      // Ratio recursion at every support point.
      for (int n = 1; n <= r.support_cut; ++n) {
        double ratio = std::exp(r.log_pmf[n - 1] - r.log_pmf[n]);
        CHECK(std::abs(ratio / (ratio_polynomial(k, n) / phi) - 1) <= 1e-12);
      }
      CHECK(r.pmf(0) / r.pmf(1) == doctest::Approx(std::tgamma(k + 1.0) / phi).epsilon(1e-12));
    }
  }
}

TEST_CASE("duality and Chen identities") {
  for (int k = 1; k <= 3; ++k)
    for (double phi : {0.5, 1.0, 4.0}) CHECK(check_duality(rho(k, phi), polynomials()) <= 1e-10);
  // Indicator functions recover the ratio recursion.
  auto r = rho(2, 1.5);
  for (int z = 1; z < 8; ++z) {
    IntegerFunction ind = [z](long long n) { return n == z ? 1.0 : 0.0; };
    CHECK(check_duality(r, {ind}) <= 1e-14);
  }
  for (double lambda : {0.5, 1.0, 7.0}) CHECK(chen_identity_residual(lambda, polynomials()) <= 1e-10);
}

TEST_CASE("interpolation measure") {
  for (int k = 1; k <= 3; ++k) {
    for (double phi : {0.5, 1.0, 4.0}) {
      auto r = rho(k, phi);
      auto pi = interpolation_measure(r);
      CHECK(std::exp(pi.log_z) <= k + 1 + 1e-12);
      for (int n = 0; n < 10; ++n)
        CHECK(pi.pmf((k + 1) * n) == doctest::Approx(r.pmf(n) / std::exp(pi.log_z)).epsilon(1e-12));
    }
  }
  auto r = rho(1, 1.0);
  auto pi = interpolation_measure(r);
  CHECK(pi.alpha_of(1) == 0.5);
  CHECK(pi.n_of(5) == 2);
  CHECK(pi.pmf(1) == doctest::Approx(std::sqrt(r.pmf(0) * r.pmf(1)) / std::exp(pi.log_z)).epsilon(1e-12));
}

TEST_CASE("ratios of the interpolation measure follow the Phi^(-1/(k+1)) law") {
  for (int k = 1; k <= 3; ++k) {
    auto pi1 = interpolation_measure(rho(k, 1.0));
    auto rep1 = mlsi_machinery(k, 1.0);
    for (double phi : {0.5, 4.0}) {
      auto pi = interpolation_measure(rho(k, phi));
      auto rep = mlsi_machinery(k, phi);
      for (int m = 1; m < 12 * (k + 1); ++m) {
        double c_phi = pi.pmf(m - 1) / pi.pmf(m);
        double c_one = pi1.pmf(m - 1) / pi1.pmf(m);
        CHECK(c_phi == doctest::Approx(std::pow(phi, -1.0 / (k + 1)) * c_one).epsilon(1e-10));
        CHECK(rep.c[m] == doctest::Approx(c_phi).epsilon(1e-10));
        CHECK(rep1.c[m] == doctest::Approx(c_one).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("MLSI machinery") {
  for (int k = 1; k <= 3; ++k) {
    auto one = mlsi_machinery(k, 1.0);
    for (double phi : {0.5, 1.0, 4.0}) {
      auto rep = mlsi_machinery(k, phi);
      for (size_t m = 0; m + 1 < rep.c_tilde.size(); ++m)
        CHECK(rep.c_tilde[m + 1] - rep.c_tilde[m] >= rep.delta - 1e-10);
      CHECK(rep.delta > 0);
      // Increments approach the asymptote far out.
      const size_t end = rep.c_tilde.size() - 1;
      double block = rep.c_tilde[end] - rep.c_tilde[end - (k + 1)];
      CHECK(block == doctest::Approx(rep.block_asymptote).epsilon(0.02));
      CHECK(rep.mlsi_constant / one.mlsi_constant == doctest::Approx(std::pow(phi, 1.0 / (k + 1))).epsilon(1e-12));
      CHECK(rep.epsilon >= one.epsilon * one.epsilon);
      CHECK(rep.epsilon <= 1.0);
    }
  }
  CHECK_THROWS_AS(mlsi_machinery(2, 1.0, 20), Error);
}

TEST_CASE("Herbst bound values") {
  CHECK(herbst_bound(1.0, 2.0) == doctest::Approx(std::exp(2.0) / 16).epsilon(1e-14));
  CHECK(herbst_bound(1.0, 0.0) == 1.0);
  CHECK(herbst_bound(1.0, 1e-9) == doctest::Approx(1.0).epsilon(1e-12));
  // The alternative form equals exp(-4(log 2 + 1)) here and exp(-2 lambda) at R = 0.
  CHECK(std::exp(herbst_log_bound_alternative(1.0, 2.0)) == doctest::Approx(1.147e-3).epsilon(1e-3));
  CHECK(std::exp(herbst_log_bound_alternative(5.0, 0.0)) == doctest::Approx(std::exp(-10.0)));
}

TEST_CASE("Herbst bound dominates exact Poisson tails of 1-Lipschitz functions") {
  std::vector<IntegerFunction> fns = {[](long long n) { return double(n); },
                                      [](long long n) { return -double(n); },
                                      [](long long n) { return double(n / 2); },
                                      [](long long n) { return std::abs(double(n) - 3); }};
  for (double lambda : {0.5, 1.0, 5.0}) {
    for (const auto& f : fns) {
      for (int R = 0; R <= 30; ++R) {
        double exact = exact_poisson_tail(lambda, f, R);
        CHECK(exact <= herbst_bound(lambda, R) * (1 + 1e-12));
      }
    }
    for (int R = 1; R <= 30; ++R) {
      double exact = std::exp(poisson_log_tail(static_cast<long long>(std::ceil(lambda + R)), lambda));
      CHECK(exact <= std::exp(poisson_chernoff_log_bound(lambda, R)) * (1 + 1e-12));
    }
  }
  // The alternative form fails at R = 0 for lambda = 5.
  CHECK(exact_poisson_tail(5.0, fns[0], 0.0) > std::exp(herbst_log_bound_alternative(5.0, 0.0)));
}

TEST_CASE("t70 envelope") {
  T70Envelope e(2, 1.0);
  CHECK(e.threshold() == doctest::Approx(1.0 + 1.0 / 3));
  CHECK_THROWS_AS(e.log_bound(1.0), Error);
  try {
    e.log_bound(1.0);
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::RNotInRegime);
  }
  // Leading order -(k+1) R log R.
  for (int k = 1; k <= 3; ++k) {
    T70Envelope env(k, 1.0);
    // env(R)/R is affine in log R at large R with slope -(k+1).
    double r1 = 1e9, r2 = 1e11;
    double slope = (env.log_bound(r2) / r2 - env.log_bound(r1) / r1) / (std::log(r2) - std::log(r1));
    CHECK(slope == doctest::Approx(-(k + 1)).epsilon(1e-3));
    // Linear coefficient: subtract the leading term and compare at large R.
    double R2 = 1e12;
    double lin = (env.log_bound(R2) + (k + 1) * R2 * std::log(R2)) / R2;
    CHECK(lin == doctest::Approx(env.linear_coefficient()).epsilon(1e-3));
  }
  // Phi enters the linear coefficient as log Phi.
  T70Envelope a(2, 0.5), b(2, 4.0);
  CHECK(b.linear_coefficient() - a.linear_coefficient() == doctest::Approx(std::log(8.0)).epsilon(1e-12));
  double R = 1e10;
  CHECK((b.log_bound(R) - a.log_bound(R)) / R == doctest::Approx(std::log(8.0)).epsilon(1e-3));
}

TEST_CASE("t70 envelope dominates exact tails of rho") {
  for (int k = 1; k <= 3; ++k) {
    for (double phi : {0.5, 1.0, 4.0}) {
      auto r = rho(k, phi);
      T70Envelope env(k, phi);
      const double mean = r.mean();
      for (int R = 1; R <= 40; ++R) {
        if (R < env.threshold()) continue;
        CHECK(r.log_tail(mean + R) <= env.log_bound(R));
      }
    }
  }
}

TEST_CASE("psi stays below h") {
  std::vector<double> grid;
  for (int i = 1; i <= 500; ++i) grid.push_back(0.01 * i);
  for (double lambda : {0.5, 1.0, 2.0}) {
    CHECK(psi_vs_h_check(lambda, [](long long n) { return double(n); }, grid) <= 1e-10);
    CHECK(psi_vs_h_check(lambda, [](long long n) { return -double(n); }, grid) <= 1e-10);
  }
  // Near tau = 0 both vanish.
  CHECK(std::abs(psi_vs_h_check(1.0, [](long long n) { return double(n); }, {1e-6})) < 1e-10);
  // gamma is the series sum_k tau^k/(k k!): check a few terms by hand.
  CHECK(herbst_gamma(1.0) == doctest::Approx(1 + 1.0 / 4 + 1.0 / 18 + 1.0 / 96 + 1.0 / 600 + 1.0 / 4320).epsilon(1e-4));
}

TEST_CASE("lemma on interpolated test functions") {
  for (int k = 1; k <= 2; ++k) {
    for (double phi : {0.5, 1.0}) {
      auto id = lemma_ll_check(k, phi, [](long long n) { return double(n); });
      CHECK(id.passed);
      CHECK(id.lipschitz);
      auto half = lemma_ll_check(k, phi, [](long long n) { return double(n / 2); });
      CHECK(half.passed);
      CHECK(half.lipschitz);
      auto zero = lemma_ll_check(k, phi, [](long long) { return 0.0; });
      CHECK(zero.passed);
      CHECK(zero.lhs == doctest::Approx(-(phi + std::pow(phi, 1.0 / (k + 1)) / (k + 1))));
    }
  }
  CHECK_THROWS_AS(lemma_ll_check(1, 1.0, [](long long n) { return n + 1.0; }), Error);
}
