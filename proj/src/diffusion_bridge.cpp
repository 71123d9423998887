#include "bridgelab/diffusion_bridge.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "bridgelab/error.hpp"
#include "bridgelab/parallel.hpp"

namespace bridgelab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void throw_gamma_domain() {
  throw Error(ErrorCode::DomainError, "gamma_alpha needs alpha >= 0 and t in (0,1)");
}

namespace {

double log_cosh(double x) {
  double a = std::abs(x);
  return a + std::log1p(std::exp(-2 * a)) - std::log(2.0);
}

void require_dim(int dim) {
  if (dim < 1) throw Error(ErrorCode::DimensionTooSmall, "potential dimension must be >= 1");
}

}  // namespace

GradientPotential zero_potential(int dim) {
  require_dim(dim);
  GradientPotential p;
  p.name = "zero";
  p.dim = dim;
  p.U = [](double, const VectorXd&) { return 0.0; };
  p.grad = [dim](double, const VectorXd&) { return VectorXd::Zero(dim).eval(); };
  p.laplacian = [](double, const VectorXd&) { return 0.0; };
  p.dt = [](double, const VectorXd&) { return 0.0; };
  p.script_u = [](double, const VectorXd&) { return 0.0; };
  p.script_u_grad = p.grad;
  p.script_u_hess = [dim](double, const VectorXd&) { return MatrixXd::Zero(dim, dim).eval(); };
  return p;
}

GradientPotential ou_potential(double alpha, int dim) {
  require_dim(dim);
  GradientPotential p;
  p.name = "ou";
  p.dim = dim;
  p.U = [alpha](double, const VectorXd& z) { return 0.5 * alpha * z.squaredNorm(); };
  p.grad = [alpha](double, const VectorXd& z) { return (alpha * z).eval(); };
  p.laplacian = [alpha, dim](double, const VectorXd&) { return dim * alpha; };
  p.dt = [](double, const VectorXd&) { return 0.0; };
  p.script_u = [alpha, dim](double, const VectorXd& z) {
    return 0.5 * alpha * alpha * z.squaredNorm() - 0.5 * dim * alpha;
  };
  p.script_u_grad = [alpha](double, const VectorXd& z) { return (alpha * alpha * z).eval(); };
  p.script_u_hess = [alpha, dim](double, const VectorXd&) {
    return (alpha * alpha * MatrixXd::Identity(dim, dim)).eval();
  };
  return p;
}

GradientPotential ou_logcosh_potential(double alpha, double eps, int dim) {
  require_dim(dim);
  GradientPotential p;
  p.name = "ou-plus-logcosh";
  p.dim = dim;
  p.U = [alpha, eps](double, const VectorXd& z) {
    return 0.5 * alpha * z.squaredNorm() + eps * log_cosh(z[0]);
  };
  p.grad = [alpha, eps](double, const VectorXd& z) {
    VectorXd g = alpha * z;
    g[0] += eps * std::tanh(z[0]);
    return g;
  };
  p.laplacian = [alpha, eps, dim](double, const VectorXd& z) {
    double c = std::cosh(z[0]);
    return dim * alpha + eps / (c * c);
  };
  p.dt = [](double, const VectorXd&) { return 0.0; };
  // With T = tanh z1 and S = sech^2 z1 the perturbation adds
  // g(z1) = alpha eps z1 T + eps^2 T^2 / 2 - eps S / 2.
  p.script_u = [alpha, eps, dim](double, const VectorXd& z) {
    double T = std::tanh(z[0]);
    double S = 1 - T * T;
    return 0.5 * alpha * alpha * z.squaredNorm() - 0.5 * dim * alpha + alpha * eps * z[0] * T +
           0.5 * eps * eps * T * T - 0.5 * eps * S;
  };
  p.script_u_grad = [alpha, eps](double, const VectorXd& z) {
    double T = std::tanh(z[0]);
    double S = 1 - T * T;
    VectorXd g = alpha * alpha * z;
    g[0] += alpha * eps * (T + z[0] * S) + (eps * eps + eps) * T * S;
    return g;
  };
  p.script_u_hess = [alpha, eps, dim](double, const VectorXd& z) {
    double T = std::tanh(z[0]);
    double S = 1 - T * T;
    MatrixXd h = alpha * alpha * MatrixXd::Identity(dim, dim);
    h(0, 0) += alpha * eps * (2 * S - 2 * z[0] * S * T) + (eps * eps + eps) * (S * S - 2 * T * T * S);
    return h;
  };
  return p;
}

GradientPotential quartic_potential(double a, int dim) {
  require_dim(dim);
  GradientPotential p;
  p.name = "quartic";
  p.dim = dim;
  p.U = [a](double, const VectorXd& z) {
    double s = 0;
    for (double v : z) s += (v * v - 1) * (v * v - 1);
    return a * s;
  };
  p.grad = [a](double, const VectorXd& z) {
    VectorXd g(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) g[i] = 4 * a * z[i] * (z[i] * z[i] - 1);
    return g;
  };
  p.laplacian = [a](double, const VectorXd& z) {
    double s = 0;
    for (double v : z) s += a * (12 * v * v - 4);
    return s;
  };
  p.dt = [](double, const VectorXd&) { return 0.0; };
  // Per coordinate u = U'^2/2 - U''/2, u' = U'U'' - U'''/2,
  // u'' = U''^2 + U'U''' - U''''/2.
  p.script_u = [a](double, const VectorXd& z) {
    double s = 0;
    for (double v : z) {
      double d1 = 4 * a * v * (v * v - 1);
      s += 0.5 * d1 * d1 - 0.5 * a * (12 * v * v - 4);
    }
    return s;
  };
  p.script_u_grad = [a](double, const VectorXd& z) {
    VectorXd g(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      double v = z[i];
      g[i] = 4 * a * v * (v * v - 1) * a * (12 * v * v - 4) - 12 * a * v;
    }
    return g;
  };
  p.script_u_hess = [a](double, const VectorXd& z) {
    MatrixXd h = MatrixXd::Zero(z.size(), z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      double w = z[i] * z[i];
      h(i, i) = a * a * ((12 * w - 4) * (12 * w - 4) + 96 * w * w - 96 * w) - 12 * a;
    }
    return h;
  };
  return p;
}

GradientPotential make_potential(const std::string& name, double alpha, double eps, int dim) {
  if (name == "zero") return zero_potential(dim);
  if (name == "ou") return ou_potential(alpha, dim);
  if (name == "ou-plus-logcosh") return ou_logcosh_potential(alpha, eps, dim);
  if (name == "quartic") return quartic_potential(alpha, dim);
  throw Error(ErrorCode::ParseError, "unknown potential '" + name + "'");
}

namespace {

VectorXd fd_gradient(const ScalarField& f, double t, const VectorXd& z, double h) {
  VectorXd g(z.size());
  VectorXd p = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    p[i] = z[i] + h;
    double up = f(t, p);
    p[i] = z[i] - h;
    double dn = f(t, p);
    p[i] = z[i];
    g[i] = (up - dn) / (2 * h);
  }
  return g;
}

// Fourth-order gradient: Richardson on central differences.
VectorXd fd_gradient_richardson(const ScalarField& f, double t, const VectorXd& z, double h) {
  return (4 * fd_gradient(f, t, z, h / 2) - fd_gradient(f, t, z, h)) / 3;
}

double fd_laplacian(const ScalarField& f, double t, const VectorXd& z, double h) {
  double s = 0;
  double c = f(t, z);
  VectorXd p = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    p[i] = z[i] + h;
    double up = f(t, p);
    p[i] = z[i] - h;
    double dn = f(t, p);
    p[i] = z[i];
    s += (up - 2 * c + dn) / (h * h);
  }
  return s;
}

MatrixXd fd_hessian(const ScalarField& f, double t, const VectorXd& z, double h) {
  const Eigen::Index d = z.size();
  MatrixXd H(d, d);
  const double c = f(t, z);
  VectorXd p = z;
  for (Eigen::Index i = 0; i < d; ++i) {
    p[i] = z[i] + h;
    double up = f(t, p);
    p[i] = z[i] - h;
    double dn = f(t, p);
    p[i] = z[i];
    H(i, i) = (up - 2 * c + dn) / (h * h);
    for (Eigen::Index k = i + 1; k < d; ++k) {
      double s = 0;
      for (int a : {1, -1})
        for (int b : {1, -1}) {
          p[i] = z[i] + a * h;
          p[k] = z[k] + b * h;
          s += a * b * f(t, p);
        }
      p[i] = z[i];
      p[k] = z[k];
      H(i, k) = H(k, i) = s / (4 * h * h);
    }
  }
  return H;
}

MatrixXd fd_hessian_richardson(const ScalarField& f, double t, const VectorXd& z, double h) {
  return (4 * fd_hessian(f, t, z, h / 2) - fd_hessian(f, t, z, h)) / 3;
}

constexpr double kOuterStep = 1e-3;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorCode::EvaluatorFailure, std::string(what) + " is not finite");
}

}  // namespace

void validate_potential(const GradientPotential& p, std::uint64_t seed, int probes) {
  if (!p.U) throw Error(ErrorCode::EvaluatorFailure, "potential has no U evaluator");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.5);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  auto close = [](double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(1.0, std::abs(a));
  };
  for (int k = 0; k < probes; ++k) {
    VectorXd z(p.dim);
    for (auto& v : z) v = normal(rng);
    double t = unif(rng);
    require_finite(p.U(t, z), "U");
    if (p.grad) {
      VectorXd ga = p.grad(t, z);
      VectorXd gf = fd_gradient_richardson(p.U, t, z, 1e-3);
      for (int i = 0; i < p.dim; ++i) {
        require_finite(ga[i], "grad U");
        if (!close(ga[i], gf[i], 1e-5))
          throw Error(ErrorCode::EvaluatorFailure,
                      p.name + ": analytic grad U disagrees with finite differences");
      }
    }
    if (p.script_u && p.grad && p.laplacian && p.dt) {
      double direct = 0.5 * p.grad(t, z).squaredNorm() - p.dt(t, z) - 0.5 * p.laplacian(t, z);
      if (!close(p.script_u(t, z), direct, 1e-9))
        throw Error(ErrorCode::EvaluatorFailure, p.name + ": script U disagrees with its definition");
    }
    if (p.script_u && p.script_u_grad) {
      VectorXd ga = p.script_u_grad(t, z);
      VectorXd gf = fd_gradient_richardson(p.script_u, t, z, 1e-3);
      for (int i = 0; i < p.dim; ++i)
        if (!close(ga[i], gf[i], 1e-5))
          throw Error(ErrorCode::EvaluatorFailure,
                      p.name + ": analytic grad of script U disagrees with finite differences");
    }
  }
}

ReciprocalCharacteristicField script_u(const GradientPotential& p) {
  validate_potential(p);
  ReciprocalCharacteristicField f;
  f.dim = p.dim;
  f.analytic = p.script_u && p.script_u_grad && p.script_u_hess;
  const double h = p.fd_step;
  if (p.script_u) {
    f.value = p.script_u;
  } else {
    auto U = p.U;
    auto grad = p.grad ? p.grad : VectorField([U, h](double t, const VectorXd& z) {
      return fd_gradient(U, t, z, h);
    });
    auto lap = p.laplacian ? p.laplacian : ScalarField([U, h](double t, const VectorXd& z) {
      return fd_laplacian(U, t, z, std::max(h, 1e-3));
    });
    auto dt = p.dt ? p.dt : ScalarField([U, h](double t, const VectorXd& z) {
      return (U(t + h, z) - U(t - h, z)) / (2 * h);
    });
    f.value = [grad, lap, dt](double t, const VectorXd& z) {
      return 0.5 * grad(t, z).squaredNorm() - dt(t, z) - 0.5 * lap(t, z);
    };
  }
  auto value = f.value;
  f.gradient = p.script_u_grad ? p.script_u_grad : VectorField([value](double t, const VectorXd& z) {
    return fd_gradient_richardson(value, t, z, kOuterStep);
  });
  f.hessian = p.script_u_hess ? p.script_u_hess : MatrixField([value](double t, const VectorXd& z) {
    return fd_hessian_richardson(value, t, z, kOuterStep);
  });
  return f;
}

bool Box::contains(const VectorXd& z) const {
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (z[i] < lo[i] || z[i] > hi[i]) return false;
  return true;
}

E17Report check_condition_e17(const ReciprocalCharacteristicField& field, double alpha,
                              const Box& box, int grid_n) {
  if (grid_n < 8) throw Error(ErrorCode::RangeTooSmall, "e17 grid needs at least 8 points per axis");
  const int d = field.dim;
  if (box.lo.size() != d || box.hi.size() != d)
    throw Error(ErrorCode::DomainError, "box dimension differs from the potential");
  E17Report r;
  r.threshold = 0.5 * alpha * alpha;
  r.min_eigenvalue = std::numeric_limits<double>::infinity();
  std::vector<int> idx(d, 0);
  VectorXd z(d);
  for (;;) {
    for (int i = 0; i < d; ++i)
      z[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * idx[i] / (grid_n - 1.0);
    for (int k = 0; k < grid_n; ++k) {
      double t = k / (grid_n - 1.0);
      MatrixXd H = field.hessian(t, z);
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (H + H.transpose()), Eigen::EigenvaluesOnly);
      double ev = es.eigenvalues()[0];
      require_finite(ev, "Hessian eigenvalue");
      ++r.points;
      if (ev < r.min_eigenvalue) {
        r.min_eigenvalue = ev;
        r.witness_t = t;
        r.witness_z = z;
      }
    }
    int i = 0;
    while (i < d && ++idx[i] == grid_n) idx[i++] = 0;
    if (i == d) break;
  }
  r.passed = r.min_eigenvalue >= r.threshold - 1e-6;
  return r;
}

OuBridgeMoments ou_bridge_moments(double alpha, const VectorXd& x, const VectorXd& y, double t) {
  if (!(alpha >= 0)) throw Error(ErrorCode::DomainError, "alpha must be >= 0");
  if (!(t > 0 && t < 1)) throw Error(ErrorCode::DomainError, "t must lie in (0,1)");
  using detail::one_minus_exp_ratio;
  // Inverse variances of the OU transition over [0,t] and [t,1].
  const double pa = 1 / (t * one_minus_exp_ratio(2 * alpha * t));
  const double pb = 1 / ((1 - t) * one_minus_exp_ratio(2 * alpha * (1 - t)));
  const double ea = std::exp(-alpha * t);
  const double eb = std::exp(-alpha * (1 - t));
  const double precision = pa + pb * eb * eb;
  OuBridgeMoments m;
  m.mean = (pa * ea * x + pb * eb * y) / precision;
  m.variance = 1 / precision;
  return m;
}

int PathEnsemble::record_index(int grid_index) const {
  auto it = std::find(record.begin(), record.end(), grid_index);
  if (it == record.end()) throw Error(ErrorCode::DomainError, "grid index was not recorded");
  return static_cast<int>(it - record.begin());
}

PathEnsemble sample_diffusion_bridge(const GradientPotential& p, const VectorXd& x,
                                     const VectorXd& y, const SamplerOptions& opt) {
  const int d = p.dim;
  if (x.size() != d || y.size() != d)
    throw Error(ErrorCode::DomainError, "endpoint dimension differs from the potential");
  if (opt.steps < 1 || opt.n_paths < 1)
    throw Error(ErrorCode::RangeTooSmall, "need at least one step and one path");
  auto field = script_u(p);
  const int M = opt.steps;
  const double dt = 1.0 / M;

  PathEnsemble e;
  e.dim = d;
  e.n_paths = opt.n_paths;
  for (int m = 0; m <= M; ++m) e.grid.push_back(static_cast<double>(m) / M);
  e.record = opt.record;
  if (e.record.empty())
    for (int m = 0; m <= M; ++m) e.record.push_back(m);
  for (int m : e.record)
    if (m < 0 || m > M) throw Error(ErrorCode::DomainError, "recorded index outside the grid");
  std::vector<int> slot(M + 1, -1);
  for (size_t r = 0; r < e.record.size(); ++r) slot[e.record[r]] = static_cast<int>(r);
  const long long stride = static_cast<long long>(e.record.size()) * d;
  e.values.assign(opt.n_paths * stride, 0.0);
  e.log_weights.assign(opt.n_paths, 0.0);
  std::vector<char> leaked(opt.n_paths, 0);
  const long long blocks = (opt.n_paths + kBlockSize - 1) / kBlockSize;
  std::vector<double> block_min(blocks, std::numeric_limits<double>::infinity());
  const double u_start = field.value(0.0, x);
  const double u_end = field.value(1.0, y);

  for_each_block(opt.n_paths, opt.workers, [&](long long block, long long begin, long long end) {
    std::mt19937_64 rng(mix_seed(opt.seed, block));
    std::normal_distribution<double> normal(0.0, 1.0);
    VectorXd z(d);
    double lowest = std::min(u_start, u_end);
    for (long long path = begin; path < end; ++path) {
      z = x;
      double* out = e.values.data() + path * stride;
      if (slot[0] >= 0) std::copy(z.data(), z.data() + d, out + slot[0] * d);
      double integral = 0.5 * (u_start + u_end);
      bool outside = opt.box && !opt.box->contains(z);
      for (int m = 0; m + 1 < M; ++m) {
        // Brownian bridge step from (t_m, z) towards (1, y).
        const double left = 1.0 - e.grid[m];
        const double mean_frac = dt / left;
        const double sd = std::sqrt(dt * (left - dt) / left);
        for (int i = 0; i < d; ++i) z[i] += mean_frac * (y[i] - z[i]) + sd * normal(rng);
        double u = field.value(e.grid[m + 1], z);
        lowest = std::min(lowest, u);
        integral += u;
        if (slot[m + 1] >= 0) std::copy(z.data(), z.data() + d, out + slot[m + 1] * d);
        if (opt.box && !outside && !opt.box->contains(z)) outside = true;
      }
      if (slot[M] >= 0) std::copy(y.data(), y.data() + d, out + slot[M] * d);
      e.log_weights[path] = -integral * dt;
      leaked[path] = outside;
    }
    block_min[block] = lowest;
  });

  e.min_script_u = *std::min_element(block_min.begin(), block_min.end());
  const double top = *std::max_element(e.log_weights.begin(), e.log_weights.end());
  if (!std::isfinite(top)) throw Error(ErrorCode::DegenerateWeights, "non-finite log weights");
  e.weights.resize(opt.n_paths);
  double sum = 0;
  for (long long i = 0; i < opt.n_paths; ++i) sum += (e.weights[i] = std::exp(e.log_weights[i] - top));
  double sum_sq = 0;
  long long out_count = 0;
  for (long long i = 0; i < opt.n_paths; ++i) {
    e.weights[i] /= sum;
    sum_sq += e.weights[i] * e.weights[i];
    out_count += leaked[i];
  }
  e.effective_sample_size = 1 / sum_sq;
  e.box_leak_fraction = static_cast<double>(out_count) / opt.n_paths;
  if (e.effective_sample_size < opt.min_ess_fraction * opt.n_paths)
    throw Error(ErrorCode::DegenerateWeights,
                "effective sample size " + std::to_string(e.effective_sample_size));
  return e;
}

WeightedEstimate weighted_mean(const PathEnsemble& e, int rec, const PathFunction& f) {
  std::vector<double> fx(e.n_paths);
  VectorXd z(e.dim);
  double mu = 0;
  for (long long i = 0; i < e.n_paths; ++i) {
    for (int c = 0; c < e.dim; ++c) z[c] = e.at(i, rec, c);
    fx[i] = f(z);
    mu += e.weights[i] * fx[i];
  }
  double var = 0;
  for (long long i = 0; i < e.n_paths; ++i) {
    double r = e.weights[i] * (fx[i] - mu);
    var += r * r;
  }
  return {mu, std::sqrt(var)};
}

WeightedEstimate weighted_variance(const PathEnsemble& e, int rec, int coord) {
  double m = 0;
  for (long long i = 0; i < e.n_paths; ++i) m += e.weights[i] * e.at(i, rec, coord);
  double v = 0;
  for (long long i = 0; i < e.n_paths; ++i) {
    double c = e.at(i, rec, coord) - m;
    v += e.weights[i] * c * c;
  }
  double se = 0;
  for (long long i = 0; i < e.n_paths; ++i) {
    double c = e.at(i, rec, coord) - m;
    double r = e.weights[i] * (c * c - v);
    se += r * r;
  }
  return {v, std::sqrt(se)};
}

AccordeonReport accordeon_check(const GradientPotential& p, double alpha, const VectorXd& x,
                                const VectorXd& y, const PathFunction& f, double t,
                                const std::vector<double>& R_grid, SamplerOptions opt) {
  const double pos = t * opt.steps;
  const int index = static_cast<int>(std::lround(pos));
  if (std::abs(pos - index) > 1e-9 || index <= 0 || index >= opt.steps)
    throw Error(ErrorCode::DomainError, "t must be an interior grid time");
  opt.record = {index};
  auto e = sample_diffusion_bridge(p, x, y, opt);

  AccordeonReport rep;
  rep.gamma = gamma_alpha(alpha, t);
  rep.effective_sample_size = e.effective_sample_size;
  rep.box_leak_fraction = e.box_leak_fraction;
  std::vector<double> fx(e.n_paths);
  VectorXd z(e.dim);
  for (long long i = 0; i < e.n_paths; ++i) {
    for (int c = 0; c < e.dim; ++c) z[c] = e.at(i, 0, c);
    fx[i] = f(z);
    rep.mean_f += e.weights[i] * fx[i];
  }
  bool any_checked = false;
  bool any_mass = false;
  for (double R : R_grid) {
    AccordeonRow row;
    row.R = R;
    row.gaussian_envelope = -0.5 * rep.gamma * R * R;
    double tail = 0;
    for (long long i = 0; i < e.n_paths; ++i)
      if (fx[i] >= rep.mean_f + R) {
        tail += e.weights[i];
        ++row.exceedances;
      }
    double var = 0;
    for (long long i = 0; i < e.n_paths; ++i) {
      double ind = fx[i] >= rep.mean_f + R ? 1.0 : 0.0;
      double r = e.weights[i] * (ind - tail);
      var += r * r;
    }
    row.empirical_log_tail = tail > 0 ? std::log(tail) : -std::numeric_limits<double>::infinity();
    row.sigma_log = tail > 0 ? std::sqrt(var) / tail : 0.0;
    any_mass = any_mass || (R > 0 && row.exceedances > 0);
    if (row.exceedances >= kMinExceedances) {
      row.checked = true;
      any_checked = true;
      row.passed = row.empirical_log_tail <= row.gaussian_envelope + 3 * row.sigma_log + 1e-12;
      rep.passed = rep.passed && row.passed;
    }
    rep.rows.push_back(row);
  }
  // A tail with no mass at all is trivially below the envelope.
  if (!any_checked && any_mass)
    throw Error(ErrorCode::InsufficientTail, "no R has enough exceedances");
  return rep;
}

}  // namespace bridgelab
