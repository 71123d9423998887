#include "bridgelab/synthesis.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "bridgelab/error.hpp"

namespace bridgelab {

double CharacteristicPrescription::get(const std::string& id) const {
  auto it = values.find(id);
  if (it == values.end()) throw Error(ErrorCode::PrescriptionIncomplete, "no value for " + id);
  if (!(it->second > 0) || !std::isfinite(it->second))
    throw Error(ErrorCode::NonPositiveRate, "prescribed value for " + id + " is not positive");
  return it->second;
}

JumpIntensity synth_basis(const DirectedGraph& g, const ClosedWalkBasis& basis,
                          const CharacteristicPrescription& phi,
                          const std::map<std::string, double>& free_values) {
  if (basis.num_vertices != g.num_vertices() || basis.num_arcs != g.num_arcs())
    throw Error(ErrorCode::BasisMismatch, "basis was built for a different graph");
  JumpIntensity j(g);
  for (const auto& e : basis.two_cycles) {
    if (!basis.tree.contains_arc(g.arc_id(e.x, e.y))) continue;
    double value = 1.0;
    if (auto it = free_values.find(e.id); it != free_values.end()) value = it->second;
    double pe = phi.get(e.id);
    j.set(g, e.x, e.y, value);
    j.set(g, e.y, e.x, pe / value);
  }
  for (size_t i = 0; i < basis.off_tree.size(); ++i) {
    const auto& e = basis.two_cycles[basis.off_tree[i]];
    const auto& c = basis.chosen_cycles[i];
    // c = (x -> y -> tree path back to x); the tail uses tree arcs only.
    Walk back{std::vector<int>(c.walk.vertices.begin() + 1, c.walk.vertices.end())};
    double rate = std::exp(std::log(phi.get(c.id)) - log_phi(g, j, back));
    j.set(g, c.x, c.y, rate);
    j.set(g, c.y, c.x, phi.get(e.id) / rate);
  }
  j.speed = detect_speed(g, j);
  return j;
}

namespace {

// Closed walk w (front == back) cut open at its first arc a->b: the walk
// b -> ... -> a covering every other arc once.
std::vector<int> open_at(const std::vector<int>& w, int a, int b) {
  const size_t n = w.size() - 1;
  for (size_t i = 0; i < n; ++i) {
    if (w[i] == a && w[i + 1] == b) {
      std::vector<int> out;
      out.reserve(n);
      for (size_t k = 0; k < n; ++k) out.push_back(w[(i + 1 + k) % n]);
      return out;
    }
  }
  throw Error(ErrorCode::DomainError, "arc not on region boundary");
}

// Sum of log j over the arcs of w except one occurrence of a->b.
double log_phi_except(const DirectedGraph& g, const JumpIntensity& j, const std::vector<int>& w,
                      int a, int b) {
  double s = 0;
  bool skipped = false;
  for (size_t i = 0; i + 1 < w.size(); ++i) {
    if (!skipped && w[i] == a && w[i + 1] == b) {
      skipped = true;
      continue;
    }
    s += std::log(j.at(g, w[i], w[i + 1]));
  }
  return s;
}

struct MergeRecord {
  std::vector<int> region;  // contains x->y
  double log_psi_region;
  std::vector<int> face;  // contains y->x
  double log_psi_face;
  int x;
  int y;
};

}  // namespace

JumpIntensity synth_lattice(const LatticeWindow& win, const CharacteristicPrescription& phi) {
  const auto& g = win.graph();
  auto log_edge = [&](int a, int b) { return std::log(phi.get(two_cycle_id(g, a, b))); };
  // Fail early on incomplete or non-positive prescriptions.
  for (int a = 0; a < g.num_arcs(); ++a) log_edge(g.arc_source(a), g.arc_target(a));
  for (int r = 0; r + 1 < win.height(); ++r)
    for (int c = 0; c + 1 < win.width(); ++c) phi.get(win.face_id(c, r));

  std::vector<int> region = win.face(0, 0).vertices;
  double log_psi = std::log(phi.get(win.face_id(0, 0)));
  std::vector<char> merged(g.num_arcs(), 0);
  std::vector<MergeRecord> stack;

  for (int r = 0; r + 1 < win.height(); ++r) {
    for (int c = 0; c + 1 < win.width(); ++c) {
      if (c == 0 && r == 0) continue;
      std::vector<int> f = win.face(c, r).vertices;
      double log_psi_f = std::log(phi.get(win.face_id(c, r)));
      // The face's arc on the shared edge is y->x; the region carries x->y.
      int y, x;
      if (c > 0) {
        y = win.vertex(c, r);
        x = win.vertex(c, r + 1);
      } else {
        y = win.vertex(1, r);
        x = win.vertex(0, r);
      }
      std::vector<int> merged_walk = open_at(region, x, y);
      std::vector<int> face_part = open_at(f, y, x);
      merged_walk.insert(merged_walk.end(), face_part.begin() + 1, face_part.end());
      stack.push_back({std::move(region), log_psi, std::move(f), log_psi_f, x, y});
      log_psi = log_psi + log_psi_f - log_edge(x, y);
      region = std::move(merged_walk);
      merged[g.arc_id(x, y)] = merged[g.arc_id(y, x)] = 1;
    }
  }

  // Remaining edges minus one outer boundary edge form a spanning tree.
  const int b0 = win.vertex(1, 0);
  const int b1 = win.vertex(0, 0);
  JumpIntensity j(g);
  for (int a = 0; a < g.num_arcs(); ++a) {
    int u = g.arc_source(a);
    int v = g.arc_target(a);
    if (u > v || merged[a]) continue;
    if ((u == b1 && v == b0) || (u == b0 && v == b1)) continue;
    j.set(g, u, v, 1.0);
    j.set(g, v, u, std::exp(log_edge(u, v)));
  }
  double rate = std::exp(log_psi - log_phi_except(g, j, region, b0, b1));
  j.set(g, b0, b1, rate);
  j.set(g, b1, b0, std::exp(log_edge(b0, b1)) / rate);

  for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
    j.set(g, it->x, it->y,
          std::exp(it->log_psi_region - log_phi_except(g, j, it->region, it->x, it->y)));
    j.set(g, it->y, it->x,
          std::exp(it->log_psi_face - log_phi_except(g, j, it->face, it->y, it->x)));
  }
  j.speed = detect_speed(g, j);
  return j;
}

NormalizedIntensity normalize_constant_speed(const DirectedGraph& g, const JumpIntensity& j,
                                             long long max_iterations) {
  const int n = g.num_vertices();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.num_arcs());
  double max_row = 0;
  for (int v = 0; v < n; ++v) {
    double s = 0;
    for (int a = g.first_arc(v); a < g.first_arc(v) + g.degree(v); ++a) {
      triplets.emplace_back(v, g.arc_target(a), j.at(a));
      s += j.at(a);
    }
    max_row = std::max(max_row, s);
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> K(n, n);
  K.setFromTriplets(triplets.begin(), triplets.end());

  // The shift removes the period-two oscillation of bipartite graphs.
  const double shift = 0.5 * max_row;
  Eigen::VectorXd h = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd kh(n);
  double lo = 0, hi = 0;
  long long it = 0;
  for (; it < max_iterations; ++it) {
    kh = K * h;
    lo = std::numeric_limits<double>::infinity();
    hi = 0;
    for (int v = 0; v < n; ++v) {
      double ratio = kh[v] / h[v];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    if (hi - lo <= 1e-12 * hi) break;
    h = kh + shift * h;
    h /= h.maxCoeff();
  }
  if (it == max_iterations)
    throw Error(ErrorCode::NoConvergence,
                "power iteration did not converge in " + std::to_string(max_iterations) +
                    " iterations (spread " + std::to_string((hi - lo) / hi) + ")");

  NormalizedIntensity out;
  out.eigen.eigenvalue = 0.5 * (lo + hi);
  out.eigen.iterations = it;
  out.eigen.eigenvector.assign(h.data(), h.data() + n);
  kh = K * h;
  out.eigen.residual = (kh - out.eigen.eigenvalue * h).cwiseAbs().maxCoeff();
  out.k = JumpIntensity(g);
  for (int a = 0; a < g.num_arcs(); ++a)
    out.k.set(a, j.at(a) * h[g.arc_target(a)] / h[g.arc_source(a)]);
  out.k.speed = out.eigen.eigenvalue;
  return out;
}

CharacteristicPrescription random_lattice_prescription(const LatticeWindow& win, double lambda,
                                                       std::mt19937_64& rng) {
  const auto& g = win.graph();
  const int W = win.width();
  const int H = win.height();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  // s_v(c,r) on the vertical edge above (c,r): nonincreasing in c.
  // s_h(c,r) on the horizontal edge right of (c,r): nonincreasing in r.
  std::vector<double> sv(W * H, 0.0), sh(W * H, 0.0);
  for (int r = 0; r + 1 < H; ++r) {
    double s = 0.3 * unif(rng);
    for (int c = W - 1; c >= 0; --c) {
      sv[r * W + c] = s;
      s += 0.25 * unif(rng);
    }
  }
  for (int c = 0; c + 1 < W; ++c) {
    double s = 0.3 * unif(rng);
    for (int r = H - 1; r >= 0; --r) {
      sh[r * W + c] = s;
      s += 0.25 * unif(rng);
    }
  }
  CharacteristicPrescription p;
  p.domain = PrescriptionDomain::LatticeFacesAndEdges;
  p.bounded_above = lambda * lambda;
  const double l2 = lambda * lambda;
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      int v = win.vertex(c, r);
      if (c + 1 < W) p.values[two_cycle_id(g, v, win.vertex(c + 1, r))] = l2 * std::exp(-sh[r * W + c]);
      if (r + 1 < H) p.values[two_cycle_id(g, v, win.vertex(c, r + 1))] = l2 * std::exp(-sv[r * W + c]);
    }
  }
  for (int r = 0; r + 1 < H; ++r) {
    for (int c = 0; c + 1 < W; ++c) {
      double lower = std::log(l2) * 2 - sv[r * W + c] - sh[r * W + c];
      double upper = std::log(l2) * 2 - sv[r * W + c + 1] - sh[(r + 1) * W + c];
      double u = unif(rng);
      p.values[win.face_id(c, r)] = std::exp(lower + u * (upper - lower));
    }
  }
  return p;
}

CharacteristicPrescription random_tree_prescription(const DirectedGraph& g,
                                                    const ClosedWalkBasis& basis, double lambda,
                                                    std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double log_mu = std::log(lambda / g.max_out_degree());
  CharacteristicPrescription p;
  p.domain = PrescriptionDomain::TreeBasis;
  p.bounded_above = std::exp(2 * log_mu);
  std::map<std::pair<int, int>, double> log_edge;
  for (const auto& e : basis.two_cycles) {
    if (!basis.tree.contains_arc(g.arc_id(e.x, e.y))) continue;
    double v = 2 * log_mu + std::log(0.3 + 0.7 * unif(rng));
    log_edge[{e.x, e.y}] = v;
    p.values[e.id] = std::exp(v);
  }
  for (size_t i = 0; i < basis.off_tree.size(); ++i) {
    const auto& e = basis.two_cycles[basis.off_tree[i]];
    const auto& c = basis.chosen_cycles[i];
    const int len = c.walk.length();
    double lprod = 0;
    for (size_t s = 1; s + 1 < c.walk.vertices.size(); ++s) {
      int a = c.walk.vertices[s];
      int b = c.walk.vertices[s + 1];
      lprod += log_edge.at({std::min(a, b), std::max(a, b)});
    }
    double le = std::min(2 * log_mu, (4 - 2 * len) * log_mu + lprod) + std::log(0.3 + 0.7 * unif(rng));
    double lower = (len - 2) * log_mu + le;
    double upper = (2 - len) * log_mu + lprod;
    double u = unif(rng);
    p.values[e.id] = std::exp(le);
    p.values[c.id] = std::exp(lower + u * (upper - lower));
  }
  return p;
}

CharacteristicPrescription uniform_lattice_prescription(const LatticeWindow& win, double lambda) {
  CharacteristicPrescription p;
  p.bounded_above = lambda * lambda;
  for (const auto& [id, w] : lattice_cycles(win)) p.values[id] = std::pow(lambda, w.length());
  return p;
}

double prescription_error(const DirectedGraph& g, const JumpIntensity& j,
                          const CharacteristicPrescription& phi,
                          const std::map<std::string, Walk>& cycles) {
  double worst = 0;
  for (const auto& [id, w] : cycles) {
    double target = phi.get(id);
    worst = std::max(worst, std::abs(std::expm1(log_phi(g, j, w) - std::log(target))));
  }
  return worst;
}

std::map<std::string, Walk> lattice_cycles(const LatticeWindow& win) {
  const auto& g = win.graph();
  std::map<std::string, Walk> out;
  for (int r = 0; r < win.height(); ++r) {
    for (int c = 0; c < win.width(); ++c) {
      int v = win.vertex(c, r);
      if (c + 1 < win.width()) out[two_cycle_id(g, v, win.vertex(c + 1, r))] = win.horizontal_two_cycle(c, r);
      if (r + 1 < win.height()) out[two_cycle_id(g, v, win.vertex(c, r + 1))] = win.vertical_two_cycle(c, r);
      if (c + 1 < win.width() && r + 1 < win.height()) out[win.face_id(c, r)] = win.face(c, r);
    }
  }
  return out;
}

std::map<std::string, Walk> basis_cycles(const ClosedWalkBasis& basis) {
  std::map<std::string, Walk> out;
  for (const auto& e : basis.two_cycles) out[e.id] = e.walk;
  for (const auto& c : basis.chosen_cycles) out[c.id] = c.walk;
  return out;
}

}  // namespace bridgelab
