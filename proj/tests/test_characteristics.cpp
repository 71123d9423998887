#include <doctest.h>

#include <cmath>
#include <random>

#include "bridgelab/characteristics.hpp"
#include "bridgelab/error.hpp"
#include "bridgelab/synthesis.hpp"
#include "support.hpp"

using namespace bridgelab;

TEST_CASE("phi of constant and explicit rates") {
  LatticeWindow w(4, 4);
  const auto& g = w.graph();
  JumpIntensity j(g, 1.7);
  CHECK(phi(g, j, w.face(1, 1)) == doctest::Approx(std::pow(1.7, 4)).epsilon(1e-14));
  Walk long_walk{{0, 1, 2, 3, 7, 6, 5, 4, 0}};
  CHECK(phi(g, j, long_walk) == doctest::Approx(std::pow(1.7, 8)).epsilon(1e-14));

  auto two = DirectedGraph::from_arcs({{"a", "b"}, {"b", "a"}});
  JumpIntensity k(two);
  k.set(two, 0, 1, 2.0);
  k.set(two, 1, 0, 3.0);
  CHECK(phi(two, k, Walk{{0, 1, 0}}) == doctest::Approx(6.0));
  CHECK(phi(two, k, Walk{{1, 0, 1}}) == doctest::Approx(6.0));
  JumpIntensity missing(two);
  missing.set(two, 0, 1, 2.0);
  CHECK_THROWS_AS(phi(two, missing, Walk{{0, 1, 0}}), Error);
  try {
    phi(two, missing, Walk{{0, 1, 0}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingRate);
  }
  CHECK_THROWS_AS(k.set(two, 0, 1, 0.0), Error);
  CHECK_THROWS_AS(k.set(two, 0, 1, -1.0), Error);
}

TEST_CASE("phi survives long walks with extreme rates") {
  auto g = line_window(2);
  JumpIntensity j(g, 1e-30);
  Walk w;
  for (int i = 0; i <= 40; ++i) w.vertices.push_back(i % 2 + 1);
  CHECK(w.closed());
  CHECK(log_phi(g, j, w) == doctest::Approx(40 * std::log(1e-30)));
  CHECK(std::isfinite(log_phi(g, j, w)));
}

TEST_CASE("gauge invariance and multiplicativity") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int rep = 0; rep < 10; ++rep) {
    auto g = testsupport::random_graph(rng, 8, 6);
    JumpIntensity j(g);
    for (int a = 0; a < g.num_arcs(); ++a) j.set(a, u(rng));
    std::vector<double> pot(g.num_vertices());
    for (auto& p : pot) p = 5 * (u(rng) - 1.5);
    auto k = gauge_transform(g, j, pot);
    auto walks = enumerate_simple_closed_walks(g, 6);
    for (const auto& w : walks) {
      double a = phi(g, j, w);
      double b = phi(g, k, w);
      CHECK(std::abs(a - b) <= 1e-10 * a);
    }
    // Concatenation at a shared base point multiplies characteristics.
    for (size_t i = 0; i + 1 < walks.size(); ++i) {
      const auto& a = walks[i];
      const auto& b = walks[i + 1];
      if (a.vertices.front() != b.vertices.front()) continue;
      double lhs = log_phi(g, j, concatenate(a, b));
      CHECK(lhs == doctest::Approx(log_phi(g, j, a) + log_phi(g, j, b)).epsilon(1e-12));
    }
    // Two-cycles equal their reversal.
    for (int a = 0; a < g.num_arcs(); ++a) {
      Walk e{{g.arc_source(a), g.arc_target(a), g.arc_source(a)}};
      CHECK(phi(g, j, e) == doctest::Approx(phi(g, j, reverse_walk(e))).epsilon(1e-14));
    }
  }
}

TEST_CASE("lattice conditions: simple walk passes with equality") {
  LatticeWindow w(6, 5);
  JumpIntensity j(w.graph(), 0.8);
  auto rep = check_lattice_conditions(w, j, 0.8);
  CHECK(rep.passed);
  CHECK(rep.witnesses.empty());
  CHECK(rep.checks > 0);
}

TEST_CASE("lattice conditions: inflated rate gives a two-cycle witness") {
  LatticeWindow w(4, 4);
  const auto& g = w.graph();
  JumpIntensity j(g, 1.0);
  int a = w.vertex(1, 1);
  int b = w.vertex(2, 1);
  j.set(g, a, b, 2.0);
  auto rep = check_lattice_conditions(w, j, 1.0);
  CHECK_FALSE(rep.passed);
  CHECK(rep.checked_condition == Condition::LatticeE8);
  REQUIRE_FALSE(rep.witnesses.empty());
  bool found = false;
  for (const auto& wit : rep.witnesses) {
    if (wit.walk.length() == 2) {
      found = true;
      CHECK(wit.lhs == doctest::Approx(2.0));
      CHECK(wit.rhs == doctest::Approx(1.0));
    }
  }
  CHECK(found);
  // Margin that excludes every face is reported.
  CHECK_THROWS_AS(check_lattice_conditions(w, j, 1.0, 2), Error);
}

TEST_CASE("lattice conditions: face sandwich violation") {
  LatticeWindow w(3, 3);
  const auto& g = w.graph();
  auto p = uniform_lattice_prescription(w, 1.0);
  p.values[w.face_id(0, 0)] = 1.5;  // above the upper bound 1
  auto j = synth_lattice(w, p);
  auto rep = check_lattice_conditions(w, j, 1.0);
  CHECK_FALSE(rep.passed);
  CHECK(rep.checked_condition == Condition::LatticeE7);
  REQUIRE(rep.witnesses.size() == 1);
  CHECK(rep.witnesses[0].walk == w.face(0, 0));
  (void)g;
}

TEST_CASE("tree conditions") {
  // A graph that is a tree: off-tree set is empty.
  auto path = line_window(3);
  auto basis = t_basis(path, spanning_tree(path, 0));
  JumpIntensity small(path, 0.3);  // Delta = 2, mu = lambda/2 = 0.5 > 0.3
  CHECK(check_tree_conditions(path, small, 1.0, basis).passed);

  std::mt19937_64 rng(1);
  auto g = testsupport::random_graph(rng, 10, 6);
  auto b = t_basis(g, spanning_tree(g, 0));
  const double lambda = 2.0;
  const double mu = lambda / g.max_out_degree();
  JumpIntensity uniform(g, mu);
  auto rep = check_tree_conditions(g, uniform, lambda, b);
  CHECK(rep.passed);
  CHECK_FALSE(rep.notes.empty());

  // Inflate one arc by 10x on an off-tree cycle.
  const auto& c = b.chosen_cycles.front();
  JumpIntensity bad = uniform;
  bad.set(g, c.x, c.y, 10 * mu);
  auto rb = check_tree_conditions(g, bad, lambda, b);
  CHECK_FALSE(rb.passed);
  bool names_cycle = false;
  for (const auto& wit : rb.witnesses) names_cycle = names_cycle || wit.walk == c.walk;
  CHECK(names_cycle);

  auto other = testsupport::random_graph(rng, 6, 2);
  CHECK_THROWS_AS(check_tree_conditions(other, JumpIntensity(other, 1.0), 1.0, b), Error);
}

TEST_CASE("patch bound brute force") {
  LatticeWindow w(4, 4);
  const auto& g = w.graph();
  JumpIntensity j(g, 1.3);
  auto rep = verify_patch_bound(g, j, 1.3, 8);
  CHECK(rep.passed);
  CHECK(rep.checks == static_cast<long long>(enumerate_simple_closed_walks(g, 8).size()));

  j.set(g, 5, 6, 1.3 * 1.5);
  auto bad = verify_patch_bound(g, j, 1.3, 2);
  CHECK_FALSE(bad.passed);
  REQUIRE(bad.witnesses.size() == 2);  // both base points of the same two-cycle
  for (const auto& wit : bad.witnesses) {
    CHECK(wit.walk.length() == 2);
    CHECK(((wit.walk.vertices[0] == 5 && wit.walk.vertices[1] == 6) ||
           (wit.walk.vertices[0] == 6 && wit.walk.vertices[1] == 5)));
  }
}
