#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bridgelab/graph.hpp"
#include "bridgelab/windows.hpp"

namespace bridgelab {

/// Positive rate per arc id. Missing rates are NaN.
struct JumpIntensity {
  std::vector<double> rates;
  std::optional<double> speed;  // set when every vertex has the same out-rate

  JumpIntensity() = default;
  explicit JumpIntensity(const DirectedGraph& g);
  JumpIntensity(const DirectedGraph& g, double uniform);

  bool has(int arc) const;
  /// Throws NonPositiveRate for non-finite or non-positive values.
  void set(int arc, double rate);
  void set(const DirectedGraph& g, int x, int y, double rate);
  /// Throws MissingRate.
  double at(int arc) const;
  double at(const DirectedGraph& g, int x, int y) const;
};

/// Out-rate sum at v.
double out_rate(const DirectedGraph& g, const JumpIntensity& j, int v);

/// Common out-rate if it agrees at every vertex within tol (relative).
std::optional<double> detect_speed(const DirectedGraph& g, const JumpIntensity& j,
                                   double tol = 1e-10);

/// Replace j(z->z') by exp(pot(z') - pot(z)) j(z->z').
JumpIntensity gauge_transform(const DirectedGraph& g, const JumpIntensity& j,
                              const std::vector<double>& potential);

/// Sum of log rates along the walk.
double log_phi(const DirectedGraph& g, const JumpIntensity& j, const Walk& c);
/// Product of rates along the walk (exp of log_phi).
double phi(const DirectedGraph& g, const JumpIntensity& j, const Walk& c);

enum class Condition { LatticeE8, LatticeE7, TreeE1, TreeE2, PatchBound };

const char* to_string(Condition c);

struct Witness {
  std::string relation;  // which inequality, e.g. "two-cycle <= lambda^2"
  Walk walk;
  std::string walk_text;
  double lhs = 0;
  double rhs = 0;
};

struct CharacteristicReport {
  Condition checked_condition = Condition::PatchBound;
  bool passed = true;
  long long checks = 0;
  std::vector<Witness> witnesses;
  std::vector<std::string> notes;

  void merge(const CharacteristicReport& other);
};

constexpr double kConditionSlack = 1e-10;
constexpr int kMaxWitnesses = 1000;

/// Two-cycle bound Phi(e) <= lambda^2 and the face sandwich
/// Phi(e_{x,2}) Phi(e_{x,1}) <= Phi(f_x) <= Phi(e_{x+v1,2}) Phi(e_{x+v2,1})
/// over interior two-cycles and faces. checked_condition is LatticeE8 when
/// the two-cycle bound fails, LatticeE7 when only the face bound fails.
CharacteristicReport check_lattice_conditions(const LatticeWindow& w, const JumpIntensity& j,
                                              double lambda, int margin = 0);

/// Tree-basis conditions with mu = lambda/Delta:
///   Phi(e) <= mu^2 for every two-cycle,
///   mu^(l-2) Phi(e) <= Phi(c_e) <= mu^(2-l) prod Phi(e') for off-tree e,
/// where l is the length of c_e and e' ranges over the other two-cycles that
/// share an arc with c_e.
CharacteristicReport check_tree_conditions(const DirectedGraph& g, const JumpIntensity& j,
                                           double lambda, const ClosedWalkBasis& basis);

/// Brute-force Phi(c) <= base^len(c) over every simple closed walk of length
/// at most max_len.
CharacteristicReport verify_patch_bound(const DirectedGraph& g, const JumpIntensity& j,
                                        double base, int max_len,
                                        long long budget = kDefaultWalkBudget);

}  // namespace bridgelab
