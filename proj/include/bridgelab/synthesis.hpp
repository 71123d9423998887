#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "bridgelab/characteristics.hpp"
#include "bridgelab/graph.hpp"
#include "bridgelab/windows.hpp"

namespace bridgelab {

enum class PrescriptionDomain { LatticeFacesAndEdges, TreeBasis };

/// Target closed-walk characteristics keyed by cycle id ("e:a|b" two-cycles,
/// "f:c,r" lattice faces, "c:x>y" basis cycles).
struct CharacteristicPrescription {
  PrescriptionDomain domain = PrescriptionDomain::LatticeFacesAndEdges;
  std::map<std::string, double> values;
  double bounded_above = std::numeric_limits<double>::infinity();

  /// Throws PrescriptionIncomplete when absent, NonPositiveRate when <= 0.
  double get(const std::string& id) const;
};

/// Rates realising phi on every basis cycle. free_values fixes j(x->y),
/// x<y, on tree two-cycles keyed by two-cycle id (default 1).
JumpIntensity synth_basis(const DirectedGraph& g, const ClosedWalkBasis& basis,
                          const CharacteristicPrescription& phi,
                          const std::map<std::string, double>& free_values = {});

/// Rates realising phi on every two-cycle and face of the window, built by
/// merging faces in row-major order and unwinding the merges.
JumpIntensity synth_lattice(const LatticeWindow& win, const CharacteristicPrescription& phi);

struct EigenResult {
  double eigenvalue = 0;
  std::vector<double> eigenvector;
  double residual = 0;
  long long iterations = 0;
};

struct NormalizedIntensity {
  JumpIntensity k;
  EigenResult eigen;
};

/// Perron eigenpair K h = v h of the rate matrix by shifted power iteration,
/// and the gauge-equivalent constant-speed rates k = j h(z')/h(z).
NormalizedIntensity normalize_constant_speed(const DirectedGraph& g, const JumpIntensity& j,
                                             long long max_iterations = 1'000'000);

/// Random prescription satisfying the lattice two-cycle and face conditions
/// for the given lambda. Every two-cycle gets lambda^2 exp(-s) with s
/// monotone along rows/columns; faces interpolate geometrically between
/// their bounds.
CharacteristicPrescription random_lattice_prescription(const LatticeWindow& win, double lambda,
                                                       std::mt19937_64& rng);

/// Random prescription on a T-basis satisfying the tree conditions for lambda.
CharacteristicPrescription random_tree_prescription(const DirectedGraph& g,
                                                    const ClosedWalkBasis& basis, double lambda,
                                                    std::mt19937_64& rng);

/// Prescription whose two-cycles equal lambda^2 and faces lambda^4.
CharacteristicPrescription uniform_lattice_prescription(const LatticeWindow& win, double lambda);

/// Evaluate j on every cycle the prescription names; returns the largest
/// relative deviation.
double prescription_error(const DirectedGraph& g, const JumpIntensity& j,
                          const CharacteristicPrescription& phi,
                          const std::map<std::string, Walk>& cycles);

/// Cycle id -> walk for every two-cycle and face of the window.
std::map<std::string, Walk> lattice_cycles(const LatticeWindow& win);
/// Cycle id -> walk for every cycle of the basis.
std::map<std::string, Walk> basis_cycles(const ClosedWalkBasis& basis);

}  // namespace bridgelab
