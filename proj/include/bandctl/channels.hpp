#pragma once

#include <utility>
#include <vector>

#include "bandctl/potential.hpp"

namespace bandctl {

// Two coupled Schrödinger channels with thresholds eps1 <= eps2 (partial
// channel energies E - eps_i) and a symmetric coupling, either a constant
// V12 or a single delta of strength V12 at x = 0.
struct TwoChannelSystem {
  double threshold1 = 0.0;
  double threshold2 = 0.0;
  PeriodicPotential v11;
  PeriodicPotential v22;
  enum class Coupling { constant, delta } coupling = Coupling::constant;
  double v12 = 0.0;
};

// Model 1: identical channels (V11 = V22, eps1 = eps2) with constant coupling
// decouple exactly into scalar problems with effective potentials V11 ± V12.
// Returned as (plus branch, minus branch).
std::pair<PeriodicPotential, PeriodicPotential> decouple_symmetric(
    const TwoChannelSystem& sys);

// Model 2: the two weight ratios r = c2/c1 that equalize the effective
// kinetic energies of threshold-split channels, roots of
// r² - (Δε/V12) r - 1 = 0. Their sum is Δε/V12 and their product is -1.
std::pair<double, double> weight_ratio(double delta_eps, double v12);

// Model 3: channels on nested intervals, Psi1(±π) = Psi2(±π/2) = 0, coupled
// only by V12 δ(x). Solved by double shooting from all four walls with the
// delta jump conditions matched at x = 0.
struct DeltaCoupledSolution {
  double energy = 0.0;
  // (x, Psi, Psi') samples per channel over its own interval
  std::vector<double> x1, psi1, dpsi1;
  std::vector<double> x2, psi2, dpsi2;
  // ∫ Psi'² / ∫ Psi² per channel: mean curvature including the delta kink
  double kinetic1 = 0.0;
  double kinetic2 = 0.0;
};

DeltaCoupledSolution solve_delta_coupled(const TwoChannelSystem& sys,
                                         double e_lo, double e_hi,
                                         int samples = 512);

}  // namespace bandctl
