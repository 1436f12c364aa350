#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bandctl/bands.hpp"
#include "bandctl/dirichlet.hpp"
#include "bandctl/potential.hpp"

namespace bandctl {

// Single-level shift on the window [0, L]: the n-th Dirichlet level moves by
// t, every other level stays put.
struct SusyShiftSpec {
  PeriodicPotential base;              // one period read as [0, L]
  int level_index = 1;                 // n
  double shift = 0.0;                  // t
  int grid = 2048;                     // output sampling resolution
  std::vector<double> probe_energies;  // extra states to transform
};

// Spectral-weight-factor change c_m -> r c_m on the window [0, L]:
// isospectral, reshapes the potential and relocalizes the states.
struct SwfSpec {
  PeriodicPotential base;
  int level_index = 1;       // m
  double weight_ratio = 1.0; // r = c_m / c̊_m, must be > 0
  int grid = 2048;
  int n_states = 4;          // transformed eigenstates 1..n_states to sample
};

struct SampledState {
  double energy = 0.0;
  std::vector<double> xs, psi, dpsi;
};

struct TransformDiagnostics {
  std::vector<double> xs;
  std::vector<double> theta;        // Wronskian samples (level shift)
  std::vector<double> denominator;  // 1 - (1-r²)∫ psi̊_m² samples (weight change)
  double usable_shift_lo = 0.0;     // widest valid t interval found
  double usable_shift_hi = 0.0;
  bool usable_shift_lo_open = false;  // search hit its cap, interval extends
  bool usable_shift_hi_open = false;
  bool symmetric_base = true;  // midpoint-parity auxiliary solution used
};

struct TransformResult {
  PeriodicPotential new_potential;  // period L; overlay holds the correction
  double target_energy = 0.0;       // E_n + t, or E_m for the weight change
  double level_energy = 0.0;        // E_n of the base
  std::vector<SampledState> states;
  TransformDiagnostics diagnostics;
};

// θ(x) = psi0'(x) psibar(x) - psi0(x) psibar'(x) on the given grid. Raises
// singular_wronskian when θ changes sign or passes through ~0, which is
// exactly when the shift t is outside its usable range.
std::vector<double> wronskian_theta(const IntervalWave& psi0,
                                    const IntervalWave& psibar,
                                    const std::vector<double>& xs);

TransformResult susy_shift(const SusyShiftSpec& spec);

TransformResult swf_transform(const SwfSpec& spec);

// Widest t interval around 0 for which θ stays sign-definite, found by
// bisection on the first θ-zero in each direction within ±search_span.
TransformDiagnostics susy_usable_shift_interval(const PeriodicPotential& base,
                                                int level_index,
                                                double search_span = 30.0);

struct RescanReport {
  PeriodicPotential periodized;
  BandStructure structure;
  std::vector<std::string> warnings;
};

// Periodic continuation of a transformed potential, optionally with a comb
// spike of the given strength at the period boundaries, then a band rescan.
// A jump of the continued potential across the boundary is allowed and
// reported as a warning.
RescanReport periodize_and_rescan(const TransformResult& result,
                                  std::optional<double> extra_comb_strength,
                                  double e_min, double e_max);

enum class SpikePlacement { mid_barrier, mid_well };

struct DeltaEdgeReport {
  PeriodicPotential modified;
  BandStructure before;
  BandStructure after;
  struct EdgeMove {
    double before_energy = 0.0;
    double after_energy = 0.0;
  };
  std::vector<EdgeMove> moves;  // matched by proximity, ascending
};

// Add a spike at the barrier (well) midpoint and rescan: edges whose edge
// solution has a knot at the spike stay fixed, the opposite edges move.
DeltaEdgeReport delta_edge_shift(const PeriodicPotential& p,
                                 SpikePlacement placement, double strength,
                                 double e_min, double e_max);

}  // namespace bandctl
