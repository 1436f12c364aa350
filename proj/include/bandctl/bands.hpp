#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bandctl/potential.hpp"

namespace bandctl {

// A located |Δ(E)| = 1 crossing. disc_sign records whether Δ = +1 or -1
// there; consecutive edges of a gap share the sign, and the sign alternates
// from gap to gap.
struct BandEdge {
  double energy = 0.0;
  int disc_sign = +1;
  bool tangency = false;  // grazing touch (zero-width gap)
};

struct BandInterval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double e) const { return e >= lo && e <= hi; }
};

struct BandStructure {
  double e_min = 0.0;  // scan floor requested
  double e_max = 0.0;  // scan ceiling
  std::vector<BandEdge> edges;        // ascending
  std::vector<BandInterval> bands;    // allowed zones
  std::vector<BandInterval> gaps;     // forbidden zones (zero width = touching)
  std::vector<std::string> warnings;  // e.g. suspiciously narrow bands

  const BandInterval* band_containing(double e) const;
  const BandInterval* gap_containing(double e) const;
  // 1-based index of the band whose interior contains e, 0 if none.
  int band_index(double e) const;
};

// Hill discriminant Δ(E): half-trace of the one-period monodromy matrix.
double discriminant(const PeriodicPotential& p, double energy);

// Batched Δ over an energy grid; closed-form potentials run through the
// kernel dispatch, overlay potentials through the adaptive integrator.
std::vector<double> discriminant_grid(const PeriodicPotential& p,
                                      const std::vector<double>& energies);

// Safe scan floor below the spectrum bottom.
double default_scan_floor(const PeriodicPotential& p);

// Band edges located by bracketed root finding on Δ(E) = ±1 over a uniform
// grid; tangential touches are reported as zero-width gaps.
BandStructure scan_bands(const PeriodicPotential& p, double e_min, double e_max,
                         double grid_step);

// Default grid: 4000 points across the scan range.
BandStructure scan_bands(const PeriodicPotential& p, double e_min, double e_max);

struct ForbiddennessProfile {
  std::vector<double> energies;
  std::vector<double> imk;  // acosh(|Δ|)/a inside gaps, 0 inside bands
};

ForbiddennessProfile forbiddenness(const PeriodicPotential& p,
                                   const std::vector<double>& grid);

// Im K at a single energy.
double forbiddenness_at(const PeriodicPotential& p, double energy);

// |t|² through n_periods copies of the potential embedded in zero potential,
// by plane-wave matching on both sides of the total transfer matrix.
double transmission(const PeriodicPotential& p, double energy, int n_periods);

}  // namespace bandctl
