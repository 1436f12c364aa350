#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bandctl/errors.hpp"

namespace bandctl {

// One constant-height piece of the potential, width > 0.
struct Segment {
  double width = 0.0;
  double height = 0.0;
};

// Point interaction v·δ(x - position), position within [0, period).
// Negative strength is a well.
struct DeltaSpike {
  double position = 0.0;
  double strength = 0.0;
};

// Tabulated smooth addition on a uniform grid covering [0, period]; the last
// node sits exactly at the period end so a periodized jump at the boundary
// stays representable. Evaluation is linear interpolation.
struct SampledOverlay {
  double grid_step = 0.0;
  std::vector<double> values;

  double span() const { return grid_step * double(values.size() - 1); }
  double operator()(double x) const;
};

// One period of a 1D potential: ordered constant segments summing to the
// period, delta spikes, and an optional sampled overlay for transformed
// potentials that have no closed form. Immutable by convention after
// construction; safe to share across parallel energy scans.
class PeriodicPotential {
 public:
  double period = 0.0;
  std::vector<Segment> segments;
  std::vector<DeltaSpike> spikes;  // sorted by position
  std::optional<SampledOverlay> overlay;

  // Exact evaluator of the overlay part, when one is known analytically
  // (transform outputs). Takes precedence over the tabulated interpolation
  // in all numerics; the tabulation remains the serialized form.
  std::function<double(double)> overlay_fn;

  bool has_overlay() const { return overlay.has_value() || bool(overlay_fn); }

  // V_per(x) by periodic extension: segment height plus overlay. Delta spikes
  // are not evaluated here; they live in the propagator jump conditions.
  double evaluate(double x) const;

  // x reduced to [0, period).
  double wrap(double x) const;

  // Segment height at local coordinate x in [0, period).
  double height_at_local(double x) const;

  // Overlay value at local coordinate (0 when absent).
  double overlay_at_local(double x) const;

  // Cumulative segment boundaries: 0 = b[0] < b[1] < ... < b[n] = period.
  std::vector<double> segment_boundaries() const;

  double min_height() const;
  double max_height() const;
  double max_abs_spike() const;

  void validate() const;
};

// Two segments: a well at height 0 and a barrier of the given height.
PeriodicPotential make_kronig_penney(double period, double barrier_width,
                                     double barrier_height);

// Single zero-height segment of full width plus one spike at position 0.
PeriodicPotential make_dirac_comb(double period, double strength);

// The same periodic potential described on the window [eps, period + eps],
// re-expressed on [0, period). The spectrum is translation invariant.
PeriodicPotential shift_origin(const PeriodicPotential& p, double eps);

// Same segments/spikes with every height raised by c (used by the
// constant-coupling channel decoupling).
PeriodicPotential with_constant_offset(const PeriodicPotential& p, double c);

// Copy of p with one extra spike inserted (position wrapped into [0, period)).
PeriodicPotential with_extra_spike(const PeriodicPotential& p, double position,
                                   double strength);

}  // namespace bandctl
