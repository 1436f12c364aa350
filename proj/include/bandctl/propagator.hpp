#pragma once

#include <vector>

#include "bandctl/potential.hpp"
#include "bandctl/transfer_matrix.hpp"

namespace bandctl {

// Sampled (x, psi, psi') solution over many periods. Values are stored
// renormalized: the true wavefunction at sample i is psi[i] * exp(log_scale[i])
// (same factor for dpsi), which keeps 50-period gap solutions inside double
// range while preserving exact growth exponents.
struct WaveTrace {
  double energy = 0.0;
  double period = 0.0;
  int n_periods = 0;
  int samples_per_period = 0;
  std::vector<double> xs;
  std::vector<double> psi;
  std::vector<double> dpsi;
  std::vector<double> log_scale;
  std::vector<double> knots;         // refined zeros of psi, ascending
  std::vector<double> double_knots;  // |psi| < tol local minima without sign change

  std::size_t boundary_index(int period_index) const {
    return std::size_t(period_index) * std::size_t(samples_per_period);
  }
};

// One-period transfer matrix M(E): ordered product of segment and spike
// matrices, with adaptive integration through sampled-overlay regions.
TransferMatrix monodromy(const PeriodicPotential& p, double energy);

// Transfer across [x0, x1] within one period, 0 <= x0 <= x1 <= period.
// A spike at position s is applied when s is in [x0, x1), so transfers
// compose exactly and transfer(0, period) equals the monodromy.
TransferMatrix transfer(const PeriodicPotential& p, double x0, double x1,
                        double energy);

WaveTrace propagate_trace(const PeriodicPotential& p, double energy,
                          double psi0, double dpsi0, int n_periods,
                          int samples_per_period);

// Ratio of psi' at the right boundary of the given period to psi' at its left
// boundary. Equals the Floquet multiplier for a Floquet solution and -1 for
// the free sine over its own half-wavelength period.
double junction_factor(const WaveTrace& trace, int period_index);

namespace detail {

// Shared adaptive Dormand-Prince 5(4) propagation of the two basis columns of
// the transfer matrix through a region where V(x) = height + overlay(x).
// Breakpoints at overlay grid nodes are enforced when the overlay is a linear
// interpolation table (the slope kinks there).
TransferMatrix integrate_overlay_piece(const PeriodicPotential& p, double x0,
                                       double x1, double height, double energy);

// Ordered decomposition of [x0, x1] into constant spans and spikes; spikes at
// position s are included when s lies in [x0, x1).
struct Piece {
  bool is_spike = false;
  double lo = 0.0, hi = 0.0;  // span
  double height = 0.0;        // span
  double strength = 0.0;      // spike (lo == hi == position)
};
std::vector<Piece> layout_pieces(const PeriodicPotential& p, double x0, double x1);

}  // namespace detail

}  // namespace bandctl
