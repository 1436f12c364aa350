#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bandctl/bands.hpp"
#include "bandctl/dirichlet.hpp"
#include "bandctl/potential.hpp"
#include "bandctl/propagator.hpp"

namespace bandctl {

// A real Floquet solution at an energy inside a gap: psi(x + a) = mu psi(x)
// with |mu| != 1. Its knot lattice repeats with exactly the potential period
// across the entire gap, which is what makes these solutions special.
struct FloquetSolution {
  double energy = 0.0;
  double multiplier = 0.0;             // mu
  double init_psi = 0.0, init_dpsi = 0.0;  // monodromy eigenvector at x = 0
  std::vector<double> knot_lattice;    // knots within [0, period)
  double growth_exponent = 0.0;        // ln|mu| / period
};

// The growing (|mu| > 1) and decaying (|mu| < 1) Floquet solutions at an
// energy strictly inside a gap. mu+ mu- = 1 and mu+ + mu- = 2 Δ(E).
std::pair<FloquetSolution, FloquetSolution> smart_pair(const PeriodicPotential& p,
                                                       double energy);

// Max deviation per period boundary: dev[j] is the largest
// |knot_match(x + a) - x - a| over knots x of period j.
std::vector<double> knot_period_deviations(const WaveTrace& trace);

// Max over all periods of the above for the given Floquet solution
// propagated n_periods periods.
double knot_period_check(const PeriodicPotential& p, const FloquetSolution& s,
                         int n_periods);

struct BeatProfile {
  double energy = 0.0;
  std::vector<double> envelope_maxima;     // x positions of amplitude peaks
  std::optional<double> beat_length;       // empty: flat envelope (no beats)
  double knots_per_period = 0.0;           // measured from the trace
  double bloch_beat_length = 0.0;          // pi / |K - K(lower band edge)|
  std::vector<double> period_amplitude;    // per-period max |psi| (log scale applied)
};

// Envelope modulation of a generic real solution inside an allowed band.
// Energies within 1e-4 of a band edge are refused.
BeatProfile beat_profile(const PeriodicPotential& p, double energy,
                         int n_periods);

struct AuxiliarySpectrum {
  double epsilon = 0.0;
  std::vector<double> eigenvalues;
  std::vector<IntervalWave> eigenfunctions;
};

// Dirichlet problem on the window [eps, a + eps] with the periodic potential:
// the auxiliary spectrum whose levels sweep the spectral gaps as eps varies.
AuxiliarySpectrum auxiliary_spectrum(const PeriodicPotential& p, double eps,
                                     int n_levels);

struct EpsilonSweep {
  int level = 0;
  std::vector<std::pair<double, double>> samples;  // (eps, E_n^eps)
  std::pair<double, double> refined_min;           // (eps*, E)
  std::pair<double, double> refined_max;
};

// E_n^eps sampled over eps in [0, a) with locally refined extremes; the
// sweep range covers the n-th spectral gap.
EpsilonSweep epsilon_sweep(const PeriodicPotential& p, int n, int n_samples);

}  // namespace bandctl
