#include "bandctl/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bandctl/numeric.hpp"

namespace bandctl {

namespace {

constexpr int kLatticeSamples = 256;

FloquetSolution build_solution(const PeriodicPotential& p, double energy,
                               const TransferMatrix& m, double mu) {
  FloquetSolution s;
  s.energy = energy;
  s.multiplier = mu;
  s.growth_exponent = std::log(std::abs(mu)) / p.period;

  // Eigenvector of the real 2x2 monodromy: rows of (M - mu I) are orthogonal
  // to it; pick the better-conditioned candidate.
  double v1p = m.m12, v1d = mu - m.m11;
  double v2p = mu - m.m22, v2d = m.m21;
  const double n1 = v1p * v1p + v1d * v1d;
  const double n2 = v2p * v2p + v2d * v2d;
  double vp = n1 >= n2 ? v1p : v2p;
  double vd = n1 >= n2 ? v1d : v2d;
  const double nn = std::hypot(vp, vd);
  require(nn > 0.0, errc::defective_matrix,
          "monodromy eigenvector degenerate at this energy");
  vp /= nn;
  vd /= nn;
  if (vp < 0.0 || (vp == 0.0 && vd < 0.0)) {
    vp = -vp;
    vd = -vd;
  }
  s.init_psi = vp;
  s.init_dpsi = vd;

  const WaveTrace tr = propagate_trace(p, energy, vp, vd, 1, kLatticeSamples);
  for (const double k : tr.knots)
    if (k < p.period - 1e-10) s.knot_lattice.push_back(k);
  return s;
}

}  // namespace

std::pair<FloquetSolution, FloquetSolution> smart_pair(const PeriodicPotential& p,
                                                       double energy) {
  p.validate();
  const TransferMatrix m = monodromy(p, energy);
  const double d = m.half_trace();
  require(std::abs(d) > 1.0, errc::not_in_gap,
          "energy lies in an allowed band; no growing/decaying pair exists");
  require(std::abs(d) > 1.0 + 1e-9, errc::defective_matrix,
          "energy is at a band edge; the monodromy has a single eigenvector");

  const double root = std::sqrt(d * d - 1.0);
  const double mu_grow = d > 0.0 ? d + root : d - root;
  const double mu_decay = 1.0 / mu_grow;  // exact by det = 1
  return {build_solution(p, energy, m, mu_grow),
          build_solution(p, energy, m, mu_decay)};
}

std::vector<double> knot_period_deviations(const WaveTrace& trace) {
  const double a = trace.period;
  const auto& ks = trace.knots;
  std::vector<double> devs(std::size_t(std::max(0, trace.n_periods - 1)), 0.0);
  if (ks.size() < 2 || devs.empty()) return devs;

  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double target = ks[i] + a;
    if (target > ks.back() + 0.25 * a) continue;
    const int per = std::min(int(ks[i] / a), trace.n_periods - 2);
    if (per < 0) continue;
    auto it = std::lower_bound(ks.begin(), ks.end(), target);
    double best = std::numeric_limits<double>::infinity();
    if (it != ks.end()) best = std::min(best, std::abs(*it - target));
    if (it != ks.begin()) best = std::min(best, std::abs(*(it - 1) - target));
    devs[std::size_t(per)] = std::max(devs[std::size_t(per)], best);
  }
  return devs;
}

double knot_period_check(const PeriodicPotential& p, const FloquetSolution& s,
                         int n_periods) {
  require(n_periods >= 3, errc::validation, "need at least three periods");
  const WaveTrace tr =
      propagate_trace(p, s.energy, s.init_psi, s.init_dpsi, n_periods, 128);
  const auto devs = knot_period_deviations(tr);
  double worst = 0.0;
  for (const double d : devs) worst = std::max(worst, d);
  return worst;
}

BeatProfile beat_profile(const PeriodicPotential& p, double energy,
                         int n_periods) {
  p.validate();
  require(n_periods >= 8, errc::validation, "need at least eight periods");
  const double a = p.period;
  const double d = discriminant(p, energy);
  require(std::abs(d) < 1.0, errc::not_in_band,
          "energy is not strictly inside an allowed band");

  // Band context: index and edges, for the edge-distance refusal and the
  // Bloch-phase unfolding.
  const double floor = default_scan_floor(p);
  const double ceil = energy + 0.05 * std::max(1.0, std::abs(energy)) + 1.0;
  const BandStructure bs = scan_bands(p, floor, ceil);
  const int band = bs.band_index(energy);
  require(band > 0, errc::not_in_band, "energy is not inside a scanned band");
  const BandInterval bi = bs.bands[std::size_t(band - 1)];
  require(std::min(energy - bi.lo, bi.hi - energy) > 1e-4, errc::not_in_band,
          "energy is within 1e-4 of a band edge; beats exceed any finite trace");

  const WaveTrace tr = propagate_trace(p, energy, 1.0, 0.0, n_periods, 128);

  BeatProfile bp;
  bp.energy = energy;

  // Per-period max amplitude in log space (renormalization-safe).
  const int m = tr.samples_per_period;
  std::vector<double> logamp(static_cast<std::size_t>(n_periods), 0.0);
  for (int per = 0; per < n_periods; ++per) {
    double best = -std::numeric_limits<double>::infinity();
    for (int j = per * m; j <= (per + 1) * m; ++j) {
      const double v = std::abs(tr.psi[std::size_t(j)]);
      if (v > 0.0)
        best = std::max(best, std::log(v) + tr.log_scale[std::size_t(j)]);
    }
    logamp[std::size_t(per)] = best;
  }
  bp.period_amplitude.resize(logamp.size());
  for (std::size_t i = 0; i < logamp.size(); ++i)
    bp.period_amplitude[i] = std::exp(logamp[i] - logamp[0]);

  // Envelope peaks with parabolic refinement.
  std::vector<double> peaks;
  for (std::size_t i = 1; i + 1 < logamp.size(); ++i) {
    if (logamp[i] >= logamp[i - 1] && logamp[i] > logamp[i + 1]) {
      const double pk =
          parabola_peak(double(i - 1), logamp[i - 1], double(i), logamp[i],
                        double(i + 1), logamp[i + 1]);
      peaks.push_back(pk * a);
    }
  }
  bp.envelope_maxima = peaks;

  // Knot density, measured over an integral number of knot intervals.
  const auto& ks = tr.knots;
  if (ks.size() >= 3)
    bp.knots_per_period = a * double(ks.size() - 1) / (ks.back() - ks.front());

  // Bloch phase unfolded from the band's lower edge: within band m the phase
  // K a runs (m-1)π → mπ, so the fractional advance follows arccos Δ with a
  // parity flip on even bands.
  const double theta = std::acos(std::clamp(d, -1.0, 1.0));
  const double frac = (band % 2 == 1) ? theta / M_PI : 1.0 - theta / M_PI;
  bp.bloch_beat_length = frac > 0.0 ? a / frac : std::numeric_limits<double>::infinity();

  // Flat envelope: no beats (free motion, or a pure Floquet-phase solution).
  double lo = logamp[0], hi = logamp[0];
  for (const double v : logamp) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 1e-3) {
    bp.beat_length = std::nullopt;
    return bp;
  }

  // Fractional knots gained per period relative to the band's lower edge.
  double g = bp.knots_per_period - std::floor(bp.knots_per_period);
  // The per-period peak spacing resolves the fraction more sharply but folds
  // g and 1-g together; unfold with the knot measurement.
  if (peaks.size() >= 2) {
    const double spacing =
        (peaks.back() - peaks.front()) / (double(peaks.size() - 1) * a);
    if (spacing > 1.0) {
      const double alias = 1.0 / spacing;
      g = g <= 0.5 ? alias : 1.0 - alias;
    }
  }
  if (g > 1e-12)
    bp.beat_length = a / g;
  else
    bp.beat_length = std::nullopt;
  return bp;
}

AuxiliarySpectrum auxiliary_spectrum(const PeriodicPotential& p, double eps,
                                     int n_levels) {
  require(n_levels >= 1, errc::validation, "need at least one level");
  const PeriodicPotential window = shift_origin(p, eps);
  AuxiliarySpectrum out;
  out.epsilon = eps;
  out.eigenvalues = dirichlet_eigenvalues(window, n_levels);
  for (const double e : out.eigenvalues)
    out.eigenfunctions.push_back(dirichlet_eigenfunction(window, e));
  return out;
}

EpsilonSweep epsilon_sweep(const PeriodicPotential& p, int n, int n_samples) {
  require(n >= 1, errc::validation, "level index must be >= 1");
  require(n_samples >= 4, errc::validation, "need at least four sweep samples");
  const double a = p.period;

  EpsilonSweep sweep;
  sweep.level = n;
  const auto level_at = [&](double eps) {
    return dirichlet_eigenvalue(shift_origin(p, eps), n);
  };
  std::size_t imin = 0, imax = 0;
  for (int i = 0; i < n_samples; ++i) {
    const double eps = a * double(i) / n_samples;
    const double e = level_at(eps);
    sweep.samples.emplace_back(eps, e);
    if (e < sweep.samples[imin].second) imin = std::size_t(i);
    if (e > sweep.samples[imax].second) imax = std::size_t(i);
  }

  const double step = a / n_samples;
  const auto refine = [&](std::size_t idx, double sign) {
    const double center = sweep.samples[idx].first;
    // The sweep is periodic in eps; search one grid step on either side.
    const double lo = center - step, hi = center + step;
    const double eps_best = golden_minimize(
        [&](double eps) {
          double w = std::fmod(eps + a, a);
          return sign * level_at(w);
        },
        lo, hi, 1e-8);
    const double w = std::fmod(eps_best + a, a);
    return std::make_pair(w, level_at(w));
  };
  sweep.refined_min = refine(imin, +1.0);
  sweep.refined_max = refine(imax, -1.0);
  return sweep;
}

}  // namespace bandctl
