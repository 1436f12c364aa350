#include "bandctl/propagator.hpp"

#include <algorithm>
#include <cmath>

#include "bandctl/numeric.hpp"

namespace bandctl {

namespace {

constexpr double kRenormHigh = 1e100;
constexpr double kRenormLow = 1e-100;
constexpr double kKnotXTol = 1e-12;
constexpr double kDoubleKnotTol = 1e-9;

// Walks [x0, x1] within one period in order, invoking seg(lo, hi, height) for
// constant pieces and spk(strength) for spikes. Spikes with position in
// [x0, x1) are applied, which makes adjacent transfers compose exactly.
template <class SegFn, class SpkFn>
void walk_pieces(const PeriodicPotential& p, double x0, double x1, SegFn&& seg,
                 SpkFn&& spk) {
  const auto bounds = p.segment_boundaries();

  std::size_t si = 0;
  while (si < p.spikes.size() && p.spikes[si].position < x0) ++si;

  double x = x0;
  while (true) {
    // Apply spikes sitting exactly at the current position.
    while (si < p.spikes.size() && p.spikes[si].position == x && x < x1) {
      spk(p.spikes[si].strength);
      ++si;
    }
    if (x >= x1) break;
    double next = x1;
    if (si < p.spikes.size() && p.spikes[si].position < x1)
      next = std::min(next, p.spikes[si].position);
    // Emit constant pieces up to `next`, split at segment boundaries.
    double lo = x;
    for (std::size_t b = 1; b < bounds.size() && lo < next; ++b) {
      if (bounds[b] <= lo) continue;
      const double hi = std::min(bounds[b], next);
      seg(lo, hi, p.segments[b - 1].height);
      lo = hi;
    }
    if (lo < next) seg(lo, next, p.segments.back().height);
    x = next;
  }
}

struct Rk4State {
  double y[4];
};

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kErr[7] = {71.0 / 57600,     0.0,          -71.0 / 16695,
                            71.0 / 1920,      -17253.0 / 339200,
                            22.0 / 525,       -1.0 / 40};

}  // namespace

namespace detail {

std::vector<Piece> layout_pieces(const PeriodicPotential& p, double x0,
                                 double x1) {
  std::vector<Piece> out;
  walk_pieces(
      p, x0, x1,
      [&](double lo, double hi, double h) {
        out.push_back({false, lo, hi, h, 0.0});
      },
      [&](double v) {
        const double pos = out.empty() ? x0 : out.back().hi;
        out.push_back({true, pos, pos, 0.0, v});
      });
  return out;
}

TransferMatrix integrate_overlay_piece(const PeriodicPotential& p, double x0,
                                       double x1, double height, double energy) {
  const auto vfun = [&](double x) { return height + p.overlay_at_local(x); };
  const auto deriv = [&](double x, const double* y, double* dy) {
    const double w = vfun(x) - energy;
    dy[0] = y[1];
    dy[1] = w * y[0];
    dy[2] = y[3];
    dy[3] = w * y[2];
  };

  // Grid-node breakpoints matter only for the interpolated table; an exact
  // overlay_fn is smooth between segment boundaries.
  std::vector<double> breakpoints;
  if (!p.overlay_fn && p.overlay) {
    const double h = p.overlay->grid_step;
    const double sliver = 1e-12 * std::max(1.0, x1 - x0);
    for (long i = long(std::floor(x0 / h)) + 1;; ++i) {
      const double b = double(i) * h;
      if (b >= x1 - sliver) break;
      if (b > x0 + sliver) breakpoints.push_back(b);
    }
  }
  breakpoints.push_back(x1);

  // Controller runs a notch below the contracted 1e-10 accuracy so the
  // accumulated Wronskian drift over a period stays within it.
  constexpr double rtol = 1e-11, atol = 1e-15;
  double y[4] = {1.0, 0.0, 0.0, 1.0};
  double x = x0;
  double hstep = std::min((x1 - x0), p.period / 64.0);
  if (!breakpoints.empty()) hstep = std::min(hstep, breakpoints.front() - x0);
  if (hstep <= 0.0) hstep = x1 - x0;

  std::size_t bp = 0;
  double k[7][4], ytmp[4], ynew[4], yerr[4];
  while (x < x1) {
    while (bp < breakpoints.size() && breakpoints[bp] <= x + 1e-14) ++bp;
    const double stop = bp < breakpoints.size() ? breakpoints[bp] : x1;
    const bool hits_stop = hstep >= stop - x;
    double h = hits_stop ? stop - x : hstep;
    if (h < 1e-14 * std::max(1.0, x1 - x0))
      fail(errc::integration_failure, "adaptive step underflow in overlay integration");

    deriv(x, y, k[0]);
    for (int stage = 1; stage < 7; ++stage) {
      for (int i = 0; i < 4; ++i) {
        double acc = y[i];
        for (int j = 0; j < stage; ++j) acc += h * kA[stage][j] * k[j][i];
        ytmp[i] = acc;
      }
      deriv(x + kC[stage] * h, ytmp, k[stage]);
    }
    for (int i = 0; i < 4; ++i) {
      ynew[i] = ytmp[i];  // stage 7 uses the 5th-order weights
      double e = 0.0;
      for (int j = 0; j < 7; ++j) e += kErr[j] * k[j][i];
      yerr[i] = h * e;
    }
    double errnorm = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      errnorm = std::max(errnorm, std::abs(yerr[i]) / sc);
    }
    if (errnorm <= 1.0) {
      x = hits_stop ? stop : x + h;
      for (int i = 0; i < 4; ++i) y[i] = ynew[i];
    }
    const double fac = errnorm > 0.0 ? 0.9 * std::pow(errnorm, -0.2) : 5.0;
    hstep = h * std::clamp(fac, 0.2, 5.0);
  }
  return {y[0], y[2], y[1], y[3]};
}

}  // namespace detail

TransferMatrix transfer(const PeriodicPotential& p, double x0, double x1,
                        double energy) {
  require(x0 >= -1e-12 && x1 <= p.period * (1.0 + 1e-12) && x0 <= x1,
          errc::validation, "transfer window must satisfy 0 <= x0 <= x1 <= period");
  TransferMatrix m;
  const bool overlay = p.has_overlay();
  walk_pieces(
      p, x0, x1,
      [&](double lo, double hi, double h) {
        if (overlay)
          m = detail::integrate_overlay_piece(p, lo, hi, h, energy) * m;
        else
          m = segment_matrix(h, hi - lo, energy) * m;
      },
      [&](double v) { m = spike_matrix(v) * m; });
  return m;
}

TransferMatrix monodromy(const PeriodicPotential& p, double energy) {
  p.validate();
  return transfer(p, 0.0, p.period, energy);
}

WaveTrace propagate_trace(const PeriodicPotential& p, double energy,
                          double psi0, double dpsi0, int n_periods,
                          int samples_per_period) {
  p.validate();
  require(psi0 != 0.0 || dpsi0 != 0.0, errc::validation,
          "initial state must be nonzero");
  require(n_periods >= 1, errc::validation, "need at least one period");
  require(samples_per_period >= 4, errc::validation,
          "need at least four samples per period");

  const double a = p.period;
  const int m = samples_per_period;

  std::vector<TransferMatrix> steps(m);
  std::vector<double> offsets(m + 1);
  for (int j = 0; j <= m; ++j) offsets[j] = j == m ? a : a * double(j) / m;
  for (int j = 0; j < m; ++j)
    steps[j] = transfer(p, offsets[j], offsets[j + 1], energy);

  WaveTrace t;
  t.energy = energy;
  t.period = a;
  t.n_periods = n_periods;
  t.samples_per_period = m;
  const std::size_t n = std::size_t(n_periods) * m + 1;
  t.xs.resize(n);
  t.psi.resize(n);
  t.dpsi.resize(n);
  t.log_scale.resize(n);

  double psi = psi0, dpsi = dpsi0, ls = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int per = int(i) / m, j = int(i) % m;
    t.xs[i] = per * a + offsets[j];
    t.psi[i] = psi;
    t.dpsi[i] = dpsi;
    t.log_scale[i] = ls;
    if (i + 1 < n) {
      steps[j].apply(psi, dpsi);
      const double mag = std::max(std::abs(psi), std::abs(dpsi));
      if (mag > kRenormHigh || (mag > 0.0 && mag < kRenormLow)) {
        psi /= mag;
        dpsi /= mag;
        ls += std::log(mag);
      }
    }
  }

  // psi(x) inside a sample interval, from the stored state at its left end.
  const auto eval_from = [&](std::size_t i, double x) {
    const int j = int(i) % m;
    const double lo = offsets[j];
    const double lx = lo + (x - t.xs[i]);
    const TransferMatrix tm = transfer(p, lo, std::min(lx, a), energy);
    return tm.m11 * t.psi[i] + tm.m12 * t.dpsi[i];
  };

  std::size_t last = 0;
  bool have_last = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (t.psi[i] == 0.0) {
      t.knots.push_back(t.xs[i]);
      have_last = false;  // the crossing is the recorded sample itself
      continue;
    }
    if (have_last && t.psi[last] * t.psi[i] < 0.0) {
      const double root = bisect_root([&](double x) { return eval_from(last, x); },
                                      t.xs[last], t.xs[i], t.psi[last], kKnotXTol);
      t.knots.push_back(root);
    }
    last = i;
    have_last = true;
  }

  // Near-tangencies: a small-|psi| sample flanked by same-sign neighbours.
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (t.psi[i] == 0.0 || t.psi[i - 1] == 0.0 || t.psi[i + 1] == 0.0) continue;
    if (t.psi[i - 1] * t.psi[i + 1] <= 0.0) continue;
    if (std::abs(t.psi[i]) > std::min(std::abs(t.psi[i - 1]), std::abs(t.psi[i + 1])))
      continue;
    const int per = int(i) / m;
    double local_max = 0.0;
    for (int j = per * m; j <= (per + 1) * m && j < int(n); ++j)
      local_max = std::max(local_max,
                           std::abs(t.psi[j]) * std::exp(t.log_scale[j] - t.log_scale[i]));
    if (std::abs(t.psi[i]) < kDoubleKnotTol * local_max)
      t.double_knots.push_back(t.xs[i]);
  }
  return t;
}

double junction_factor(const WaveTrace& trace, int period_index) {
  require(period_index >= 0 && period_index < trace.n_periods, errc::validation,
          "trace does not span the requested period");
  const std::size_t l = trace.boundary_index(period_index);
  const std::size_t r = trace.boundary_index(period_index + 1);

  double scale = 0.0;
  for (std::size_t i = l; i <= r; ++i)
    scale = std::max(scale, std::abs(trace.dpsi[i]) *
                                std::exp(trace.log_scale[i] - trace.log_scale[l]));
  const double dl = std::abs(trace.dpsi[l]);
  const double dr =
      std::abs(trace.dpsi[r]) * std::exp(trace.log_scale[r] - trace.log_scale[l]);
  require(dl >= 1e-12 * scale && dr >= 1e-12 * scale, errc::derivative_near_zero,
          "derivative vanishes at a period boundary; junction factor undefined");
  return (trace.dpsi[r] / trace.dpsi[l]) *
         std::exp(trace.log_scale[r] - trace.log_scale[l]);
}

}  // namespace bandctl
