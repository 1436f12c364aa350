#include "bandctl/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bandctl/numeric.hpp"
#include "bandctl/propagator.hpp"

namespace bandctl {

namespace {

constexpr double kThetaFloor = 1e-10;   // relative floor for |θ|
constexpr double kCollisionTol = 1e-6;  // targeted level may not land on another

// Composite Simpson on a uniform grid (odd interval count falls back to a
// trapezoid on the last cell).
double simpson(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double h = xs[1] - xs[0];
  double acc = 0.0;
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) acc += h / 3.0 * (ys[i] + 4.0 * ys[i + 1] + ys[i + 2]);
  if (i + 1 < n) acc += 0.5 * h * (ys[i] + ys[i + 1]);
  return acc;
}

bool window_symmetric(const PeriodicPotential& p) {
  const double L = p.period;
  for (const auto& s : p.spikes) {
    if (s.position == 0.0) continue;  // boundary spikes are inert here
    bool matched = false;
    for (const auto& q : p.spikes)
      if (std::abs((L - s.position) - q.position) < 1e-9 &&
          std::abs(s.strength - q.strength) < 1e-9)
        matched = true;
    if (!matched) return false;
  }
  for (int i = 0; i < 97; ++i) {
    const double x = (double(i) + 0.21) * L / 97.0;
    if (std::abs(p.evaluate(x) - p.evaluate(L - x)) >
        1e-9 * std::max(1.0, std::abs(p.evaluate(x))))
      return false;
  }
  return true;
}

// Auxiliary solution at the shifted energy. For a symmetric window the parity
// is chosen opposite to the level eigenfunction (level n has parity (-1)^(n+1)
// about the midpoint); otherwise fall back to psibar(0) = 1, psibar'(0) = 0.
IntervalWave make_auxiliary(const PeriodicPotential& base, int level,
                            double energy, bool symmetric) {
  const double L = base.period;
  if (symmetric) {
    const bool level_even_parity = (level % 2 == 1);
    if (level_even_parity)
      return IntervalWave(base, energy, 0.5 * L, 0.0, 1.0);  // odd auxiliary
    return IntervalWave(base, energy, 0.5 * L, 1.0, 0.0);    // even auxiliary
  }
  return IntervalWave(base, energy, 0.0, 1.0, 0.0);
}

double theta_at(const IntervalWave& psi0, const IntervalWave& psibar, double x) {
  double v0, d0, vb, db;
  psi0.value_deriv(x, v0, d0);
  psibar.value_deriv(x, vb, db);
  return d0 * vb - v0 * db;
}

// Sign-definiteness check of θ over a dense grid; returns false instead of
// throwing so the usable-shift search can probe invalid t values.
bool theta_valid(const IntervalWave& psi0, const IntervalWave& psibar,
                 double length) {
  const int n = 4096;
  double maxabs = 0.0, minabs = std::numeric_limits<double>::infinity();
  int sign = 0;
  for (int i = 0; i <= n; ++i) {
    const double th = theta_at(psi0, psibar, length * double(i) / n);
    maxabs = std::max(maxabs, std::abs(th));
    minabs = std::min(minabs, std::abs(th));
    const int s = th > 0.0 ? 1 : (th < 0.0 ? -1 : 0);
    if (s == 0) return false;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return minabs >= kThetaFloor * maxabs;
}

std::vector<double> uniform_grid(double length, int n) {
  std::vector<double> xs(std::size_t(n) + 1);
  for (int i = 0; i <= n; ++i)
    xs[std::size_t(i)] = i == n ? length : length * double(i) / n;
  return xs;
}

void normalize_state(SampledState& st) {
  std::vector<double> sq(st.psi.size());
  for (std::size_t i = 0; i < st.psi.size(); ++i) sq[i] = st.psi[i] * st.psi[i];
  const double nrm2 = simpson(st.xs, sq);
  require(nrm2 > 0.0, errc::denominator_vanished,
          "transformed state norm vanished");
  const double s = 1.0 / std::sqrt(nrm2);
  for (auto& v : st.psi) v *= s;
  for (auto& v : st.dpsi) v *= s;
}

// Levels of the base window up to an energy bound (at least `floor_levels`).
std::vector<double> base_levels_up_to(const PeriodicPotential& base,
                                      double bound, int floor_levels) {
  std::vector<double> es;
  for (int k = 1; k <= 64; ++k) {
    es.push_back(dirichlet_eigenvalue(base, k, 1e-11));
    if (int(es.size()) >= floor_levels && es.back() > bound) break;
  }
  return es;
}

}  // namespace

std::vector<double> wronskian_theta(const IntervalWave& psi0,
                                    const IntervalWave& psibar,
                                    const std::vector<double>& xs) {
  require(std::abs(psi0.length() - psibar.length()) < 1e-12, errc::validation,
          "wronskian_theta: waves live on different windows");
  require(theta_valid(psi0, psibar, psi0.length()), errc::singular_wronskian,
          "θ changes sign or vanishes on the window; transformation invalid");
  std::vector<double> th(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    th[i] = theta_at(psi0, psibar, xs[i]);
  return th;
}

TransformResult susy_shift(const SusyShiftSpec& spec) {
  const PeriodicPotential& base = spec.base;
  base.validate();
  require(spec.level_index >= 1, errc::validation, "level index must be >= 1");
  require(spec.grid >= 64, errc::validation, "output grid too coarse");
  const double L = base.period;
  const int n = spec.level_index;
  const double t = spec.shift;

  const double en = dirichlet_eigenvalue(base, n, 1e-11);
  const double target = en + t;

  // The shifted level may not collide with any untouched level.
  const auto levels = base_levels_up_to(base, std::max(en, target) + 1.0, n + 2);
  for (std::size_t k = 0; k < levels.size(); ++k)
    if (int(k) + 1 != n)
      require(std::abs(levels[k] - target) > kCollisionTol, errc::validation,
              "shifted level collides with level " + std::to_string(k + 1));

  IntervalWave psi0 = dirichlet_eigenfunction(base, en);
  const bool symmetric = window_symmetric(base);
  const IntervalWave psibar = make_auxiliary(base, n, target, symmetric);

  const auto xs = uniform_grid(L, spec.grid);
  TransformResult out;
  out.level_energy = en;
  out.target_energy = target;
  out.diagnostics.symmetric_base = symmetric;
  out.diagnostics.xs = xs;
  out.diagnostics.theta = wronskian_theta(psi0, psibar, xs);

  // V = V0 - 2t (psi0 psibar)'/θ + 2t² (psi0 psibar / θ)², the product-rule
  // expansion of -2t d/dx{psi0 psibar / θ} with θ' = t psi0 psibar.
  const auto corr = [psi0, psibar, t](double x) {
    double v0, d0, vb, db;
    psi0.value_deriv(x, v0, d0);
    psibar.value_deriv(x, vb, db);
    const double th = d0 * vb - v0 * db;
    const double prod = v0 * vb;
    return -2.0 * t * (d0 * vb + v0 * db) / th +
           2.0 * t * t * (prod / th) * (prod / th);
  };

  PeriodicPotential np = base;
  const auto base_copy = std::make_shared<PeriodicPotential>(base);
  if (base.has_overlay())
    np.overlay_fn = [base_copy, corr](double x) {
      return base_copy->overlay_at_local(x) + corr(x);
    };
  else
    np.overlay_fn = corr;
  SampledOverlay ov;
  ov.grid_step = L / spec.grid;
  ov.values.resize(std::size_t(spec.grid) + 1);
  for (std::size_t i = 0; i < ov.values.size(); ++i)
    ov.values[i] = np.overlay_fn(xs[i]);
  np.overlay = std::move(ov);
  np.validate();
  out.new_potential = std::move(np);

  // Target state psi(x, En + t) = psi0 / θ, Eq-consistent derivative.
  {
    SampledState st;
    st.energy = target;
    st.xs = xs;
    st.psi.resize(xs.size());
    st.dpsi.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double v0, d0, vb, db;
      psi0.value_deriv(xs[i], v0, d0);
      psibar.value_deriv(xs[i], vb, db);
      const double th = d0 * vb - v0 * db;
      st.psi[i] = v0 / th;
      st.dpsi[i] = d0 / th - t * v0 * v0 * vb / (th * th);
    }
    normalize_state(st);
    out.states.push_back(std::move(st));
  }

  // Probe states: psi(x, E) = psi0(x, E) - t psibar/θ ∫ psi0(y,En) psi0(y,E).
  for (const double e : spec.probe_energies) {
    require(std::abs(e - en) > 1e-6, errc::validation,
            "probe energy coincides with the shifted level");
    const IntervalWave w(base, e, 0.0, 0.0, 1.0);
    SampledState st;
    st.energy = e;
    st.xs = xs;
    st.psi.resize(xs.size());
    st.dpsi.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double v0, d0, vb, db, wv, wd;
      psi0.value_deriv(xs[i], v0, d0);
      psibar.value_deriv(xs[i], vb, db);
      w.value_deriv(xs[i], wv, wd);
      const double th = d0 * vb - v0 * db;
      const double integral = psi0.cross_integral(w, xs[i]);
      st.psi[i] = wv - t * vb / th * integral;
      st.dpsi[i] = wd - t * db / th * integral +
                   t * t * v0 * vb * vb / (th * th) * integral -
                   t * vb / th * v0 * wv;
    }
    out.states.push_back(std::move(st));
  }
  return out;
}

TransformResult swf_transform(const SwfSpec& spec) {
  const PeriodicPotential& base = spec.base;
  base.validate();
  require(spec.level_index >= 1, errc::validation, "level index must be >= 1");
  require(spec.grid >= 64, errc::validation, "output grid too coarse");
  require(std::isfinite(spec.weight_ratio) && spec.weight_ratio > 0.0,
          errc::validation, "weight ratio must be finite and positive");
  const double L = base.period;
  const int m = spec.level_index;
  const double r = spec.weight_ratio;
  const double g = 1.0 - r * r;

  const double em = dirichlet_eigenvalue(base, m, 1e-11);
  IntervalWave psim = dirichlet_eigenfunction(base, em);

  const auto xs = uniform_grid(L, spec.grid);
  TransformResult out;
  out.level_energy = em;
  out.target_energy = em;
  out.diagnostics.symmetric_base = window_symmetric(base);
  out.diagnostics.xs = xs;
  out.diagnostics.denominator.resize(xs.size());
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double den = 1.0 - g * psim.square_integral(xs[i]);
    out.diagnostics.denominator[i] = den;
    dmin = std::min(dmin, den);
    dmax = std::max(dmax, std::abs(den));
  }
  require(dmin > 1e-12 * std::max(1.0, dmax), errc::denominator_vanished,
          "weight-change denominator vanishes on the window");

  // V = V̊ + 2 g [2 psi̊_m psi̊_m'/D + g psi̊_m⁴/D²], D' = -g psi̊_m².
  const auto corr = [psim, g](double x) {
    double v, d;
    psim.value_deriv(x, v, d);
    const double den = 1.0 - g * psim.square_integral(x);
    return 2.0 * g * (2.0 * v * d / den + g * v * v * v * v / (den * den));
  };

  PeriodicPotential np = base;
  const auto base_copy = std::make_shared<PeriodicPotential>(base);
  if (base.has_overlay())
    np.overlay_fn = [base_copy, corr](double x) {
      return base_copy->overlay_at_local(x) + corr(x);
    };
  else
    np.overlay_fn = corr;
  SampledOverlay ov;
  ov.grid_step = L / spec.grid;
  ov.values.resize(std::size_t(spec.grid) + 1);
  for (std::size_t i = 0; i < ov.values.size(); ++i)
    ov.values[i] = np.overlay_fn(xs[i]);
  np.overlay = std::move(ov);
  np.validate();
  out.new_potential = std::move(np);

  // Transformed eigenstates, Eq-consistent derivative; for k = m the formula
  // collapses to psi̊_m / D.
  const int nst = std::max(spec.n_states, m);
  for (int k = 1; k <= nst; ++k) {
    const double ek = k == m ? em : dirichlet_eigenvalue(base, k, 1e-11);
    const IntervalWave psik =
        k == m ? psim : dirichlet_eigenfunction(base, ek);
    SampledState st;
    st.energy = ek;
    st.xs = xs;
    st.psi.resize(xs.size());
    st.dpsi.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double vm, dm, vk, dk;
      psim.value_deriv(xs[i], vm, dm);
      psik.value_deriv(xs[i], vk, dk);
      const double den = 1.0 - g * psim.square_integral(xs[i]);
      const double ik = k == m ? psim.square_integral(xs[i])
                               : psim.cross_integral(psik, xs[i]);
      st.psi[i] = vk + g * vm / den * ik;
      st.dpsi[i] = dk + g * (dm / den + g * vm * vm * vm / (den * den)) * ik +
                   g * vm * vm * vk / den;
    }
    normalize_state(st);
    out.states.push_back(std::move(st));
  }
  return out;
}

TransformDiagnostics susy_usable_shift_interval(const PeriodicPotential& base,
                                                int level_index,
                                                double search_span) {
  base.validate();
  require(level_index >= 1 && search_span > 0.0, errc::validation,
          "bad usable-shift query");
  const double en = dirichlet_eigenvalue(base, level_index, 1e-11);
  const bool symmetric = window_symmetric(base);
  const IntervalWave psi0 = dirichlet_eigenfunction(base, en);

  const auto valid = [&](double t) {
    const IntervalWave bar = make_auxiliary(base, level_index, en + t, symmetric);
    return theta_valid(psi0, bar, base.period);
  };

  TransformDiagnostics d;
  d.symmetric_base = symmetric;
  const double step = 0.25;

  const auto scan = [&](double dir, double& bound, bool& open) {
    double last_ok = 0.0;
    for (double t = step; t <= search_span + 1e-9; t += step) {
      if (!valid(dir * t)) {
        double lo = last_ok, hi = t;
        for (int i = 0; i < 40 && hi - lo > 1e-9; ++i) {
          const double mid = 0.5 * (lo + hi);
          (valid(dir * mid) ? lo : hi) = mid;
        }
        bound = dir * lo;
        open = false;
        return;
      }
      last_ok = t;
    }
    bound = dir * search_span;
    open = true;
  };
  scan(+1.0, d.usable_shift_hi, d.usable_shift_hi_open);
  scan(-1.0, d.usable_shift_lo, d.usable_shift_lo_open);
  return d;
}

RescanReport periodize_and_rescan(const TransformResult& result,
                                  std::optional<double> extra_comb_strength,
                                  double e_min, double e_max) {
  RescanReport rep;
  PeriodicPotential q = result.new_potential;
  q.validate();
  if (extra_comb_strength) {
    bool merged = false;
    for (auto& s : q.spikes)
      if (s.position == 0.0) {
        s.strength += *extra_comb_strength;
        merged = true;
      }
    if (!merged) q = with_extra_spike(q, 0.0, *extra_comb_strength);
  }

  const double L = q.period;
  const double v_left = q.evaluate(1e-12);
  const double v_right = q.evaluate(L - 1e-12);
  if (std::abs(v_left - v_right) >
      1e-6 * std::max({1.0, std::abs(v_left), std::abs(v_right)}))
    rep.warnings.push_back(
        "periodic continuation jumps by " + std::to_string(v_left - v_right) +
        " at the period boundary");

  rep.structure = scan_bands(q, e_min, e_max);
  rep.periodized = std::move(q);
  return rep;
}

DeltaEdgeReport delta_edge_shift(const PeriodicPotential& p,
                                 SpikePlacement placement, double strength,
                                 double e_min, double e_max) {
  p.validate();
  require(p.segments.size() >= 2, errc::validation,
          "potential has no distinct barrier/well segments");
  const auto bounds = p.segment_boundaries();
  std::size_t ib = 0, iw = 0;
  for (std::size_t i = 1; i < p.segments.size(); ++i) {
    if (p.segments[i].height > p.segments[ib].height) ib = i;
    if (p.segments[i].height < p.segments[iw].height) iw = i;
  }
  require(p.segments[ib].height > p.segments[iw].height, errc::validation,
          "all segments share one height; no barrier/well midpoint");
  const std::size_t target = placement == SpikePlacement::mid_barrier ? ib : iw;
  const double mid = 0.5 * (bounds[target] + bounds[target + 1]);

  DeltaEdgeReport rep;
  rep.modified = with_extra_spike(p, mid, strength);
  rep.before = scan_bands(p, e_min, e_max);
  rep.after = scan_bands(rep.modified, e_min, e_max);
  for (const auto& eb : rep.before.edges) {
    double best = std::numeric_limits<double>::infinity();
    double at = eb.energy;
    for (const auto& ea : rep.after.edges)
      if (std::abs(ea.energy - eb.energy) < best) {
        best = std::abs(ea.energy - eb.energy);
        at = ea.energy;
      }
    rep.moves.push_back({eb.energy, at});
  }
  return rep;
}

}  // namespace bandctl
