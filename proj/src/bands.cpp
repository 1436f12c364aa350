#include "bandctl/bands.hpp"

#include <algorithm>
#include <cmath>

#include "bandctl/kernels.hpp"
#include "bandctl/numeric.hpp"
#include "bandctl/propagator.hpp"

namespace bandctl {

namespace {

constexpr double kEdgeETol = 1e-10;    // E-resolution of refined edges
constexpr double kTangencyTol = 1e-9;  // |Δ| - 1 at a grazing touch

}  // namespace

const BandInterval* BandStructure::band_containing(double e) const {
  for (const auto& b : bands)
    if (b.contains(e)) return &b;
  return nullptr;
}

const BandInterval* BandStructure::gap_containing(double e) const {
  for (const auto& g : gaps)
    if (g.contains(e)) return &g;
  return nullptr;
}

int BandStructure::band_index(double e) const {
  for (std::size_t i = 0; i < bands.size(); ++i)
    if (e > bands[i].lo && e < bands[i].hi) return int(i) + 1;
  return 0;
}

double discriminant(const PeriodicPotential& p, double energy) {
  return monodromy(p, energy).half_trace();
}

std::vector<double> discriminant_grid(const PeriodicPotential& p,
                                      const std::vector<double>& energies) {
  std::vector<double> out(energies.size());
  if (!p.has_overlay()) {
    const auto cp = kernels::compile(p);
    kernels::half_trace_batch(cp, energies.data(), energies.size(), out.data());
  } else {
    for (std::size_t i = 0; i < energies.size(); ++i)
      out[i] = discriminant(p, energies[i]);
  }
  return out;
}

double default_scan_floor(const PeriodicPotential& p) {
  double floor = p.min_height();
  if (p.overlay)
    floor += std::min(0.0, *std::min_element(p.overlay->values.begin(),
                                             p.overlay->values.end()));
  double spikes = 0.0;
  for (const auto& s : p.spikes) spikes = std::max(spikes, std::abs(s.strength));
  return floor - 2.0 * spikes / p.period - 1.0;
}

BandStructure scan_bands(const PeriodicPotential& p, double e_min, double e_max) {
  return scan_bands(p, e_min, e_max, (e_max - e_min) / 4000.0);
}

BandStructure scan_bands(const PeriodicPotential& p, double e_min, double e_max,
                         double grid_step) {
  p.validate();
  require(e_min < e_max, errc::validation, "band scan needs e_min < e_max");
  require(grid_step > 0.0, errc::validation, "band scan grid step must be positive");

  const std::size_t n = std::size_t((e_max - e_min) / grid_step) + 2;
  std::vector<double> es(n);
  for (std::size_t i = 0; i < n; ++i)
    es[i] = i + 1 == n ? e_max : e_min + grid_step * double(i);
  const std::vector<double> ds = discriminant_grid(p, es);

  const auto disc = [&](double e) { return discriminant(p, e); };

  BandStructure bs;
  bs.e_min = e_min;
  bs.e_max = e_max;

  auto add_edge = [&](double e, int sign, bool tangent) {
    bs.edges.push_back({e, sign, tangent});
  };

  // Bracketed crossings of Δ = ±1 between grid neighbours.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (const double target : {+1.0, -1.0}) {
      const double fa = ds[i] - target, fb = ds[i + 1] - target;
      if (fa == 0.0 && i == 0) add_edge(es[i], int(target), false);
      if (fb == 0.0) add_edge(es[i + 1], int(target), false);
      if (fa * fb < 0.0) {
        const double root =
            brent_root([&](double e) { return disc(e) - target; }, es[i],
                       es[i + 1], fa, fb, kEdgeETol);
        add_edge(root, int(target), false);
      }
    }
  }

  // Local extrema of Δ: grazing touches of ±1 and narrow features (gaps or
  // bands) the grid stepped over.
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const bool is_max = ds[i] >= ds[i - 1] && ds[i] >= ds[i + 1];
    const bool is_min = ds[i] <= ds[i - 1] && ds[i] <= ds[i + 1];
    if (!is_max && !is_min) continue;
    const double sign = is_max ? -1.0 : 1.0;
    const double xe = golden_minimize([&](double e) { return sign * disc(e); },
                                      es[i - 1], es[i + 1], kEdgeETol);
    const double de = disc(xe);
    for (const double target : {+1.0, -1.0}) {
      // Only extrema poking at a target from one side matter here; plain
      // crossings were bracketed above.
      const bool from_below =
          is_max && ds[i - 1] < target && ds[i + 1] < target;
      const bool from_above =
          is_min && ds[i - 1] > target && ds[i + 1] > target;
      if (!from_below && !from_above) continue;
      if (std::abs(de - target) <= kTangencyTol) {
        add_edge(xe, int(target), true);
        add_edge(xe, int(target), true);
      } else if ((from_below && de > target) || (from_above && de < target)) {
        const double f_lo = disc(es[i - 1]) - target;
        const double f_mid = de - target;
        add_edge(brent_root([&](double e) { return disc(e) - target; },
                            es[i - 1], xe, f_lo, f_mid, kEdgeETol),
                 int(target), false);
        const double f_hi = disc(es[i + 1]) - target;
        add_edge(brent_root([&](double e) { return disc(e) - target; }, xe,
                            es[i + 1], f_mid, f_hi, kEdgeETol),
                 int(target), false);
      }
    }
  }

  std::sort(bs.edges.begin(), bs.edges.end(),
            [](const BandEdge& a, const BandEdge& b) { return a.energy < b.energy; });
  // Merge duplicates from shared grid nodes (keep tangency pairs intact).
  std::vector<BandEdge> dedup;
  for (const auto& e : bs.edges) {
    if (!dedup.empty() && !e.tangency && !dedup.back().tangency &&
        std::abs(e.energy - dedup.back().energy) < 10 * kEdgeETol &&
        e.disc_sign == dedup.back().disc_sign)
      continue;
    dedup.push_back(e);
  }
  bs.edges = std::move(dedup);

  if (bs.edges.empty()) return bs;

  // Intervals between consecutive edges, classified at midpoints; the region
  // below the first edge is outside the spectrum and not reported.
  std::vector<double> cuts;
  for (const auto& e : bs.edges) cuts.push_back(e.energy);
  cuts.push_back(e_max);
  double lo = bs.edges.front().energy;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double hi = cuts[i];
    if (hi < lo) continue;
    if (hi - lo < 10 * kEdgeETol) {
      // Zero-width interval: report as a touching gap only for tangencies.
      if (i <= bs.edges.size() && i >= 1 && bs.edges[i - 1].tangency) {
        bs.gaps.push_back({lo, lo});
      }
      lo = hi;
      continue;
    }
    const double mid = 0.5 * (lo + hi);
    if (std::abs(disc(mid)) <= 1.0)
      bs.bands.push_back({lo, hi});
    else
      bs.gaps.push_back({lo, hi});
    lo = hi;
  }

  for (const auto& b : bs.bands)
    if (b.width() < 2.0 * grid_step)
      bs.warnings.push_back("band [" + std::to_string(b.lo) + ", " +
                            std::to_string(b.hi) +
                            "] narrower than twice the grid step; consider a finer scan");
  return bs;
}

ForbiddennessProfile forbiddenness(const PeriodicPotential& p,
                                   const std::vector<double>& grid) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    require(grid[i] >= grid[i - 1], errc::validation,
            "forbiddenness grid must be sorted");
  ForbiddennessProfile f;
  f.energies = grid;
  f.imk.resize(grid.size());
  const std::vector<double> ds = discriminant_grid(p, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ad = std::abs(ds[i]);
    f.imk[i] = ad > 1.0 ? std::acosh(ad) / p.period : 0.0;
  }
  return f;
}

double forbiddenness_at(const PeriodicPotential& p, double energy) {
  const double ad = std::abs(discriminant(p, energy));
  return ad > 1.0 ? std::acosh(ad) / p.period : 0.0;
}

double transmission(const PeriodicPotential& p, double energy, int n_periods) {
  p.validate();
  require(energy > 0.0, errc::validation,
          "transmission requires E > 0 (propagating outside states)");
  require(n_periods >= 0, errc::validation, "n_periods must be nonnegative");
  if (n_periods == 0) return 1.0;

  const TransferMatrix m = monodromy(p, energy);
  TransferMatrix acc;  // identity
  double log_scale = 0.0;
  for (int i = 0; i < n_periods; ++i) {
    acc = m * acc;
    const double mag = std::max({std::abs(acc.m11), std::abs(acc.m12),
                                 std::abs(acc.m21), std::abs(acc.m22)});
    if (mag > 1e100) {
      acc.m11 /= mag; acc.m12 /= mag; acc.m21 /= mag; acc.m22 /= mag;
      log_scale += std::log(mag);
    }
  }
  const double k = std::sqrt(energy);
  const double a = k * (acc.m11 + acc.m22);
  const double b = k * k * acc.m12 - acc.m21;
  const double den = a * a + b * b;  // carries e^{2 log_scale}
  if (den == 0.0) return 1.0;
  const double t = 4.0 * k * k / den * std::exp(-2.0 * log_scale);
  return std::min(t, 1.0);
}

}  // namespace bandctl
