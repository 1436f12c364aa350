#include "bandctl/dirichlet.hpp"

#include <algorithm>
#include <cmath>

#include "bandctl/numeric.hpp"
#include "bandctl/propagator.hpp"
#include "bandctl/transfer_matrix.hpp"

namespace bandctl {

namespace {

// ∫_0^U of c², c·σ and σ² for the constant-piece basis c(u), σ(u) at
// curvature s = E - height. Uses the invariant c² + sσ² = 1 and
// (σc)' = 1 - 2sσ², with a series for small sU² where the closed form cancels.
void segment_squares(double s, double U, double& j0, double& j1, double& j2) {
  double c, sig;
  detail::segment_cs(s, U, c, sig);
  j1 = 0.5 * sig * sig;
  const double u = s * U * U;
  if (std::abs(u) < 1e-4) {
    j2 = U * U * U * (1.0 / 3.0 - u / 15.0 + 2.0 * u * u / 315.0);
  } else {
    j2 = (U - sig * c) / (2.0 * s);
  }
  j0 = U - s * j2;
}

double span_square_integral(double s, double psi, double dpsi, double U) {
  double j0, j1, j2;
  segment_squares(s, U, j0, j1, j2);
  return psi * psi * j0 + 2.0 * psi * dpsi * j1 + dpsi * dpsi * j2;
}

// Quintic Hermite on [x0, x0+h] from values, first and second derivatives at
// both ends.
struct Hermite5 {
  double x0, h;
  double v0, d0, a0, v1, d1, a1;

  double value(double x) const {
    const double t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    const double h3 = 10 * t3 - 15 * t4 + 6 * t5;
    const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
    const double h5 = 0.5 * (t3 - 2 * t4 + t5);
    return v0 * h0 + d0 * h * h1 + a0 * h * h * h2 + v1 * h3 + d1 * h * h4 +
           a1 * h * h * h5;
  }
  double deriv(double x) const {
    const double t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    const double g0 = -30 * t2 + 60 * t3 - 30 * t4;
    const double g1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
    const double g2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
    const double g3 = 30 * t2 - 60 * t3 + 30 * t4;
    const double g4 = -12 * t2 + 28 * t3 - 15 * t4;
    const double g5 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
    return v0 * g0 / h + d0 * g1 + a0 * h * g2 + v1 * g3 / h + d1 * g4 +
           a1 * h * g5;
  }
};

// 7-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGx[7] = {-0.9491079123427585, -0.7415311855993945,
                           -0.4058451513773972, 0.0,
                           0.4058451513773972,  0.7415311855993945,
                           0.9491079123427585};
constexpr double kGw[7] = {0.1294849661688697, 0.2797053914892766,
                           0.3818300505051189, 0.4179591836734694,
                           0.3818300505051189, 0.2797053914892766,
                           0.1294849661688697};

}  // namespace

double IntervalWave::vfun(double x, const Span& s) const {
  return s.height + (s.overlay ? window_->overlay_at_local(std::min(x, length_))
                               : 0.0);
}

IntervalWave::IntervalWave(const PeriodicPotential& window, double energy,
                           double anchor, double psi, double dpsi) {
  window.validate();
  require(anchor >= 0.0 && anchor <= window.period, errc::validation,
          "wave anchor must lie inside the window");
  energy_ = energy;
  length_ = window.period;
  window_ = std::make_shared<PeriodicPotential>(window);

  double p0 = psi, d0 = dpsi;
  if (anchor > 0.0) {
    const TransferMatrix back = transfer(window, 0.0, anchor, energy).unit_inverse();
    p0 = back.m11 * psi + back.m12 * dpsi;
    d0 = back.m21 * psi + back.m22 * dpsi;
  }

  const auto pieces = detail::layout_pieces(window, 0.0, length_);
  const bool has_ov = window.has_overlay();
  double cp = p0, cd = d0, cum = 0.0;
  for (const auto& pc : pieces) {
    if (pc.is_spike) {
      cd += pc.strength * cp;
      continue;
    }
    Span sp;
    sp.lo = pc.lo;
    sp.hi = pc.hi;
    sp.height = pc.height;
    sp.overlay = has_ov;
    sp.psi = cp;
    sp.dpsi = cd;
    sp.cum = cum;
    if (!has_ov) {
      const double w = pc.hi - pc.lo;
      cum += span_square_integral(energy - pc.height, cp, cd, w);
      double c, sig;
      detail::segment_cs(energy - pc.height, w, c, sig);
      const double np = c * cp + sig * cd;
      const double nd = -(energy - pc.height) * sig * cp + c * cd;
      cp = np;
      cd = nd;
    } else {
      // Dense node cache through the overlay region.
      double step = pc.hi - pc.lo;
      if (window.overlay) step = std::min(step, window.overlay->grid_step);
      step = std::min(step, length_ / 1024.0);
      const int nsub = std::max(1, int(std::ceil((pc.hi - pc.lo) / step - 1e-9)));
      sp.nx.push_back(pc.lo);
      sp.npsi.push_back(cp);
      sp.ndpsi.push_back(cd);
      sp.ncum.push_back(cum);
      for (int j = 0; j < nsub; ++j) {
        const double xa = pc.lo + (pc.hi - pc.lo) * double(j) / nsub;
        const double xb = j + 1 == nsub
                              ? pc.hi
                              : pc.lo + (pc.hi - pc.lo) * double(j + 1) / nsub;
        const TransferMatrix tm =
            detail::integrate_overlay_piece(window, xa, xb, pc.height, energy);
        const double np = tm.m11 * cp + tm.m12 * cd;
        const double nd = tm.m21 * cp + tm.m22 * cd;
        // Cumulative square via Gauss-Legendre on the Hermite interpolant.
        Hermite5 hm{xa,
                    xb - xa,
                    cp,
                    cd,
                    (vfun(xa, sp) - energy) * cp,
                    np,
                    nd,
                    (vfun(xb, sp) - energy) * np};
        double acc = 0.0;
        for (int g = 0; g < 7; ++g) {
          const double xg = 0.5 * (xa + xb) + 0.5 * (xb - xa) * kGx[g];
          const double v = hm.value(xg);
          acc += kGw[g] * v * v;
        }
        cum += 0.5 * (xb - xa) * acc;
        cp = np;
        cd = nd;
        sp.nx.push_back(xb);
        sp.npsi.push_back(cp);
        sp.ndpsi.push_back(cd);
        sp.ncum.push_back(cum);
      }
    }
    spans_.push_back(std::move(sp));
  }
  total_square_ = cum;
}

const IntervalWave::Span& IntervalWave::span_at(double x) const {
  require(!spans_.empty(), errc::validation, "wave is empty");
  std::size_t lo = 0, hi = spans_.size();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (spans_[mid].lo <= x)
      lo = mid;
    else
      hi = mid;
  }
  return spans_[lo];
}

void IntervalWave::value_deriv(double x, double& v, double& d) const {
  x = std::clamp(x, 0.0, length_);
  const Span& s = span_at(x);
  if (!s.overlay) {
    double c, sig;
    detail::segment_cs(energy_ - s.height, x - s.lo, c, sig);
    v = c * s.psi + sig * s.dpsi;
    d = -(energy_ - s.height) * sig * s.psi + c * s.dpsi;
    return;
  }
  const auto it = std::upper_bound(s.nx.begin(), s.nx.end(), x);
  std::size_t j = it == s.nx.begin() ? 0 : std::size_t(it - s.nx.begin()) - 1;
  if (j + 1 >= s.nx.size()) j = s.nx.size() - 2;
  const double xa = s.nx[j], xb = s.nx[j + 1];
  Hermite5 hm{xa,
              xb - xa,
              s.npsi[j],
              s.ndpsi[j],
              (vfun(xa, s) - energy_) * s.npsi[j],
              s.npsi[j + 1],
              s.ndpsi[j + 1],
              (vfun(xb, s) - energy_) * s.npsi[j + 1]};
  v = hm.value(x);
  d = hm.deriv(x);
}

double IntervalWave::value(double x) const {
  double v, d;
  value_deriv(x, v, d);
  return v;
}

double IntervalWave::deriv(double x) const {
  double v, d;
  value_deriv(x, v, d);
  return d;
}

double IntervalWave::square_integral(double x) const {
  x = std::clamp(x, 0.0, length_);
  const Span& s = span_at(x);
  if (!s.overlay)
    return s.cum + span_square_integral(energy_ - s.height, s.psi, s.dpsi, x - s.lo);
  const auto it = std::upper_bound(s.nx.begin(), s.nx.end(), x);
  std::size_t j = it == s.nx.begin() ? 0 : std::size_t(it - s.nx.begin()) - 1;
  if (j + 1 >= s.nx.size()) j = s.nx.size() - 2;
  const double xa = s.nx[j], xb = s.nx[j + 1];
  Hermite5 hm{xa,
              xb - xa,
              s.npsi[j],
              s.ndpsi[j],
              (vfun(xa, s) - energy_) * s.npsi[j],
              s.npsi[j + 1],
              s.ndpsi[j + 1],
              (vfun(xb, s) - energy_) * s.npsi[j + 1]};
  double acc = 0.0;
  for (int g = 0; g < 7; ++g) {
    const double xg = 0.5 * (xa + x) + 0.5 * (x - xa) * kGx[g];
    const double v = hm.value(xg);
    acc += kGw[g] * v * v;
  }
  return s.ncum[j] + 0.5 * (x - xa) * acc;
}

double IntervalWave::norm() const { return std::sqrt(total_square_); }

void IntervalWave::scale(double f) {
  for (auto& s : spans_) {
    s.psi *= f;
    s.dpsi *= f;
    s.cum *= f * f;
    for (auto& v : s.npsi) v *= f;
    for (auto& v : s.ndpsi) v *= f;
    for (auto& v : s.ncum) v *= f * f;
  }
  total_square_ *= f * f;
}

void IntervalWave::normalize() {
  const double n = norm();
  require(n > 0.0, errc::validation, "cannot normalize a zero wave");
  scale(1.0 / n);
}

double IntervalWave::cross_integral(const IntervalWave& other, double x) const {
  const double de = other.energy_ - energy_;
  if (std::abs(de) > 1e-8) {
    double v0, d0, w0, e0, v1, d1, w1, e1;
    value_deriv(0.0, v0, d0);
    other.value_deriv(0.0, w0, e0);
    value_deriv(x, v1, d1);
    other.value_deriv(x, w1, e1);
    return ((d1 * w1 - v1 * e1) - (d0 * w0 - v0 * e0)) / de;
  }
  // Same-energy fallback: composite Gauss-Legendre over span cells.
  double acc = 0.0;
  double lo = 0.0;
  const double hi = std::clamp(x, 0.0, length_);
  const int ncell = 512;
  for (int c = 0; c < ncell && lo < hi; ++c) {
    const double cb = std::min(hi, length_ * double(c + 1) / ncell);
    if (cb <= lo) continue;
    for (int g = 0; g < 7; ++g) {
      const double xg = 0.5 * (lo + cb) + 0.5 * (cb - lo) * kGx[g];
      acc += kGw[g] * value(xg) * other.value(xg) * 0.5 * (cb - lo);
    }
    lo = cb;
  }
  return acc;
}

int count_shooting_knots(const PeriodicPotential& window, double energy) {
  window.validate();
  const auto pieces = detail::layout_pieces(window, 0.0, window.period);
  const bool has_ov = window.has_overlay();

  double psi = 0.0, dpsi = 1.0;
  int count = 0;

  const auto advance_const = [&](double s, double w) {
    if (s > 1e-12) {
      const double k = std::sqrt(s);
      const double phi0 = std::atan2(dpsi / k, psi);
      const double g0 = -phi0, g1 = k * w - phi0;
      count += int(std::floor((g1 - M_PI / 2) / M_PI) -
                   std::floor((g0 - M_PI / 2) / M_PI));
      double c, sig;
      detail::segment_cs(s, w, c, sig);
      const double np = c * psi + sig * dpsi;
      const double nd = -s * sig * psi + c * dpsi;
      psi = np;
      dpsi = nd;
    } else {
      double c, sig;
      detail::segment_cs(s, w, c, sig);
      const double np = c * psi + sig * dpsi;
      const double nd = -s * sig * psi + c * dpsi;
      // At most one zero on an evanescent/linear piece.
      if (psi != 0.0 && (np == 0.0 || psi * np < 0.0)) ++count;
      psi = np;
      dpsi = nd;
    }
  };

  for (const auto& pc : pieces) {
    if (pc.is_spike) {
      dpsi += pc.strength * psi;
      continue;
    }
    if (!has_ov) {
      advance_const(energy - pc.height, pc.hi - pc.lo);
      continue;
    }
    // Subdivide overlay regions finely enough that each cell holds at most
    // one zero, then count sign changes at cell ends.
    double vmin = pc.height;
    if (window.overlay)
      vmin += *std::min_element(window.overlay->values.begin(),
                                window.overlay->values.end());
    const double kmax = std::sqrt(std::max(1.0, energy - vmin));
    const double step = std::min(0.45 / kmax, window.period / 64.0);
    const int nsub = std::max(1, int(std::ceil((pc.hi - pc.lo) / step)));
    for (int j = 0; j < nsub; ++j) {
      const double xa = pc.lo + (pc.hi - pc.lo) * double(j) / nsub;
      const double xb =
          j + 1 == nsub ? pc.hi : pc.lo + (pc.hi - pc.lo) * double(j + 1) / nsub;
      const TransferMatrix tm =
          detail::integrate_overlay_piece(window, xa, xb, pc.height, energy);
      const double np = tm.m11 * psi + tm.m12 * dpsi;
      const double nd = tm.m21 * psi + tm.m22 * dpsi;
      if (psi != 0.0 && (np == 0.0 || psi * np < 0.0)) ++count;
      psi = np;
      dpsi = nd;
    }
  }
  // The boundary zero at x = L is not an interior knot: drop it if counted.
  if (psi == 0.0 && count > 0) --count;
  return count;
}

namespace {

double dirichlet_floor(const PeriodicPotential& window) {
  double floor = window.min_height();
  if (window.overlay)
    floor += std::min(0.0, *std::min_element(window.overlay->values.begin(),
                                             window.overlay->values.end()));
  double vsum = 0.0;
  for (const auto& s : window.spikes) vsum += std::abs(s.strength);
  return floor - 0.25 * vsum * vsum - 1.0;
}

}  // namespace

double dirichlet_eigenvalue(const PeriodicPotential& window, int n, double xtol) {
  require(n >= 1, errc::validation, "level index must be >= 1");
  const double L = window.period;

  double lo = dirichlet_floor(window);
  for (int guard = 0; count_shooting_knots(window, lo) >= n; ++guard) {
    require(guard < 60, errc::root_bracketing,
            "failed to find a lower bracket for the Dirichlet level");
    lo -= std::max(1.0, std::abs(lo));
  }
  const double pin = double(n) * M_PI / L;
  double hi = std::max(lo + 1.0, window.max_height() + pin * pin + 1.0);
  for (int guard = 0; count_shooting_knots(window, hi) < n; ++guard) {
    require(guard < 60, errc::root_bracketing,
            "failed to find an upper bracket for the Dirichlet level " +
                std::to_string(n));
    hi = lo + 2.0 * (hi - lo);
  }

  // Bisect the knot count to a tight bracket holding exactly level n.
  double a = lo, b = hi;
  while (b - a > std::max(1e-4, 64.0 * xtol) ||
         count_shooting_knots(window, a) != n - 1 ||
         count_shooting_knots(window, b) != n) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (count_shooting_knots(window, mid) >= n)
      b = mid;
    else
      a = mid;
  }

  const auto endpoint = [&](double e) { return transfer(window, 0.0, L, e).m12; };
  const double fa = endpoint(a), fb = endpoint(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb < 0.0) return brent_root(endpoint, a, b, fa, fb, xtol);
  // Rare fp corner: fall back to pure count bisection.
  while (b - a > xtol) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (count_shooting_knots(window, mid) >= n)
      b = mid;
    else
      a = mid;
  }
  return 0.5 * (a + b);
}

std::vector<double> dirichlet_eigenvalues(const PeriodicPotential& window,
                                          int n_levels, double xtol) {
  std::vector<double> out;
  out.reserve(std::size_t(n_levels));
  for (int n = 1; n <= n_levels; ++n)
    out.push_back(dirichlet_eigenvalue(window, n, xtol));
  return out;
}

IntervalWave dirichlet_eigenfunction(const PeriodicPotential& window,
                                     double eigenvalue) {
  IntervalWave w(window, eigenvalue, 0.0, 0.0, 1.0);
  w.normalize();
  return w;
}

}  // namespace bandctl
