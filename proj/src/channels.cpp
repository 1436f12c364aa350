#include "bandctl/channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bandctl/numeric.hpp"
#include "bandctl/transfer_matrix.hpp"

namespace bandctl {

namespace {

bool same_potential(const PeriodicPotential& a, const PeriodicPotential& b) {
  if (std::abs(a.period - b.period) > 1e-12) return false;
  if (a.segments.size() != b.segments.size()) return false;
  for (std::size_t i = 0; i < a.segments.size(); ++i)
    if (std::abs(a.segments[i].width - b.segments[i].width) > 1e-12 ||
        std::abs(a.segments[i].height - b.segments[i].height) > 1e-12)
      return false;
  if (a.spikes.size() != b.spikes.size()) return false;
  for (std::size_t i = 0; i < a.spikes.size(); ++i)
    if (std::abs(a.spikes[i].position - b.spikes[i].position) > 1e-12 ||
        std::abs(a.spikes[i].strength - b.spikes[i].strength) > 1e-12)
      return false;
  if (a.has_overlay() || b.has_overlay()) {
    for (int i = 0; i <= 64; ++i) {
      const double x = a.period * double(i) / 64.0;
      if (std::abs(a.evaluate(x) - b.evaluate(x)) > 1e-9) return false;
    }
  }
  return true;
}

// Half-interval state of a free channel: from a wall zero with unit slope
// across width w at curvature s = E - eps.
void wall_state(double s, double w, double& psi, double& dpsi) {
  double c, sig;
  detail::segment_cs(s, w, c, sig);
  psi = sig;
  dpsi = c;
}

double det4(double m[4][4]) {
  // Gaussian elimination with partial pivoting.
  double det = 1.0;
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (m[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      for (int c = 0; c < 4; ++c) std::swap(m[piv][c], m[col][c]);
      det = -det;
    }
    det *= m[col][col];
    for (int r = col + 1; r < 4; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

void matching_matrix(const TwoChannelSystem& sys, double e, double m[4][4]) {
  const double s1 = e - sys.threshold1;
  const double s2 = e - sys.threshold2;
  double u1, du1, u2, du2;
  wall_state(s1, M_PI, u1, du1);
  wall_state(s2, 0.5 * M_PI, u2, du2);
  // Right-side solutions mirror the left ones: w(0) = u(0), w'(0) = -u'(0).
  const double w1 = u1, dw1 = -du1;
  const double w2 = u2, dw2 = -du2;
  const double v = sys.v12;

  const double row[4][4] = {
      {u1, 0.0, -w1, 0.0},
      {0.0, u2, 0.0, -w2},
      {-du1, -v * u2, dw1, 0.0},
      {-v * u1, -du2, 0.0, dw2},
  };
  for (int r = 0; r < 4; ++r) {
    double scale = 0.0;
    for (int c = 0; c < 4; ++c) scale = std::max(scale, std::abs(row[r][c]));
    if (scale == 0.0) scale = 1.0;
    for (int c = 0; c < 4; ++c) m[r][c] = row[r][c] / scale;
  }
}

// Null vector of a rank-3 4x4 matrix by elimination; the free variable is the
// column without a usable pivot.
void null_vector(double m[4][4], double v[4]) {
  int pivot_col[4] = {-1, -1, -1, -1};
  int row = 0;
  for (int col = 0; col < 4 && row < 4; ++col) {
    int piv = row;
    for (int r = row + 1; r < 4; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-11) continue;
    if (piv != row)
      for (int c = 0; c < 4; ++c) std::swap(m[piv][c], m[row][c]);
    for (int r = 0; r < 4; ++r) {
      if (r == row) continue;
      const double f = m[r][col] / m[row][col];
      for (int c = 0; c < 4; ++c) m[r][c] -= f * m[row][c];
    }
    pivot_col[row] = col;
    ++row;
  }
  int free_col = 3;
  for (int col = 0; col < 4; ++col) {
    bool is_pivot = false;
    for (int r = 0; r < row; ++r)
      if (pivot_col[r] == col) is_pivot = true;
    if (!is_pivot) {
      free_col = col;
      break;
    }
  }
  for (int c = 0; c < 4; ++c) v[c] = 0.0;
  v[free_col] = 1.0;
  for (int r = row - 1; r >= 0; --r) {
    const int pc = pivot_col[r];
    double acc = 0.0;
    for (int c = 0; c < 4; ++c)
      if (c != pc) acc += m[r][c] * v[c];
    v[pc] = -acc / m[r][pc];
  }
}

}  // namespace

std::pair<PeriodicPotential, PeriodicPotential> decouple_symmetric(
    const TwoChannelSystem& sys) {
  require(sys.coupling == TwoChannelSystem::Coupling::constant, errc::validation,
          "symmetric decoupling needs a constant coupling");
  require(sys.threshold1 == sys.threshold2, errc::asymmetric_input,
          "decoupling requires equal thresholds");
  require(same_potential(sys.v11, sys.v22), errc::asymmetric_input,
          "decoupling requires identical diagonal potentials");
  return {with_constant_offset(sys.v11, sys.v12),
          with_constant_offset(sys.v11, -sys.v12)};
}

std::pair<double, double> weight_ratio(double delta_eps, double v12) {
  require(v12 != 0.0, errc::zero_coupling,
          "weight ratio undefined for zero coupling");
  const double b = delta_eps / (2.0 * v12);
  const double root = std::sqrt(b * b + 1.0);
  return {b + root, b - root};
}

DeltaCoupledSolution solve_delta_coupled(const TwoChannelSystem& sys,
                                         double e_lo, double e_hi,
                                         int samples) {
  require(sys.coupling == TwoChannelSystem::Coupling::delta, errc::validation,
          "model needs a delta coupling");
  require(sys.threshold1 <= sys.threshold2, errc::validation,
          "thresholds must satisfy eps1 <= eps2");
  require(e_lo < e_hi, errc::validation, "bad energy bracket");
  require(samples >= 32, errc::validation, "too few samples");

  const auto det_at = [&](double e) {
    double m[4][4];
    matching_matrix(sys, e, m);
    return det4(m);
  };

  // Lowest root in the bracket.
  const int scan = 400;
  double root = std::numeric_limits<double>::quiet_NaN();
  double prev_e = e_lo, prev_d = det_at(e_lo);
  for (int i = 1; i <= scan; ++i) {
    const double e = e_lo + (e_hi - e_lo) * double(i) / scan;
    const double d = det_at(e);
    if (prev_d == 0.0) {
      root = prev_e;
      break;
    }
    if (prev_d * d < 0.0) {
      root = brent_root(det_at, prev_e, e, prev_d, d, 1e-12);
      break;
    }
    prev_e = e;
    prev_d = d;
  }
  require(std::isfinite(root), errc::no_root_in_bracket,
          "no coupled eigenvalue in the bracket");

  DeltaCoupledSolution sol;
  sol.energy = root;

  double m[4][4], amp[4];
  matching_matrix(sys, root, m);
  null_vector(m, amp);

  const double s1 = root - sys.threshold1;
  const double s2 = root - sys.threshold2;
  const auto fill = [&](double half, double s, double a_left, double a_right,
                        std::vector<double>& xs, std::vector<double>& ps,
                        std::vector<double>& ds) {
    xs.resize(std::size_t(samples) + 1);
    ps.resize(xs.size());
    ds.resize(xs.size());
    for (int i = 0; i <= samples; ++i) {
      const double x = -half + 2.0 * half * double(i) / samples;
      double c, sig;
      if (x <= 0.0) {
        detail::segment_cs(s, x + half, c, sig);
        ps[std::size_t(i)] = a_left * sig;
        ds[std::size_t(i)] = a_left * c;
      } else {
        detail::segment_cs(s, half - x, c, sig);
        ps[std::size_t(i)] = a_right * sig;
        ds[std::size_t(i)] = -a_right * c;
      }
      xs[std::size_t(i)] = x;
    }
  };
  fill(M_PI, s1, amp[0], amp[2], sol.x1, sol.psi1, sol.dpsi1);
  fill(0.5 * M_PI, s2, amp[1], amp[3], sol.x2, sol.psi2, sol.dpsi2);

  const auto ratio = [](const std::vector<double>& xs,
                        const std::vector<double>& ps,
                        const std::vector<double>& ds) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double h = xs[i] - xs[i - 1];
      num += 0.5 * h * (ds[i] * ds[i] + ds[i - 1] * ds[i - 1]);
      den += 0.5 * h * (ps[i] * ps[i] + ps[i - 1] * ps[i - 1]);
    }
    return den > 0.0 ? num / den : 0.0;
  };
  sol.kinetic1 = ratio(sol.x1, sol.psi1, sol.dpsi1);
  sol.kinetic2 = ratio(sol.x2, sol.psi2, sol.dpsi2);
  return sol;
}

}  // namespace bandctl
