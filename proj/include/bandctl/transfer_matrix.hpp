#pragma once

#include <cmath>

namespace bandctl {

// Real 2x2 propagation matrix for the state (psi, psi') across an x-interval
// at fixed energy. Units ħ²/2m = 1 throughout, so psi'' = (V - E) psi and
// det(M) = 1 expresses Wronskian conservation.
struct TransferMatrix {
  double m11 = 1.0, m12 = 0.0;
  double m21 = 0.0, m22 = 1.0;

  double det() const { return m11 * m22 - m12 * m21; }
  double half_trace() const { return 0.5 * (m11 + m22); }

  // Exact inverse for det = 1.
  TransferMatrix unit_inverse() const { return {m22, -m12, -m21, m11}; }

  void apply(double& psi, double& dpsi) const {
    double p = m11 * psi + m12 * dpsi;
    double q = m21 * psi + m22 * dpsi;
    psi = p;
    dpsi = q;
  }
};

// Matrix product: (a * b) maps a state through b first, then a.
inline TransferMatrix operator*(const TransferMatrix& a, const TransferMatrix& b) {
  return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
          a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

namespace detail {

// cos(w√s) and sin(w√s)/√s continued analytically through s <= 0, where they
// become cosh and sinh/κ. The series branch keeps full precision when
// |s| w² ~ 0 and removes the 0/0 at s = 0.
inline void segment_cs(double s, double w, double& c, double& sigma) {
  const double u = s * w * w;
  if (std::abs(u) < 1e-8) {
    c = 1.0 - u / 2.0 * (1.0 - u / 12.0 * (1.0 - u / 30.0));
    sigma = w * (1.0 - u / 6.0 * (1.0 - u / 20.0 * (1.0 - u / 42.0)));
  } else if (s > 0.0) {
    const double k = std::sqrt(s);
    c = std::cos(k * w);
    sigma = std::sin(k * w) / k;
  } else {
    const double kap = std::sqrt(-s);
    c = std::cosh(kap * w);
    sigma = std::sinh(kap * w) / kap;
  }
}

}  // namespace detail

// Propagation across a constant-height piece of width w:
//   [[cos kw, sin(kw)/k], [-k sin kw, cos kw]]       for E > height, k = √(E-h)
//   [[cosh κw, sinh(κw)/κ], [κ sinh κw, cosh κw]]    for E < height, κ = √(h-E)
//   [[1, w], [0, 1]]                                 for E = height
// all captured by M = [[c, σ], [-s σ, c]] with s = E - height.
inline TransferMatrix segment_matrix(double height, double width, double energy) {
  const double s = energy - height;
  double c, sigma;
  detail::segment_cs(s, width, c, sigma);
  return {c, sigma, -s * sigma, c};
}

// Jump condition of a delta spike of strength v: psi'(x+) = psi'(x-) + v psi(x).
inline TransferMatrix spike_matrix(double strength) {
  return {1.0, 0.0, strength, 1.0};
}

}  // namespace bandctl
