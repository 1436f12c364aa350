// Vector implementation of the monodromy batch kernels, included once per
// target namespace (BANDCTL_KERNEL_VARIANT) so each translation unit can be
// compiled with its own -m flags. The interface stays plain double*; simd
// types never cross the TU boundary.
//
// Lane layout: one energy per lane, the cell program runs identically in all
// lanes. The three regimes of a constant cell (oscillatory / evanescent /
// E ~ height series) are computed branchlessly and blended by masks; inactive
// branches are fed clamped arguments so no lane ever sees sqrt of a negative
// or a divide by zero.

#include <experimental/simd>

#include "bandctl/kernels.hpp"

namespace bandctl::kernels::BANDCTL_KERNEL_VARIANT {

namespace stdx = std::experimental;
using vd = stdx::native_simd<double>;

namespace {

inline void segment_cs_v(const vd& s, double w, vd& c, vd& sigma) {
  const vd u = s * (w * w);
  const auto use_series = stdx::abs(u) < 1e-8;
  const auto pos = s > 0.0;

  const vd c_ser = 1.0 - u / 2.0 * (1.0 - u / 12.0 * (1.0 - u / 30.0));
  const vd sig_ser = w * (1.0 - u / 6.0 * (1.0 - u / 20.0 * (1.0 - u / 42.0)));

  const vd k = stdx::sqrt(stdx::max(s, vd(1e-300)));
  const vd c_pos = stdx::cos(k * w);
  const vd sig_pos = stdx::sin(k * w) / k;

  const vd q = stdx::sqrt(stdx::max(-s, vd(1e-300)));
  const vd c_neg = stdx::cosh(q * w);
  const vd sig_neg = stdx::sinh(q * w) / q;

  c = c_neg;
  sigma = sig_neg;
  where(pos, c) = c_pos;
  where(pos, sigma) = sig_pos;
  where(use_series, c) = c_ser;
  where(use_series, sigma) = sig_ser;
}

inline void run_cells(const Cell* cells, std::size_t ncells, const vd& e,
                      vd& a11, vd& a12, vd& a21, vd& a22) {
  a11 = vd(1.0);
  a12 = vd(0.0);
  a21 = vd(0.0);
  a22 = vd(1.0);
  for (std::size_t c = 0; c < ncells; ++c) {
    const Cell& cell = cells[c];
    if (cell.kind == Cell::Kind::spike) {
      a21 += cell.strength * a11;
      a22 += cell.strength * a12;
    } else {
      const vd s = e - cell.height;
      vd co, sig;
      segment_cs_v(s, cell.width, co, sig);
      const vd n11 = co * a11 + sig * a21;
      const vd n12 = co * a12 + sig * a22;
      const vd n21 = -s * sig * a11 + co * a21;
      const vd n22 = -s * sig * a12 + co * a22;
      a11 = n11;
      a12 = n12;
      a21 = n21;
      a22 = n22;
    }
  }
}

}  // namespace

void monodromy_batch(const Cell* cells, std::size_t ncells,
                     const double* energies, std::size_t n, double* m11,
                     double* m12, double* m21, double* m22) {
  const std::size_t W = vd::size();
  std::size_t i = 0;
  for (; i + W <= n; i += W) {
    vd e;
    e.copy_from(energies + i, stdx::element_aligned);
    vd a11, a12, a21, a22;
    run_cells(cells, ncells, e, a11, a12, a21, a22);
    a11.copy_to(m11 + i, stdx::element_aligned);
    a12.copy_to(m12 + i, stdx::element_aligned);
    a21.copy_to(m21 + i, stdx::element_aligned);
    a22.copy_to(m22 + i, stdx::element_aligned);
  }
  if (i < n)
    monodromy_batch_scalar(cells, ncells, energies + i, n - i, m11 + i, m12 + i,
                           m21 + i, m22 + i);
}

void half_trace_batch(const Cell* cells, std::size_t ncells,
                      const double* energies, std::size_t n, double* out) {
  const std::size_t W = vd::size();
  std::size_t i = 0;
  for (; i + W <= n; i += W) {
    vd e;
    e.copy_from(energies + i, stdx::element_aligned);
    vd a11, a12, a21, a22;
    run_cells(cells, ncells, e, a11, a12, a21, a22);
    const vd ht = 0.5 * (a11 + a22);
    ht.copy_to(out + i, stdx::element_aligned);
  }
  if (i < n) half_trace_batch_scalar(cells, ncells, energies + i, n - i, out + i);
}

}  // namespace bandctl::kernels::BANDCTL_KERNEL_VARIANT
