#include <cmath>

#include "bandctl/kernels.hpp"
#include "bandctl/transfer_matrix.hpp"

namespace bandctl::kernels {

// Reference implementation. The SIMD variants must reproduce these results
// to a few ulp; see tests/test_kernels.cpp.

void monodromy_batch_scalar(const Cell* cells, std::size_t ncells,
                            const double* energies, std::size_t n, double* m11,
                            double* m12, double* m21, double* m22) {
  for (std::size_t i = 0; i < n; ++i) {
    const double e = energies[i];
    double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;
    for (std::size_t c = 0; c < ncells; ++c) {
      const Cell& cell = cells[c];
      if (cell.kind == Cell::Kind::spike) {
        a21 += cell.strength * a11;
        a22 += cell.strength * a12;
      } else {
        const double s = e - cell.height;
        double co, sig;
        detail::segment_cs(s, cell.width, co, sig);
        const double n11 = co * a11 + sig * a21;
        const double n12 = co * a12 + sig * a22;
        const double n21 = -s * sig * a11 + co * a21;
        const double n22 = -s * sig * a12 + co * a22;
        a11 = n11;
        a12 = n12;
        a21 = n21;
        a22 = n22;
      }
    }
    m11[i] = a11;
    m12[i] = a12;
    m21[i] = a21;
    m22[i] = a22;
  }
}

void half_trace_batch_scalar(const Cell* cells, std::size_t ncells,
                             const double* energies, std::size_t n,
                             double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double e = energies[i];
    double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;
    for (std::size_t c = 0; c < ncells; ++c) {
      const Cell& cell = cells[c];
      if (cell.kind == Cell::Kind::spike) {
        a21 += cell.strength * a11;
        a22 += cell.strength * a12;
      } else {
        const double s = e - cell.height;
        double co, sig;
        detail::segment_cs(s, cell.width, co, sig);
        const double n11 = co * a11 + sig * a21;
        const double n12 = co * a12 + sig * a22;
        const double n21 = -s * sig * a11 + co * a21;
        const double n22 = -s * sig * a12 + co * a22;
        a11 = n11;
        a12 = n12;
        a21 = n21;
        a22 = n22;
      }
    }
    out[i] = 0.5 * (a11 + a22);
  }
}

}  // namespace bandctl::kernels
