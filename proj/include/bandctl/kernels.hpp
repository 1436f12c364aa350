#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "bandctl/potential.hpp"

namespace bandctl::kernels {

// A potential compiled to a flat left-to-right program of primitive cells.
// Segments are pre-split at interior spike positions so evaluation is a
// straight scan. Only closed-form potentials (no sampled overlay) compile;
// overlay potentials go through the adaptive integrator instead.
struct Cell {
  enum class Kind : unsigned char { segment, spike };
  Kind kind = Kind::segment;
  double width = 0.0;     // segment
  double height = 0.0;    // segment
  double strength = 0.0;  // spike
};

struct CompiledPotential {
  double period = 0.0;
  std::vector<Cell> cells;
};

// Fails with errc::validation when the potential carries an overlay.
CompiledPotential compile(const PeriodicPotential& p);

// Batch evaluation of the one-period transfer (monodromy) matrix at many
// energies. Output arrays must each hold n values.
using MonodromyBatchFn = void (*)(const Cell* cells, std::size_t ncells,
                                  const double* energies, std::size_t n,
                                  double* m11, double* m12, double* m21,
                                  double* m22);

// Batch evaluation of the Hill discriminant (monodromy half-trace) only.
using HalfTraceBatchFn = void (*)(const Cell* cells, std::size_t ncells,
                                  const double* energies, std::size_t n,
                                  double* out);

struct Variant {
  const char* name;
  MonodromyBatchFn monodromy_batch;
  HalfTraceBatchFn half_trace_batch;
};

// Scalar reference kernels; always available and the equivalence baseline.
void monodromy_batch_scalar(const Cell* cells, std::size_t ncells,
                            const double* energies, std::size_t n, double* m11,
                            double* m12, double* m21, double* m22);
void half_trace_batch_scalar(const Cell* cells, std::size_t ncells,
                             const double* energies, std::size_t n, double* out);

// Variants usable on this machine (scalar first). Selection defaults to the
// widest available variant; BANDCTL_KERNEL=<name> in the environment or
// set_active() overrides it.
const std::vector<Variant>& variants();
const Variant& active();
void set_active(std::string_view name);

// Convenience wrappers running the active variant.
void monodromy_batch(const CompiledPotential& cp, const double* energies,
                     std::size_t n, double* m11, double* m12, double* m21,
                     double* m22);
void half_trace_batch(const CompiledPotential& cp, const double* energies,
                      std::size_t n, double* out);

}  // namespace bandctl::kernels
