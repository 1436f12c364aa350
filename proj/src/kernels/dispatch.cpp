#include <cstdlib>
#include <string>

#include "bandctl/kernels.hpp"

namespace bandctl::kernels {

namespace simd128 {
void monodromy_batch(const Cell*, std::size_t, const double*, std::size_t,
                     double*, double*, double*, double*);
void half_trace_batch(const Cell*, std::size_t, const double*, std::size_t,
                      double*);
}  // namespace simd128

#if defined(BANDCTL_HAVE_AVX2_TU)
namespace avx2 {
void monodromy_batch(const Cell*, std::size_t, const double*, std::size_t,
                     double*, double*, double*, double*);
void half_trace_batch(const Cell*, std::size_t, const double*, std::size_t,
                      double*);
}  // namespace avx2
#endif

CompiledPotential compile(const PeriodicPotential& p) {
  p.validate();
  require(!p.has_overlay(), errc::validation,
          "potentials with a sampled overlay cannot be compiled to closed-form cells");
  CompiledPotential cp;
  cp.period = p.period;

  const auto bounds = p.segment_boundaries();
  std::size_t next_spike = 0;
  // Spikes sitting exactly on the left period edge apply before any segment.
  while (next_spike < p.spikes.size() && p.spikes[next_spike].position == 0.0) {
    cp.cells.push_back({Cell::Kind::spike, 0.0, 0.0, p.spikes[next_spike].strength});
    ++next_spike;
  }
  for (std::size_t i = 0; i < p.segments.size(); ++i) {
    double lo = bounds[i];
    const double hi = bounds[i + 1];
    const double h = p.segments[i].height;
    while (next_spike < p.spikes.size() && p.spikes[next_spike].position < hi) {
      const double sp = p.spikes[next_spike].position;
      if (sp > lo)
        cp.cells.push_back({Cell::Kind::segment, sp - lo, h, 0.0});
      cp.cells.push_back({Cell::Kind::spike, 0.0, 0.0, p.spikes[next_spike].strength});
      lo = sp;
      ++next_spike;
    }
    if (hi > lo) cp.cells.push_back({Cell::Kind::segment, hi - lo, h, 0.0});
  }
  return cp;
}

namespace {

std::vector<Variant> build_variants() {
  std::vector<Variant> v;
  v.push_back({"scalar", &monodromy_batch_scalar, &half_trace_batch_scalar});
  v.push_back({"simd128", &simd128::monodromy_batch, &simd128::half_trace_batch});
#if defined(BANDCTL_HAVE_AVX2_TU) && defined(__x86_64__)
  if (__builtin_cpu_supports("avx2"))
    v.push_back({"avx2", &avx2::monodromy_batch, &avx2::half_trace_batch});
#endif
  return v;
}

const Variant* select_default(const std::vector<Variant>& v) {
  if (const char* env = std::getenv("BANDCTL_KERNEL")) {
    for (const auto& k : v)
      if (std::string(k.name) == env) return &k;
  }
  return &v.back();
}

const Variant*& active_slot() {
  static const Variant* slot = select_default(variants());
  return slot;
}

}  // namespace

const std::vector<Variant>& variants() {
  static const std::vector<Variant> v = build_variants();
  return v;
}

const Variant& active() { return *active_slot(); }

void set_active(std::string_view name) {
  for (const auto& k : variants()) {
    if (name == k.name) {
      active_slot() = &k;
      return;
    }
  }
  fail(errc::validation, "unknown kernel variant: " + std::string(name));
}

void monodromy_batch(const CompiledPotential& cp, const double* energies,
                     std::size_t n, double* m11, double* m12, double* m21,
                     double* m22) {
  active().monodromy_batch(cp.cells.data(), cp.cells.size(), energies, n, m11,
                           m12, m21, m22);
}

void half_trace_batch(const CompiledPotential& cp, const double* energies,
                      std::size_t n, double* out) {
  active().half_trace_batch(cp.cells.data(), cp.cells.size(), energies, n, out);
}

}  // namespace bandctl::kernels
