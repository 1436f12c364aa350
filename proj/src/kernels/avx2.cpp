// AVX2 vector kernels. This TU is compiled with -mavx2 -mfma; callers must
// go through the dispatch table, which checks cpuid before selecting it.
#define BANDCTL_KERNEL_VARIANT avx2
#include "simd_impl.inl"
