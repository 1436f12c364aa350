// 128-bit baseline vector kernels (SSE2 on x86-64, NEON on aarch64).
#define BANDCTL_KERNEL_VARIANT simd128
#include "simd_impl.inl"
