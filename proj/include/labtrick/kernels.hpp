#pragma once

#include <cstddef>

namespace labtrick::kernels {

// Dense double-precision inner loops of the neural engine. Every table
// computes the same quantities; SIMD variants differ from the scalar
// reference only by floating-point reassociation and fused multiply-adds.
struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out = a ⊙ b
  void (*hadamard)(const double* a, const double* b, double* out, std::size_t n);
  // C[m×n] += A[m×k] · B[k×n]
  void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);
  // C[k×n] += Aᵀ · B with A[m×k], B[m×n]
  void (*gemm_tn)(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);
  // C[m×k] += A · Bᵀ with A[m×n], B[k×n]
  void (*gemm_nt)(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the build has no AVX2 variant.
const KernelTable* avx2_kernels();

bool cpu_has_avx2_fma();

// Chosen once per process: AVX2 when compiled in and supported by the CPU,
// scalar otherwise. LABTRICK_KERNELS=scalar forces the reference path.
const KernelTable& active();

}  // namespace labtrick::kernels
