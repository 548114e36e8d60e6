#pragma once

// Data-parallel inner loops used by the model, optimizer and evaluation.
//
// Every kernel has a portable scalar reference implementation. An AVX2/FMA
// variant is compiled in a separate translation unit and selected at runtime
// when the CPU reports both features. DGGAN_SIMD=scalar|avx2 in the
// environment overrides the automatic choice.
//
// Vectorized reductions sum in a different order than the scalar loops, so
// results agree to rounding, not bit-for-bit. Runs on one machine with one
// backend are deterministic.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace dggan::simd {

enum class Backend { kScalar, kAvx2 };

struct KernelTable {
  const char* name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = W x + bias, W is rows x cols row-major, bias may be null
  void (*gemv)(const double* w, const double* x, const double* bias, double* y,
               std::size_t rows, std::size_t cols);
  // out += W^T g
  void (*gemv_t_acc)(const double* w, const double* g, double* out, std::size_t rows,
                     std::size_t cols);
  // W += alpha * g x^T
  void (*ger)(double alpha, const double* g, const double* x, double* w, std::size_t rows,
              std::size_t cols);
  // Bias-corrected Adam update on n contiguous values.
  // m = b1 m + (1-b1) g; v = b2 v + (1-b2) g^2; p -= lr (m c1) / (sqrt(v c2) + eps)
  void (*adam)(double* p, const double* g, double* m, double* v, std::size_t n, double b1,
               double b2, double c1, double c2, double lr, double eps);
};

const KernelTable& scalar_table();
/// Null when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();

bool backend_supported(Backend b);
std::vector<Backend> supported_backends();
std::string_view backend_name(Backend b);

/// The table used by the span wrappers below.
const KernelTable& active();
Backend active_backend();
/// Returns false (and changes nothing) if the backend is unavailable.
bool set_backend(Backend b);

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace dggan::simd
