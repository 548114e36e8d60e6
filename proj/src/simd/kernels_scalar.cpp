#include <cmath>

#include "dggan/simd/kernels.hpp"

namespace dggan::simd {
namespace {

double dot_ref(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_ref(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_ref(const double* w, const double* x, const double* bias, double* y, std::size_t rows,
              std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double acc = dot_ref(w + r * cols, x, cols);
    y[r] = bias ? acc + bias[r] : acc;
  }
}

void gemv_t_acc_ref(const double* w, const double* g, double* out, std::size_t rows,
                    std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_ref(g[r], w + r * cols, out, cols);
}

void ger_ref(double alpha, const double* g, const double* x, double* w, std::size_t rows,
             std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_ref(alpha * g[r], x, w + r * cols, cols);
}

void adam_ref(double* p, const double* g, double* m, double* v, std::size_t n, double b1,
              double b2, double c1, double c2, double lr, double eps) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * (g[i] * g[i]);
    p[i] -= lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", dot_ref,     axpy_ref, gemv_ref,
                                 gemv_t_acc_ref, ger_ref, adam_ref};
  return table;
}

}  // namespace dggan::simd
