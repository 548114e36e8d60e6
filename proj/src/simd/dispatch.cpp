#include <atomic>
#include <cstdlib>
#include <string>

#include "dggan/simd/kernels.hpp"

namespace dggan::simd {

#ifndef DGGAN_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* table_for(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return &scalar_table();
    case Backend::kAvx2:
      return cpu_has_avx2() ? avx2_table() : nullptr;
  }
  return nullptr;
}

Backend initial_backend() {
  if (const char* env = std::getenv("DGGAN_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Backend::kScalar;
    if (want == "avx2" && table_for(Backend::kAvx2)) return Backend::kAvx2;
  }
  return table_for(Backend::kAvx2) ? Backend::kAvx2 : Backend::kScalar;
}

struct Selection {
  std::atomic<const KernelTable*> table;
  std::atomic<Backend> backend;
  Selection() : backend(initial_backend()) { table = table_for(backend); }
};

Selection& selection() {
  static Selection s;
  return s;
}

}  // namespace

bool backend_supported(Backend b) { return table_for(b) != nullptr; }

std::vector<Backend> supported_backends() {
  std::vector<Backend> out{Backend::kScalar};
  if (backend_supported(Backend::kAvx2)) out.push_back(Backend::kAvx2);
  return out;
}

std::string_view backend_name(Backend b) { return b == Backend::kAvx2 ? "avx2" : "scalar"; }

const KernelTable& active() { return *selection().table.load(std::memory_order_relaxed); }

Backend active_backend() { return selection().backend.load(); }

bool set_backend(Backend b) {
  const KernelTable* t = table_for(b);
  if (!t) return false;
  selection().table = t;
  selection().backend = b;
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

}  // namespace dggan::simd
