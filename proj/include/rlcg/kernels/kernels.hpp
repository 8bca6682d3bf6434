#pragma once

// Dense double-precision kernels used by the simplex basis updates and the
// Q-network. Every variant (scalar reference, AVX2) evaluates the same
// sequence of IEEE operations, so results are bitwise identical across
// variants. The reduction order of dot() is part of that contract:
//
//   four strided partial sums s0..s3 over the leading multiple-of-4 block,
//   combined as (s0 + s2) + (s1 + s3), then the tail added left to right.

#include <cstddef>
#include <span>
#include <string_view>

namespace rlcg::kernels {

struct AdamCoefficients {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

struct KernelTable {
  std::string_view name;
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*relu)(double* x, std::size_t n);
  void (*relu_backward)(double* grad, const double* pre, std::size_t n);
  void (*adam)(double* param, double* m, double* v, const double* grad,
               std::size_t n, const AdamCoefficients& c);
};

const KernelTable& scalar_table() noexcept;
// nullptr when the binary was built without AVX2 or the CPU lacks it.
const KernelTable* avx2_table() noexcept;

// Selected once on first use: RLCG_SIMD=scalar|avx2|auto (default auto).
const KernelTable& active() noexcept;

// Overrides the selection for the calling process (tests, benchmarks).
void force(const KernelTable& table) noexcept;

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline void relu(std::span<double> x) { active().relu(x.data(), x.size()); }
inline void relu_backward(std::span<double> grad, std::span<const double> pre) {
  active().relu_backward(grad.data(), pre.data(), grad.size());
}
inline void adam(std::span<double> param, std::span<double> m, std::span<double> v,
                 std::span<const double> grad, const AdamCoefficients& c) {
  active().adam(param.data(), m.data(), v.data(), grad.data(), param.size(), c);
}

namespace detail {
const KernelTable* make_avx2_table() noexcept;
}

}  // namespace rlcg::kernels
