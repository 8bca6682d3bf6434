#include "rlcg/kernels/kernels.hpp"

#include <cmath>

namespace rlcg::kernels {
namespace {

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  double total = (s0 + s2) + (s1 + s3);
  for (; i < n; ++i) total += x[i] * y[i];
  return total;
}

void relu_scalar(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward_scalar(double* grad, const double* pre, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) grad[i] = pre[i] > 0.0 ? grad[i] : 0.0;
}

void adam_scalar(double* param, double* m, double* v, const double* grad, std::size_t n,
                 const AdamCoefficients& c) {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = c.beta1 * m[i] + one_minus_b1 * grad[i];
    v[i] = c.beta2 * v[i] + one_minus_b2 * (grad[i] * grad[i]);
    const double m_hat = m[i] / c.bias_correction1;
    const double v_hat = v[i] / c.bias_correction2;
    param[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

constexpr KernelTable kScalar{
    "scalar", axpy_scalar, dot_scalar, relu_scalar, relu_backward_scalar, adam_scalar,
};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace rlcg::kernels
