#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace netfuzz {

// Dense row-major f64 matrix. All model arithmetic is 64-bit.
struct Tensor2 {
  uint32_t rows = 0;
  uint32_t cols = 0;
  std::vector<double> data;

  Tensor2() = default;
  Tensor2(uint32_t r, uint32_t c) : rows(r), cols(c), data(size_t(r) * c, 0.0) {}

  double* row(uint32_t r) { return data.data() + size_t(r) * cols; }
  const double* row(uint32_t r) const { return data.data() + size_t(r) * cols; }
  double& at(uint32_t r, uint32_t c) { return data[size_t(r) * cols + c]; }
  double at(uint32_t r, uint32_t c) const { return data[size_t(r) * cols + c]; }

  void zero() { std::fill(data.begin(), data.end(), 0.0); }
  bool same_shape(const Tensor2& o) const {
    return rows == o.rows && cols == o.cols;
  }
};

// out = a * b
void matmul(const Tensor2& a, const Tensor2& b, Tensor2& out);
// out = a^T * b
void matmul_at_b(const Tensor2& a, const Tensor2& b, Tensor2& out);
// out = a * b^T
void matmul_a_bt(const Tensor2& a, const Tensor2& b, Tensor2& out);
// out += a (shapes must match)
void add_inplace(Tensor2& out, const Tensor2& a);
// every row of out += bias (bias is 1 x cols)
void add_row_bias(Tensor2& out, const Tensor2& bias);

}  // namespace netfuzz
