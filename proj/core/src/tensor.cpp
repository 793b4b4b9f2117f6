#include "netfuzz/tensor.hpp"

#include <sstream>

#include "netfuzz/error.hpp"

namespace netfuzz {

namespace {

[[noreturn]] void shape_error(const char* op, const Tensor2& a, const Tensor2& b) {
  std::ostringstream msg;
  msg << op << ": shapes (" << a.rows << 'x' << a.cols << ") and (" << b.rows
      << 'x' << b.cols << ") do not chain";
  throw Error(Error::Kind::ShapeMismatch, msg.str());
}

}  // namespace

// i-k-j loop order keeps the inner loop contiguous in both b and out, which
// gcc vectorizes without reassociating any reduction (bitwise stable).
void matmul(const Tensor2& a, const Tensor2& b, Tensor2& out) {
  if (a.cols != b.rows) shape_error("matmul", a, b);
  out.rows = a.rows;
  out.cols = b.cols;
  out.data.assign(size_t(a.rows) * b.cols, 0.0);
  for (uint32_t i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double* oi = out.row(i);
    for (uint32_t k = 0; k < a.cols; ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (uint32_t j = 0; j < b.cols; ++j) oi[j] += aik * bk[j];
    }
  }
}

void matmul_at_b(const Tensor2& a, const Tensor2& b, Tensor2& out) {
  if (a.rows != b.rows) shape_error("matmul_at_b", a, b);
  out.rows = a.cols;
  out.cols = b.cols;
  out.data.assign(size_t(a.cols) * b.cols, 0.0);
  for (uint32_t k = 0; k < a.rows; ++k) {
    const double* ak = a.row(k);
    const double* bk = b.row(k);
    for (uint32_t i = 0; i < a.cols; ++i) {
      const double aki = ak[i];
      if (aki == 0.0) continue;
      double* oi = out.row(i);
      for (uint32_t j = 0; j < b.cols; ++j) oi[j] += aki * bk[j];
    }
  }
}

void matmul_a_bt(const Tensor2& a, const Tensor2& b, Tensor2& out) {
  if (a.cols != b.cols) shape_error("matmul_a_bt", a, b);
  out.rows = a.rows;
  out.cols = b.rows;
  out.data.assign(size_t(a.rows) * b.rows, 0.0);
  for (uint32_t i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double* oi = out.row(i);
    for (uint32_t j = 0; j < b.rows; ++j) {
      const double* bj = b.row(j);
      double acc = 0.0;
      for (uint32_t k = 0; k < a.cols; ++k) acc += ai[k] * bj[k];
      oi[j] = acc;
    }
  }
}

void add_inplace(Tensor2& out, const Tensor2& a) {
  if (!out.same_shape(a)) shape_error("add_inplace", out, a);
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += a.data[i];
}

void add_row_bias(Tensor2& out, const Tensor2& bias) {
  if (bias.rows != 1 || bias.cols != out.cols) shape_error("add_row_bias", out, bias);
  for (uint32_t i = 0; i < out.rows; ++i) {
    double* oi = out.row(i);
    for (uint32_t j = 0; j < out.cols; ++j) oi[j] += bias.data[j];
  }
}

}  // namespace netfuzz
