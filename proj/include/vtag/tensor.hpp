#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace vtag {

class Rng;

// Dense row-major tensor of 64-bit floats. Values are immutable once
// produced by a primitive; all primitives use a fixed left-to-right
// reduction order so seeded runs are bit-reproducible.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor full(std::vector<std::size_t> shape, double value);
  static Tensor vec(std::vector<double> values);
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor identity(std::size_t n);
  static Tensor randn(std::vector<std::size_t> shape, Rng& rng, double stddev = 1.0);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t rows() const;
  std::size_t cols() const;
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c);
  double at(std::size_t r, std::size_t c) const;

  void fill(double value);
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;

  // First `n` rows of a rank-2 tensor, copied.
  Tensor top_rows(std::size_t n) const;
  // Copy of row r as a [cols] vector.
  Tensor row(std::size_t r) const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// Throws NumericError naming `what` if any entry is NaN/Inf.
void check_finite(const Tensor& t, const char* what);

// Matrix product a[m x k] * b[k x n]; contraction runs k ascending.
Tensor matmul(const Tensor& a, const Tensor& b);
// a^T * b with a[k x m], b[k x n] -> [m x n].
Tensor matmul_tn(const Tensor& a, const Tensor& b);
// a * b^T with a[m x k], b[n x k] -> [m x n].
Tensor matmul_nt(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
// y += alpha * x
void axpy(double alpha, const Tensor& x, Tensor& y);
// m[r, :] += row for every r.
Tensor add_row_broadcast(const Tensor& m, const Tensor& row);

Tensor sigmoid(const Tensor& x);
Tensor tanh_t(const Tensor& x);
double sigmoid_scalar(double x);

// Concatenation along the last axis (rank-1 or rank-2 with equal rows).
Tensor concat(const Tensor& a, const Tensor& b);

// Rank-1: softmax over the vector. Rank-2: row-wise softmax.
// Max-subtracted for stability; each row sums to 1 within 1e-12.
Tensor softmax(const Tensor& logits);

Tensor transpose(const Tensor& m);
double sum(const Tensor& t);
// Column sums of a rank-2 tensor -> [cols].
Tensor col_sum(const Tensor& m);

// Columns [c0, c1) of a rank-2 tensor, copied.
Tensor slice_cols(const Tensor& m, std::size_t c0, std::size_t c1);
// Writes src into dst columns starting at c0.
void paste_cols(Tensor& dst, std::size_t c0, const Tensor& src);

}  // namespace vtag
