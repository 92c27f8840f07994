#include "vtag/tensor.hpp"

#include <cmath>
#include <string>

#include "vtag/errors.hpp"
#include "vtag/rng.hpp"

namespace vtag {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) {
    if (d == 0) throw DimensionError("tensor dimensions must be positive");
    n *= d;
  }
  return n;
}

void require_rank2(const Tensor& t, const char* what) {
  if (t.rank() != 2)
    throw DimensionError(std::string(what) + ": rank-2 tensor required");
}

std::string shape_str(const Tensor& t) {
  std::string s = "[";
  for (std::size_t i = 0; i < t.rank(); ++i) {
    if (i) s += "x";
    s += std::to_string(t.shape()[i]);
  }
  return s + "]";
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_product(shape_) != data_.size())
    throw DimensionError("tensor data length does not match shape");
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  return Tensor(std::move(shape));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
  Tensor t(std::move(shape));
  t.fill(value);
  return t;
}

Tensor Tensor::vec(std::vector<double> values) {
  std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r ? rows.begin()->size() : 0;
  Tensor t({r, c});
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged matrix literal");
    for (double v : row) t.data_[i++] = v;
  }
  return t;
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

Tensor Tensor::randn(std::vector<std::size_t> shape, Rng& rng, double stddev) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t.data_[i] = stddev * rng.normal();
  return t;
}

std::size_t Tensor::rows() const {
  require_rank2(*this, "rows");
  return shape_[0];
}

std::size_t Tensor::cols() const {
  require_rank2(*this, "cols");
  return shape_[1];
}

double& Tensor::at(std::size_t r, std::size_t c) {
  return data_[r * shape_[1] + c];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  return data_[r * shape_[1] + c];
}

void Tensor::fill(double value) {
  for (double& v : data_) v = value;
}

bool Tensor::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Tensor Tensor::top_rows(std::size_t n) const {
  require_rank2(*this, "top_rows");
  if (n > shape_[0]) throw DimensionError("top_rows: not enough rows");
  Tensor out({n, shape_[1]});
  for (std::size_t i = 0; i < n * shape_[1]; ++i) out.data_[i] = data_[i];
  return out;
}

Tensor Tensor::row(std::size_t r) const {
  require_rank2(*this, "row");
  Tensor out({shape_[1]});
  for (std::size_t c = 0; c < shape_[1]; ++c) out[c] = at(r, c);
  return out;
}

void check_finite(const Tensor& t, const char* what) {
  if (!t.all_finite())
    throw NumericError(std::string("non-finite values in ") + what);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  if (a.cols() != b.rows())
    throw DimensionError("matmul: inner dimensions disagree: " + shape_str(a) +
                         " * " + shape_str(b));
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor c({m, n});
  // i-k-j order: for each output entry the k contributions are added in
  // ascending order, and the inner loop vectorizes.
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c.data() + i * n;
    const double* arow = a.data() + i * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double aik = arow[kk];
      const double* brow = b.data() + kk * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul_tn");
  require_rank2(b, "matmul_tn");
  if (a.rows() != b.rows())
    throw DimensionError("matmul_tn: leading dimensions disagree");
  const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
  Tensor c({m, n});
  for (std::size_t kk = 0; kk < k; ++kk) {
    const double* arow = a.data() + kk * m;
    const double* brow = b.data() + kk * n;
    for (std::size_t i = 0; i < m; ++i) {
      double* crow = c.data() + i * n;
      const double aki = arow[i];
      for (std::size_t j = 0; j < n; ++j) crow[j] += aki * brow[j];
    }
  }
  return c;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul_nt");
  require_rank2(b, "matmul_nt");
  if (a.cols() != b.cols())
    throw DimensionError("matmul_nt: trailing dimensions disagree");
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  Tensor c({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a.data() + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b.data() + j * k;
      double acc = 0.0;
      for (std::size_t kk = 0; kk < k; ++kk) acc += arow[kk] * brow[kk];
      c.at(i, j) = acc;
    }
  }
  return c;
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b))
    throw DimensionError(std::string(what) + ": shapes disagree: " +
                         shape_str(a) + " vs " + shape_str(b));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

Tensor scale(const Tensor& a, double s) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s;
  return out;
}

void axpy(double alpha, const Tensor& x, Tensor& y) {
  require_same_shape(x, y, "axpy");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

Tensor add_row_broadcast(const Tensor& m, const Tensor& row) {
  require_rank2(m, "add_row_broadcast");
  if (row.rank() != 1 || row.size() != m.cols())
    throw DimensionError("add_row_broadcast: row width disagrees");
  Tensor out = m;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out.at(r, c) += row[c];
  return out;
}

double sigmoid_scalar(double x) {
  // Branch form avoids overflow of exp for large |x|.
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor sigmoid(const Tensor& x) {
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = sigmoid_scalar(out[i]);
  return out;
}

Tensor tanh_t(const Tensor& x) {
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  return out;
}

Tensor concat(const Tensor& a, const Tensor& b) {
  if (a.rank() == 1 && b.rank() == 1) {
    Tensor out({a.size() + b.size()});
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[a.size() + i] = b[i];
    return out;
  }
  if (a.rank() == 2 && b.rank() == 2) {
    if (a.rows() != b.rows())
      throw DimensionError("concat: row counts disagree");
    Tensor out({a.rows(), a.cols() + b.cols()});
    for (std::size_t r = 0; r < a.rows(); ++r) {
      for (std::size_t c = 0; c < a.cols(); ++c) out.at(r, c) = a.at(r, c);
      for (std::size_t c = 0; c < b.cols(); ++c)
        out.at(r, a.cols() + c) = b.at(r, c);
    }
    return out;
  }
  throw DimensionError("concat: rank-1 or rank-2 operands of equal rank required");
}

namespace {

void softmax_row(const double* in, double* out, std::size_t n) {
  double mx = in[0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, in[i]);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(in[i] - mx);
    total += out[i];
  }
  for (std::size_t i = 0; i < n; ++i) out[i] /= total;
}

}  // namespace

Tensor softmax(const Tensor& logits) {
  if (logits.rank() == 1) {
    if (logits.size() == 0) throw DimensionError("softmax: empty input");
    Tensor out(logits.shape());
    softmax_row(logits.data(), out.data(), logits.size());
    return out;
  }
  if (logits.rank() == 2) {
    Tensor out(logits.shape());
    for (std::size_t r = 0; r < logits.rows(); ++r)
      softmax_row(logits.data() + r * logits.cols(),
                  out.data() + r * logits.cols(), logits.cols());
    return out;
  }
  throw DimensionError("softmax: rank-1 or rank-2 input required");
}

Tensor transpose(const Tensor& m) {
  require_rank2(m, "transpose");
  Tensor out({m.cols(), m.rows()});
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out.at(c, r) = m.at(r, c);
  return out;
}

double sum(const Tensor& t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) acc += t[i];
  return acc;
}

Tensor col_sum(const Tensor& m) {
  require_rank2(m, "col_sum");
  Tensor out({m.cols()});
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += m.at(r, c);
  return out;
}

Tensor slice_cols(const Tensor& m, std::size_t c0, std::size_t c1) {
  require_rank2(m, "slice_cols");
  if (c0 > c1 || c1 > m.cols())
    throw DimensionError("slice_cols: column range out of bounds");
  Tensor out({m.rows(), c1 - c0});
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = c0; c < c1; ++c) out.at(r, c - c0) = m.at(r, c);
  return out;
}

void paste_cols(Tensor& dst, std::size_t c0, const Tensor& src) {
  require_rank2(dst, "paste_cols");
  require_rank2(src, "paste_cols");
  if (src.rows() != dst.rows() || c0 + src.cols() > dst.cols())
    throw DimensionError("paste_cols: block does not fit");
  for (std::size_t r = 0; r < src.rows(); ++r)
    for (std::size_t c = 0; c < src.cols(); ++c)
      dst.at(r, c0 + c) = src.at(r, c);
}

}  // namespace vtag
