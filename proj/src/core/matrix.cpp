#include "core/matrix.hpp"

#include <string>

namespace dyad {

namespace {
std::string shape_str(size_t r, size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}
}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols == b.rows, Err::ShapeMismatch,
          "matmul " + shape_str(a.rows, a.cols) + " * " + shape_str(b.rows, b.cols));
  Matrix out(a.rows, b.cols);
  for (size_t i = 0; i < a.rows; ++i) {
    const double* arow = &a.data[i * a.cols];
    double* orow = &out.data[i * out.cols];
    for (size_t k = 0; k < a.cols; ++k) {
      double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = &b.data[k * b.cols];
      for (size_t j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  require(a.cols == b.cols, Err::ShapeMismatch,
          "matmul_nt " + shape_str(a.rows, a.cols) + " * " + shape_str(b.rows, b.cols) + "^T");
  Matrix out(a.rows, b.rows);
  for (size_t i = 0; i < a.rows; ++i) {
    const double* arow = &a.data[i * a.cols];
    for (size_t j = 0; j < b.rows; ++j) {
      const double* brow = &b.data[j * b.cols];
      double acc = 0.0;
      for (size_t k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require(a.rows == b.rows, Err::ShapeMismatch,
          "matmul_tn " + shape_str(a.rows, a.cols) + "^T * " + shape_str(b.rows, b.cols));
  Matrix out(a.cols, b.cols);
  for (size_t k = 0; k < a.rows; ++k) {
    const double* arow = &a.data[k * a.cols];
    const double* brow = &b.data[k * b.cols];
    for (size_t i = 0; i < a.cols; ++i) {
      double aki = arow[i];
      if (aki == 0.0) continue;
      double* orow = &out.data[i * out.cols];
      for (size_t j = 0; j < b.cols; ++j) orow[j] += aki * brow[j];
    }
  }
  return out;
}

void add_row_inplace(Matrix& m, const Vector& row) {
  require(m.cols == row.size(), Err::ShapeMismatch, "add_row_inplace");
  for (size_t i = 0; i < m.rows; ++i)
    for (size_t j = 0; j < m.cols; ++j) m(i, j) += row[j];
}

Vector col_sums(const Matrix& m) {
  Vector out(m.cols, 0.0);
  for (size_t i = 0; i < m.rows; ++i)
    for (size_t j = 0; j < m.cols; ++j) out[j] += m(i, j);
  return out;
}

Vector matvec(const Matrix& w, const Vector& x) {
  require(w.cols == x.size(), Err::ShapeMismatch,
          "matvec " + shape_str(w.rows, w.cols) + " * vec(" + std::to_string(x.size()) + ")");
  Vector out(w.rows, 0.0);
  for (size_t i = 0; i < w.rows; ++i) {
    const double* wrow = &w.data[i * w.cols];
    double acc = 0.0;
    for (size_t j = 0; j < w.cols; ++j) acc += wrow[j] * x[j];
    out[i] = acc;
  }
  return out;
}

Vector matvec_t(const Matrix& w, const Vector& x) {
  require(w.rows == x.size(), Err::ShapeMismatch,
          "matvec_t " + shape_str(w.rows, w.cols) + "^T * vec(" + std::to_string(x.size()) + ")");
  Vector out(w.cols, 0.0);
  for (size_t i = 0; i < w.rows; ++i) {
    const double* wrow = &w.data[i * w.cols];
    double xi = x[i];
    if (xi == 0.0) continue;
    for (size_t j = 0; j < w.cols; ++j) out[j] += wrow[j] * xi;
  }
  return out;
}

void add_outer_inplace(Matrix& w, const Vector& u, const Vector& v) {
  require(w.rows == u.size() && w.cols == v.size(), Err::ShapeMismatch, "add_outer_inplace");
  for (size_t i = 0; i < w.rows; ++i) {
    double ui = u[i];
    if (ui == 0.0) continue;
    double* wrow = &w.data[i * w.cols];
    for (size_t j = 0; j < w.cols; ++j) wrow[j] += ui * v[j];
  }
  return;
}

void add_inplace(Vector& a, const Vector& b) {
  require(a.size() == b.size(), Err::ShapeMismatch, "add_inplace");
  for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

}  // namespace dyad
