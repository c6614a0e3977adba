#pragma once

#include <cstddef>
#include <vector>

#include "core/error.hpp"

namespace dyad {

// Row-major dense matrix of 64-bit floats.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(size_t r, size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(size_t r, size_t c) { return data[r * cols + c]; }
  double operator()(size_t r, size_t c) const { return data[r * cols + c]; }

  size_t size() const { return data.size(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

using Vector = std::vector<double>;

// a(m,k) * b(k,n) -> (m,n)
Matrix matmul(const Matrix& a, const Matrix& b);

// a(m,k) * b(n,k)^T -> (m,n)
Matrix matmul_nt(const Matrix& a, const Matrix& b);

// a(k,m)^T * b(k,n) -> (m,n)
Matrix matmul_tn(const Matrix& a, const Matrix& b);

// m(r,c) += row(c) broadcast over rows
void add_row_inplace(Matrix& m, const Vector& row);

Vector col_sums(const Matrix& m);

// w(r,c) * x(c) -> (r)
Vector matvec(const Matrix& w, const Vector& x);

// w(r,c)^T * x(r) -> (c)
Vector matvec_t(const Matrix& w, const Vector& x);

// w += u * v^T, u(r), v(c)
void add_outer_inplace(Matrix& w, const Vector& u, const Vector& v);

void add_inplace(Vector& a, const Vector& b);

}  // namespace dyad
