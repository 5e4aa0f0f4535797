#pragma once

#include <cassert>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dsec/field.hpp"

namespace dsec {

// Dense row-major matrix with exact entries.
template <class K>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int r, int c) : r_(r), c_(c), a_(std::size_t(r) * std::size_t(c), K(0)) {
    if (r < 0 || c < 0) throw std::invalid_argument("negative matrix shape");
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = K(1);
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  K& operator()(int i, int j) { return a_[std::size_t(i) * c_ + j]; }
  const K& operator()(int i, int j) const { return a_[std::size_t(i) * c_ + j]; }

  bool is_zero() const {
    for (const auto& x : a_)
      if (x != K(0)) return false;
    return true;
  }

  Matrix operator*(const Matrix& b) const {
    if (c_ != b.r_) throw std::invalid_argument("matrix product shape mismatch");
    Matrix m(r_, b.c_);
    for (int i = 0; i < r_; ++i)
      for (int k = 0; k < c_; ++k) {
        const K& x = (*this)(i, k);
        if (x == K(0)) continue;
        for (int j = 0; j < b.c_; ++j) {
          const K& y = b(k, j);
          if (y != K(0)) m(i, j) += x * y;
        }
      }
    return m;
  }
  Matrix operator+(const Matrix& b) const {
    check_same(b);
    Matrix m = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] += b.a_[i];
    return m;
  }
  Matrix operator-(const Matrix& b) const {
    check_same(b);
    Matrix m = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] -= b.a_[i];
    return m;
  }
  Matrix operator-() const {
    Matrix m = *this;
    for (auto& x : m.a_) x = -x;
    return m;
  }
  Matrix scaled(const K& s) const {
    Matrix m = *this;
    for (auto& x : m.a_) x *= s;
    return m;
  }
  bool operator==(const Matrix& b) const { return r_ == b.r_ && c_ == b.c_ && a_ == b.a_; }
  bool operator!=(const Matrix& b) const { return !(*this == b); }

  Matrix transpose() const {
    Matrix m(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  void add_block(int r0, int c0, const Matrix& b, const K& s = K(1)) {
    if (r0 + b.r_ > r_ || c0 + b.c_ > c_) throw std::out_of_range("block out of range");
    for (int i = 0; i < b.r_; ++i)
      for (int j = 0; j < b.c_; ++j) {
        const K& y = b(i, j);
        if (y != K(0)) (*this)(r0 + i, c0 + j) += s * y;
      }
  }
  Matrix block(int r0, int c0, int nr, int nc) const {
    Matrix m(nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
    return m;
  }

  std::string shape() const { return std::to_string(r_) + "x" + std::to_string(c_); }

 private:
  void check_same(const Matrix& b) const {
    if (r_ != b.r_ || c_ != b.c_) throw std::invalid_argument("matrix shape mismatch " + shape() + " vs " + b.shape());
  }
  int r_ = 0, c_ = 0;
  std::vector<K> a_;
};

// Reduced row echelon form in place; returns pivot columns.
template <class K>
std::vector<int> row_reduce(Matrix<K>& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int p = -1;
    for (int i = row; i < m.rows(); ++i)
      if (m(i, col) != K(0)) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != row)
      for (int j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    K inv = K(1) / m(row, col);
    for (int j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == K(0)) continue;
      K f = m(i, col);
      for (int j = col; j < m.cols(); ++j)
        if (m(row, j) != K(0)) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class K>
int rank(Matrix<K> m) {
  // eliminate along the shorter side
  if (m.rows() > m.cols()) m = m.transpose();
  int r = 0;
  for (int col = 0; col < m.cols() && r < m.rows(); ++col) {
    int p = -1;
    for (int i = r; i < m.rows(); ++i)
      if (m(i, col) != K(0)) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != r)
      for (int j = col; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    K inv = K(1) / m(r, col);
    for (int i = r + 1; i < m.rows(); ++i) {
      if (m(i, col) == K(0)) continue;
      K f = m(i, col) * inv;
      for (int j = col; j < m.cols(); ++j)
        if (m(r, j) != K(0)) m(i, j) -= f * m(r, j);
    }
    ++r;
  }
  return r;
}

// Columns spanning the null space.
template <class K>
Matrix<K> kernel_basis(const Matrix<K>& a) {
  Matrix<K> m = a;
  auto piv = row_reduce(m);
  std::vector<bool> is_piv(a.cols(), false);
  for (int c : piv) is_piv[c] = true;
  std::vector<int> free;
  for (int c = 0; c < a.cols(); ++c)
    if (!is_piv[c]) free.push_back(c);
  Matrix<K> z(a.cols(), int(free.size()));
  for (std::size_t k = 0; k < free.size(); ++k) {
    z(free[k], int(k)) = K(1);
    for (std::size_t r = 0; r < piv.size(); ++r) z(piv[r], int(k)) = -m(int(r), free[k]);
  }
  return z;
}

template <class K>
Matrix<K> hstack(const Matrix<K>& a, const Matrix<K>& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("hstack row mismatch");
  Matrix<K> m(a.rows(), a.cols() + b.cols());
  m.add_block(0, 0, a);
  m.add_block(0, a.cols(), b);
  return m;
}

}  // namespace dsec
