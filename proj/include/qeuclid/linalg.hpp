#pragma once
// Dense exact matrices over FieldElem and Gaussian elimination.
// Multiplication skips zero entries; matrices here are small but sparse.
#include <cassert>
#include <stdexcept>
#include <vector>

#include "field.hpp"

namespace qeuclid {

struct Mat {
  int rows = 0, cols = 0;
  std::vector<FieldElem> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a((size_t)r * c) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int k = 0; k < n; ++k) m.at(k, k) = FieldElem(1);
    return m;
  }

  FieldElem& at(int r, int c) {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return a[(size_t)r * cols + c];
  }
  const FieldElem& at(int r, int c) const {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return a[(size_t)r * cols + c];
  }

  bool is_zero() const {
    for (const auto& x : a)
      if (!x.is_zero()) return false;
    return true;
  }

  Mat transpose() const {
    Mat t(cols, rows);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) t.at(c, r) = at(r, c);
    return t;
  }

  friend Mat operator+(const Mat& x, const Mat& y) {
    assert(x.rows == y.rows && x.cols == y.cols);
    Mat m(x.rows, x.cols);
    for (size_t k = 0; k < m.a.size(); ++k) m.a[k] = x.a[k] + y.a[k];
    return m;
  }
  friend Mat operator-(const Mat& x, const Mat& y) {
    assert(x.rows == y.rows && x.cols == y.cols);
    Mat m(x.rows, x.cols);
    for (size_t k = 0; k < m.a.size(); ++k) m.a[k] = x.a[k] - y.a[k];
    return m;
  }
  friend Mat operator*(const FieldElem& s, const Mat& x) {
    Mat m(x.rows, x.cols);
    for (size_t k = 0; k < m.a.size(); ++k) m.a[k] = s * x.a[k];
    return m;
  }
  friend Mat operator*(const Mat& x, const Mat& y) {
    assert(x.cols == y.rows);
    Mat m(x.rows, y.cols);
    for (int r = 0; r < x.rows; ++r)
      for (int k = 0; k < x.cols; ++k) {
        const FieldElem& f = x.at(r, k);
        if (f.is_zero()) continue;
        for (int c = 0; c < y.cols; ++c) {
          const FieldElem& g = y.at(k, c);
          if (g.is_zero()) continue;
          m.at(r, c) += f * g;
        }
      }
    return m;
  }
  friend bool operator==(const Mat& x, const Mat& y) {
    return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
  }
  friend bool operator!=(const Mat& x, const Mat& y) { return !(x == y); }

  static Mat kron(const Mat& x, const Mat& y) {
    Mat m(x.rows * y.rows, x.cols * y.cols);
    for (int rx = 0; rx < x.rows; ++rx)
      for (int cx = 0; cx < x.cols; ++cx) {
        const FieldElem& f = x.at(rx, cx);
        if (f.is_zero()) continue;
        for (int ry = 0; ry < y.rows; ++ry)
          for (int cy = 0; cy < y.cols; ++cy) {
            const FieldElem& g = y.at(ry, cy);
            if (g.is_zero()) continue;
            m.at(rx * y.rows + ry, cx * y.cols + cy) = f * g;
          }
      }
    return m;
  }
};

// Reduced row echelon form in place; returns the pivot columns.
// Pivots favour structurally simple entries to limit coefficient growth.
inline std::vector<int> rref(Mat& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols && row < m.rows; ++col) {
    int best = -1;
    long best_size = 0;
    for (int r = row; r < m.rows; ++r) {
      const FieldElem& x = m.at(r, col);
      if (x.is_zero()) continue;
      long size = x.num.deg() + x.den.deg();
      if (best < 0 || size < best_size) {
        best = r;
        best_size = size;
      }
    }
    if (best < 0) continue;
    if (best != row)
      for (int c = 0; c < m.cols; ++c) std::swap(m.at(row, c), m.at(best, c));
    FieldElem inv = m.at(row, col).inv();
    for (int c = col; c < m.cols; ++c) m.at(row, c) = inv * m.at(row, c);
    for (int r = 0; r < m.rows; ++r) {
      if (r == row) continue;
      FieldElem f = m.at(r, col);
      if (f.is_zero()) continue;
      for (int c = col; c < m.cols; ++c) m.at(r, c) -= f * m.at(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

inline int rank(Mat m) { return (int)rref(m).size(); }

// Exact solve A x = b (multiple right-hand sides as columns of b).
// Free variables are set to zero; returns false when inconsistent.
inline bool solve(const Mat& A, const Mat& b, Mat& x) {
  assert(A.rows == b.rows);
  Mat aug(A.rows, A.cols + b.cols);
  for (int r = 0; r < A.rows; ++r) {
    for (int c = 0; c < A.cols; ++c) aug.at(r, c) = A.at(r, c);
    for (int c = 0; c < b.cols; ++c) aug.at(r, A.cols + c) = b.at(r, c);
  }
  std::vector<int> pivots = rref(aug);
  for (int c : pivots)
    if (c >= A.cols) return false;
  x = Mat(A.cols, b.cols);
  for (size_t k = 0; k < pivots.size(); ++k)
    for (int c = 0; c < b.cols; ++c) x.at(pivots[k], c) = aug.at((int)k, A.cols + c);
  return true;
}

// Basis of the right nullspace, one solution per column.
inline Mat nullspace(const Mat& A) {
  Mat m = A;
  std::vector<int> pivots = rref(m);
  std::vector<bool> is_pivot(A.cols, false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<int> free_cols;
  for (int c = 0; c < A.cols; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  Mat basis(A.cols, (int)free_cols.size());
  for (size_t j = 0; j < free_cols.size(); ++j) {
    int fc = free_cols[j];
    basis.at(fc, (int)j) = FieldElem(1);
    for (size_t k = 0; k < pivots.size(); ++k) basis.at(pivots[k], (int)j) = -m.at((int)k, fc);
  }
  return basis;
}

}  // namespace qeuclid
