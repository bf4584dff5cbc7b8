#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "topicsum/error.hpp"

namespace topicsum {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  std::vector<double> row(std::size_t r) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
  }

  std::vector<double> col(std::size_t c) const {
    std::vector<double> v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct SymmetricEigen {
  std::vector<double> values;  // non-increasing
  Matrix vectors;              // column j is the eigenvector of values[j]
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Eigenpairs are
/// sorted by decreasing eigenvalue (ties by original column) and each
/// eigenvector's first entry with |v| > 1e-12 is made positive.
inline SymmetricEigen symmetric_eigen(const Matrix& input, double tol = 1e-14,
                                      int max_sweeps = 100) {
  require(input.rows() == input.cols(), "symmetric_eigen: matrix must be square");
  const std::size_t n = input.rows();
  Matrix a = input;
  Matrix v = Matrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };
  double scale = 0.0;
  for (double x : a.data()) scale = std::max(scale, std::abs(x));

  for (int sweep = 0; sweep < max_sweeps && off_norm() > tol * std::max(scale, 1e-300); ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  SymmetricEigen out;
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values.push_back(a(order[j], order[j]));
    double sign = 1.0;
    for (std::size_t k = 0; k < n; ++k)
      if (std::abs(v(k, order[j])) > 1e-12) {
        sign = v(k, order[j]) < 0 ? -1.0 : 1.0;
        break;
      }
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = sign * v(k, order[j]);
  }
  return out;
}

struct SvdResult {
  Matrix u;                // rows x k, orthonormal columns
  std::vector<double> s;   // length k, non-increasing, >= 0
  Matrix v;                // cols x k, orthonormal columns
};

/// Thin SVD by one-sided (Hestenes) Jacobi rotations on the columns of `a`,
/// truncated to the leading `k` triplets. Rotation continues until every
/// column pair is orthogonal to relative tolerance `tol`. Deterministic: the
/// sweep order is fixed and no randomness is involved. Each V column's
/// largest-magnitude entry (first on ties) is made positive.
inline SvdResult jacobi_svd(const Matrix& a, std::size_t k, double tol = 1e-12,
                            int max_sweeps = 80) {
  const std::size_t m = a.rows(), n = a.cols();
  const std::size_t bound = std::min(m, n);
  if (k < 1 || k > bound)
    fail(ErrorKind::invalid_argument, "truncated_svd: k = " + std::to_string(k) +
                                          " must be in [1, min(rows, cols) = " +
                                          std::to_string(bound) + "]");
  Matrix w = a;  // columns are rotated in place
  Matrix v = Matrix::identity(n);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
          alpha += w(r, p) * w(r, p);
          beta += w(r, q) * w(r, q);
          gamma += w(r, p) * w(r, q);
        }
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < m; ++r) {
          const double wp = w(r, p), wq = w(r, q);
          w(r, p) = c * wp - s * wq;
          w(r, q) = s * wp + c * wq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vp = v(r, p), vq = v(r, q);
          v(r, p) = c * vp - s * vq;
          v(r, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double ss = 0.0;
    for (std::size_t r = 0; r < m; ++r) ss += w(r, j) * w(r, j);
    sigma[j] = std::sqrt(ss);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

  SvdResult out;
  out.u = Matrix(m, k);
  out.v = Matrix(n, k);
  out.s.resize(k);
  const double smax = sigma[order[0]];
  const double zero_cut = smax * 1e-13 * static_cast<double>(std::max(m, n));

  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t src = order[j];
    std::size_t arg = 0;
    for (std::size_t r = 1; r < n; ++r)
      if (std::abs(v(r, src)) > std::abs(v(arg, src)) + 1e-15) arg = r;
    const double sign = v(arg, src) < 0 ? -1.0 : 1.0;
    out.s[j] = sigma[src];
    for (std::size_t r = 0; r < n; ++r) out.v(r, j) = sign * v(r, src);
    if (sigma[src] > zero_cut) {
      for (std::size_t r = 0; r < m; ++r) out.u(r, j) = sign * w(r, src) / sigma[src];
    } else {
      out.s[j] = 0.0;
    }
  }

  // Columns of U belonging to zero singular values are completed to an
  // orthonormal set by Gram-Schmidt against the standard basis.
  for (std::size_t j = 0; j < k; ++j) {
    if (out.s[j] > 0.0) continue;
    for (std::size_t e = 0; e < m; ++e) {
      std::vector<double> cand(m, 0.0);
      cand[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t o = 0; o < k; ++o) {
          if (o == j) continue;
          if (out.s[o] == 0.0 && o > j) continue;
          double dot = 0.0;
          for (std::size_t r = 0; r < m; ++r) dot += cand[r] * out.u(r, o);
          for (std::size_t r = 0; r < m; ++r) cand[r] -= dot * out.u(r, o);
        }
      }
      double norm = 0.0;
      for (double x : cand) norm += x * x;
      norm = std::sqrt(norm);
      if (norm > 1e-6) {
        for (std::size_t r = 0; r < m; ++r) out.u(r, j) = cand[r] / norm;
        break;
      }
    }
  }
  return out;
}

}  // namespace topicsum
