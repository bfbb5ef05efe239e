#include "mecrl/cmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mecrl/error.hpp"

namespace mecrl {

namespace {

void require_finite(const CMat& a, const char* op) {
  if (!a.is_finite()) throw DomainError(std::string(op) + ": matrix has non-finite entries");
}

}  // namespace

CMat::CMat(std::size_t rows, std::size_t cols) : CMat(rows, cols, std::vector<CScalar>(rows * cols)) {}

CMat::CMat(std::size_t rows, std::size_t cols, std::vector<CScalar> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows_ == 0 || cols_ == 0) throw DimensionError("CMat: rows and cols must be >= 1");
  if (data_.size() != rows_ * cols_) throw_dimension("CMat data length", rows_ * cols_, data_.size());
}

CMat::CMat(std::initializer_list<std::initializer_list<CScalar>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw DimensionError("CMat: rows and cols must be >= 1");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw_dimension("CMat literal row length", cols_, r.size());
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

CMat CMat::identity(std::size_t n) {
  CMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool CMat::is_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const CScalar& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

CMat hermitian(const CMat& a) {
  CMat out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

CMat matmul(const CMat& a, const CMat& b) {
  if (a.cols() != b.rows()) throw_dimension("matmul inner dimension", a.cols(), b.rows());
  CMat out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const CScalar aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

CMat invert_hpd(const CMat& a) {
  if (a.rows() != a.cols()) throw DimensionError("invert_hpd: matrix is not square");
  require_finite(a, "invert_hpd");
  const std::size_t n = a.rows();

  double max_abs = 0.0;
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    max_diag = std::max(max_diag, std::abs(a(i, i)));
    for (std::size_t j = 0; j < n; ++j) max_abs = std::max(max_abs, std::abs(a(i, j)));
  }
  const double herm_tol = kHermitianTol * std::max(1.0, max_abs);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > herm_tol)
        throw NotHermitianError("invert_hpd: matrix is not Hermitian at (" + std::to_string(i) +
                                ", " + std::to_string(j) + ")");

  // A = L L^H with real positive diagonal.
  const double pivot_floor = kSingularRelTol * max_diag;
  CMat l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > pivot_floor)) throw SingularMatrixError("invert_hpd: matrix is singular or not positive definite");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      CScalar s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }

  // W = L^{-1} by forward substitution, lower triangular.
  CMat w(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    w(c, c) = 1.0 / l(c, c).real();
    for (std::size_t i = c + 1; i < n; ++i) {
      CScalar s = 0.0;
      for (std::size_t k = c; k < i; ++k) s -= l(i, k) * w(k, c);
      w(i, c) = s / l(i, i).real();
    }
  }

  // A^{-1} = W^H W; fill the upper triangle and mirror it.
  CMat inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      CScalar s = 0.0;
      for (std::size_t k = j; k < n; ++k) s += std::conj(w(k, i)) * w(k, j);
      inv(i, j) = s;
      inv(j, i) = std::conj(s);
    }
  for (std::size_t i = 0; i < n; ++i) inv(i, i) = inv(i, i).real();
  return inv;
}

CMat pseudo_inverse(const CMat& h) {
  if (h.rows() < h.cols())
    throw DimensionError("pseudo_inverse: need rows >= cols, got " + std::to_string(h.rows()) + "x" +
                         std::to_string(h.cols()));
  require_finite(h, "pseudo_inverse");
  const CMat hh = hermitian(h);
  return matmul(invert_hpd(matmul(hh, h)), hh);
}

double row_norm_sq(const CMat& z, std::size_t m) {
  if (m >= z.rows())
    throw IndexError("row_norm_sq: row " + std::to_string(m) + " out of range for " +
                     std::to_string(z.rows()) + " rows");
  double s = 0.0;
  for (std::size_t j = 0; j < z.cols(); ++j) s += std::norm(z(m, j));
  return s;
}

double max_abs_diff(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace mecrl
