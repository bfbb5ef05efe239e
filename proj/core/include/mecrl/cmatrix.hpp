#pragma once

// Small dense complex matrices for zero-forcing detection. Matrices here are
// at most 8x8, so everything is row-major and unblocked.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace mecrl {

using CScalar = std::complex<double>;

class CMat {
 public:
  CMat(std::size_t rows, std::size_t cols);
  CMat(std::size_t rows, std::size_t cols, std::vector<CScalar> data);
  // Row-by-row literal, e.g. CMat{{1, 0}, {0, 1}}.
  CMat(std::initializer_list<std::initializer_list<CScalar>> rows);

  static CMat identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  CScalar& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const CScalar& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<CScalar>& data() const { return data_; }

  bool is_finite() const;
  bool operator==(const CMat& other) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<CScalar> data_;
};

CMat hermitian(const CMat& a);

// Throws DimensionError when a.cols() != b.rows().
CMat matmul(const CMat& a, const CMat& b);

// Inverse of a Hermitian positive-definite matrix via Cholesky.
// Throws NotHermitianError when |a_ij - conj(a_ji)| exceeds
// kHermitianTol * max(1, max|a|), and SingularMatrixError when a Cholesky
// pivot drops below kSingularRelTol * max|a_ii|.
CMat invert_hpd(const CMat& a);

// Z = (H^H H)^{-1} H^H for a tall full-column-rank channel matrix.
CMat pseudo_inverse(const CMat& h);

// Squared Euclidean norm of row m.
double row_norm_sq(const CMat& z, std::size_t m);

// Largest elementwise modulus of (a - b); shapes must agree.
double max_abs_diff(const CMat& a, const CMat& b);

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kSingularRelTol = 1e-12;

}  // namespace mecrl
