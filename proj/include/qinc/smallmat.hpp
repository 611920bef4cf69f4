#pragma once

// Fixed-capacity dense matrices for the 2x2 and 3x3 problems that appear in
// single-qubit estimation: operators on C^2 and information matrices for two
// or three parameters.

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <type_traits>
#include <vector>

namespace qinc {

using cplx = std::complex<double>;

template <typename T>
class SmallMat {
 public:
  static constexpr int kMaxDim = 3;

  explicit SmallMat(int dim = 2) : dim_(dim) { assert(dim >= 1 && dim <= kMaxDim); }

  /// Row-major nested initializer, e.g. `RMat{{1, 0}, {0, 2}}`.
  SmallMat(std::initializer_list<std::initializer_list<T>> rows)
      : dim_(static_cast<int>(rows.size())) {
    assert(dim_ >= 1 && dim_ <= kMaxDim);
    int i = 0;
    for (const auto& row : rows) {
      assert(static_cast<int>(row.size()) == dim_);
      int j = 0;
      for (const auto& v : row) (*this)(i, j++) = v;
      ++i;
    }
  }

  static SmallMat identity(int dim) {
    SmallMat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = T(1);
    return m;
  }

  static SmallMat diagonal(const std::vector<T>& d) {
    SmallMat m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim(); ++i) m(i, i) = d[i];
    return m;
  }

  int dim() const noexcept { return dim_; }

  T& operator()(int i, int j) noexcept { return a_[i * kMaxDim + j]; }
  const T& operator()(int i, int j) const noexcept { return a_[i * kMaxDim + j]; }

  SmallMat transpose() const {
    SmallMat r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  SmallMat adjoint() const {
    SmallMat r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r(i, j) = conj_of((*this)(j, i));
    return r;
  }

  T trace() const {
    T s{};
    for (int i = 0; i < dim_; ++i) s += (*this)(i, i);
    return s;
  }

  /// Largest entry magnitude.
  double max_abs() const {
    double m = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) m = std::max(m, std::abs((*this)(i, j)));
    return m;
  }

  bool all_finite() const {
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        if (!finite_of((*this)(i, j))) return false;
    return true;
  }

  SmallMat& operator+=(const SmallMat& o) {
    assert(o.dim_ == dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) (*this)(i, j) += o(i, j);
    return *this;
  }
  SmallMat& operator-=(const SmallMat& o) {
    assert(o.dim_ == dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) (*this)(i, j) -= o(i, j);
    return *this;
  }
  SmallMat& operator*=(T s) {
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) (*this)(i, j) *= s;
    return *this;
  }

  friend SmallMat operator+(SmallMat a, const SmallMat& b) { return a += b; }
  friend SmallMat operator-(SmallMat a, const SmallMat& b) { return a -= b; }
  friend SmallMat operator*(SmallMat a, T s) { return a *= s; }
  friend SmallMat operator*(T s, SmallMat a) { return a *= s; }
  friend SmallMat operator-(SmallMat a) { return a *= T(-1); }

  friend SmallMat operator*(const SmallMat& a, const SmallMat& b) {
    assert(a.dim_ == b.dim_);
    SmallMat r(a.dim_);
    for (int i = 0; i < a.dim_; ++i)
      for (int k = 0; k < a.dim_; ++k) {
        const T aik = a(i, k);
        for (int j = 0; j < a.dim_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

 private:
  static T conj_of(const T& v) {
    if constexpr (std::is_same_v<T, cplx>) {
      return std::conj(v);
    } else {
      return v;
    }
  }
  static bool finite_of(const T& v) {
    if constexpr (std::is_same_v<T, cplx>) {
      return std::isfinite(v.real()) && std::isfinite(v.imag());
    } else {
      return std::isfinite(v);
    }
  }

  int dim_;
  std::array<T, kMaxDim * kMaxDim> a_{};
};

using CMat = SmallMat<cplx>;
using RMat = SmallMat<double>;

CMat to_complex(const RMat& m);
RMat real_part(const CMat& m);
RMat imag_part(const CMat& m);

/// max_ij |A_ij - B_ij|
double max_abs_diff(const CMat& a, const CMat& b);
double max_abs_diff(const RMat& a, const RMat& b);

/// Pauli matrices sigma_1..sigma_3 (index 1..3); index 0 gives the identity.
CMat pauli(int k);

/// Spectral decomposition of a Hermitian matrix. Eigenvalues are sorted in
/// descending order and column k of `vectors` is the matching eigenvector.
struct EigenSystem {
  std::vector<double> values;
  CMat vectors;
};

/// Closed form for dim 2, cyclic complex Jacobi for dim 3. Throws NotHermitian
/// when ||H - H^dag||_max exceeds 1e-10 relative to max(1, ||H||_max).
EigenSystem herm_eig(const CMat& h);

/// Sum of singular values, computed with one-sided Jacobi so that zero
/// singular values come out at the round-off level of the entries.
double trace_norm(const CMat& a);
double trace_norm(const RMat& a);

/// Singular values in descending order.
std::vector<double> singular_values(const CMat& a);

/// Symmetric square root of a symmetric positive semi-definite matrix.
/// Eigenvalues above -1e-12 (relative to the spectral radius) are clipped to
/// zero; anything more negative throws NotPsd.
RMat psd_sqrt(const RMat& w);

/// Throws SingularMatrix when |det A| <= 1e-14 * ||A||_max^dim.
CMat inverse(const CMat& a);
RMat inverse(const RMat& a);

cplx determinant(const CMat& a);
double determinant(const RMat& a);

/// All eigenvalues of a general (non-Hermitian) matrix.
std::vector<cplx> eigenvalues(const CMat& a);

/// max_k |eig_k(A)|.
double largest_abs_eig(const CMat& a);

}  // namespace qinc
