#pragma once

// Dense complex linear algebra used throughout the toolkit. Matrices are
// small (superoperators on M_d with d <= 16), so everything is a plain
// row-major value type.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ucpext {

using cplx = std::complex<double>;

class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols);
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  // Row-major literal, e.g. CMatrix{{0, 1}, {1, 0}}.
  CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static CMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const double> diag);
  // Matrix unit E_ij of size n.
  static CMatrix unit(std::size_t n, std::size_t i, std::size_t j);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  CMatrix adjoint() const;
  CMatrix transpose() const;
  CMatrix conj() const;
  cplx trace() const;
  double frobenius_norm() const;
  bool all_finite() const;

  // Sub-block copy and assignment.
  CMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const CMatrix& b);

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(cplx s);

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix a);
CMatrix operator*(CMatrix a, cplx s);

CMatrix kron(const CMatrix& a, const CMatrix& b);
// Hilbert-Schmidt inner product tr(a^dagger b).
cplx hs_inner(const CMatrix& a, const CMatrix& b);
double frobenius_distance(const CMatrix& a, const CMatrix& b);
// max_ij |a_ij - a_ji^*| relative scale used by hermiticity checks.
double hermiticity_defect(const CMatrix& a);
bool is_hermitian(const CMatrix& a, double tol);
CMatrix hermitian_part(const CMatrix& a);
CMatrix commutator(const CMatrix& a, const CMatrix& b);
CMatrix anticommutator(const CMatrix& a, const CMatrix& b);

// Square matrix with Hermitian symmetry, enforced at construction.
class HermMatrix {
 public:
  HermMatrix() = default;
  // Throws InputError if `m` deviates from Hermitian symmetry by more than
  // tol * max(1, |m|_F). The stored matrix is the exact Hermitian part.
  explicit HermMatrix(const CMatrix& m, double tol = 1e-12);

  std::size_t dim() const noexcept { return m_.rows(); }
  const CMatrix& matrix() const noexcept { return m_; }
  operator const CMatrix&() const noexcept { return m_; }

 private:
  CMatrix m_;
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns are eigenvectors
};

// Cyclic Jacobi eigensolver for Hermitian matrices.
EigenDecomposition herm_eig(const HermMatrix& h);
std::vector<double> herm_eigenvalues(const HermMatrix& h);
double min_eigenvalue(const HermMatrix& h);
double max_eigenvalue(const HermMatrix& h);

// exp(scale * m) by scaling and squaring with a degree-13 Pade approximant.
CMatrix expm(const CMatrix& m, double scale = 1.0);
CMatrix expm(const CMatrix& m, cplx scale);

// Frobenius-nearest positive semidefinite matrix.
HermMatrix psd_project(const HermMatrix& h);

// Largest singular value.
double spectral_norm(const CMatrix& m);
double one_norm(const CMatrix& m);

struct LuFactorization {
  CMatrix lu;
  std::vector<std::size_t> perm;
  double min_pivot = 0.0;
  double max_pivot = 0.0;
};

// LU with partial pivoting. Throws NumericalError on exactly or numerically
// singular input.
LuFactorization lu_factor(const CMatrix& a);
CMatrix lu_solve(const LuFactorization& f, const CMatrix& b);
CMatrix solve(const CMatrix& a, const CMatrix& b);
CMatrix inverse(const CMatrix& a);
// 1-norm condition number computed from an explicit inverse.
double condition_number(const CMatrix& a);

}  // namespace ucpext
