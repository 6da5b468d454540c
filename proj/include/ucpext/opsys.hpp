#pragma once

// Concrete matricial systems V inside M_d: a unital self-adjoint subspace
// given by a Hermitian basis whose first element is the identity. Positivity
// at level k is positivity of the ambient kd x kd matrix.

#include <cstddef>
#include <vector>

#include "ucpext/densela.hpp"
#include "ucpext/errors.hpp"

namespace ucpext {

class MatricialSystem {
 public:
  // Validates the basis: basis[0] = I_d, every element Hermitian, smallest
  // Gram eigenvalue above 1e-10. Throws InputError otherwise.
  explicit MatricialSystem(std::vector<CMatrix> basis);

  std::size_t ambient_dim() const noexcept { return d_; }
  std::size_t dim() const noexcept { return basis_.size(); }
  // The user-supplied basis, kept for reporting and for target images.
  const std::vector<CMatrix>& basis() const noexcept { return basis_; }
  // Hilbert-Schmidt orthonormalized basis (modified Gram-Schmidt).
  const std::vector<CMatrix>& orthonormal_basis() const noexcept { return onb_; }

  // Coefficients c with m = sum_k c_k basis[k], for m in span (least squares
  // otherwise).
  std::vector<cplx> coordinates(const CMatrix& m) const;
  std::vector<cplx> orthonormal_coordinates(const CMatrix& m) const;
  CMatrix combine(const std::vector<cplx>& coords) const;

 private:
  std::size_t d_ = 0;
  std::vector<CMatrix> basis_;
  std::vector<CMatrix> onb_;
  CMatrix gram_inverse_;
};

// Element of the k-th matrix level M_k(V), stored as a kd x kd matrix whose
// d x d blocks lie in V.
class LevelElement {
 public:
  // Throws InputError when some block leaves span(V) beyond
  // tol * (1 + |block|_F).
  LevelElement(const MatricialSystem& sys, std::size_t level, CMatrix matrix,
               double tol = tol::kFeasibility);

  std::size_t level() const noexcept { return level_; }
  const CMatrix& matrix() const noexcept { return matrix_; }

 private:
  std::size_t level_;
  CMatrix matrix_;
};

CMatrix project_onto(const MatricialSystem& sys, const CMatrix& m);
bool contains(const MatricialSystem& sys, const CMatrix& m, double tol = tol::kFeasibility);
double membership_residual(const MatricialSystem& sys, const CMatrix& m);

// Positivity in the matrix cone M_k(V)^+ (span intersected with the PSD cone).
bool is_positive_element(const MatricialSystem& sys, const LevelElement& el,
                         double tol = tol::kFeasibility);

// inf{ r : [[r I, v], [v^*, r I]] in M_2k(V)^+ }, by 60 bisection steps on
// [0, |v|_F].
double matrix_norm(const MatricialSystem& sys, const LevelElement& el);

// Order norm inf{ r : -r e <= v <= r e } for Hermitian v in V.
double order_norm_h(const MatricialSystem& sys, const HermMatrix& v);

}  // namespace ucpext
