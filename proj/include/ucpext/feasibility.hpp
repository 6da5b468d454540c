#pragma once

// Dykstra alternating projections over Hermitian Choi matrices. The search
// space is the real vector space of n x n Hermitian matrices with its
// Frobenius inner product; the two sets are a closed convex cone and an
// affine subspace cut out by linear equations on the Choi matrix.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ucpext/densela.hpp"

namespace ucpext {

// Isometry between n x n Hermitian matrices and R^{n^2}: diagonal entries,
// then sqrt(2) Re and sqrt(2) Im of each strictly upper entry.
std::vector<double> herm_to_coords(const CMatrix& h);
CMatrix coords_to_herm(std::span<const double> x, std::size_t n);

// Orthogonal projector onto { x : A x = b } stored as orthonormal rows Q with
// Q x = beta describing the same set.
class AffineSubspace {
 public:
  AffineSubspace() = default;
  // rows: equations of length `dimension`. Dependent rows are dropped;
  // inconsistent rows throw InputError.
  AffineSubspace(std::size_t dimension, const std::vector<std::vector<double>>& rows,
                 const std::vector<double>& rhs);

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t rank() const noexcept { return beta_.size(); }
  std::vector<double> project(std::span<const double> x) const;
  double residual(std::span<const double> x) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::vector<double>> q_;
  std::vector<double> beta_;
};

// Linear constraint on a Choi matrix of a map on M_d: psi(input) = target.
struct ChoiConstraint {
  CMatrix input;
  CMatrix target;
};

AffineSubspace choi_agreement_subspace(std::size_t d, const std::vector<ChoiConstraint>& constraints);

enum class ConeKind {
  psd,  // choi >= 0: completely positive maps
  ccp,  // P choi P >= 0 with P orthogonal to the maximally entangled vector
};

// Frobenius projection of a Hermitian d^2 x d^2 Choi matrix onto the cone.
CMatrix project_cone(ConeKind kind, std::size_t d, const CMatrix& choi);

struct DykstraOptions {
  double tol = 1e-8;
  std::size_t max_iter = 200000;
};

struct DykstraResult {
  CMatrix choi;  // affine projection of the final cone iterate
  std::size_t iterations = 0;
  double affine_residual = 0.0;
  double cone_residual = 0.0;
  double step = 0.0;
  bool converged = false;
};

// Dykstra iteration started at `start`. Converged when the affine residual of
// the cone iterate and the step length both fall below tol; the returned
// matrix then lies on the affine set and within tol of the cone.
DykstraResult dykstra(ConeKind kind, std::size_t d, const AffineSubspace& affine,
                      const CMatrix& start, const DykstraOptions& options);

}  // namespace ucpext
