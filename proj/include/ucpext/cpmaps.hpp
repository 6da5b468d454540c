#pragma once

// Linear maps on M_d in Choi form. Convention: choi = sum_ij E_ij (x) phi(E_ij),
// so the d x d block (i, j) of the d^2 x d^2 Choi matrix is phi(E_ij). Maps
// act on observables (Heisenberg picture); unitality phi(I) = I is the
// normalization, trace preservation is never imposed.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ucpext/densela.hpp"
#include "ucpext/errors.hpp"
#include "ucpext/opsys.hpp"

namespace ucpext {

class SuperOp {
 public:
  SuperOp() = default;
  // Throws InputError unless choi is d^2 x d^2.
  SuperOp(std::size_t d, CMatrix choi);

  static SuperOp identity(std::size_t d);
  static SuperOp zero(std::size_t d);
  static SuperOp transpose_map(std::size_t d);
  // Map from its matrix on row-major vectorizations: vec(phi(B)) = S vec(B).
  static SuperOp from_matrix(std::size_t d, const CMatrix& s);

  std::size_t d() const noexcept { return d_; }
  const CMatrix& choi() const noexcept { return choi_; }
  // The d^2 x d^2 matrix acting on row-major vec(B).
  CMatrix matrix() const;
  CMatrix block(std::size_t i, std::size_t j) const;

  friend bool operator==(const SuperOp&, const SuperOp&) = default;

 private:
  std::size_t d_ = 0;
  CMatrix choi_;
};

SuperOp operator+(const SuperOp& a, const SuperOp& b);
SuperOp operator-(const SuperOp& a, const SuperOp& b);
SuperOp operator*(cplx s, const SuperOp& a);
// Frobenius distance between Choi matrices (equal to the Hilbert-Schmidt
// distance of the superoperator matrices).
double distance(const SuperOp& a, const SuperOp& b);

// phi(B) = sum_k w_k K_k^dagger B K_k.
SuperOp from_kraus(std::size_t d, std::span<const CMatrix> kraus, std::span<const double> weights);
// B -> U^dagger B U.
SuperOp conjugation(const CMatrix& u);

CMatrix apply(const SuperOp& phi, const CMatrix& m);
// compose(phi, psi) = phi o psi.
SuperOp compose(const SuperOp& phi, const SuperOp& psi);
SuperOp power(const SuperOp& phi, unsigned k);
// (id_k (x) phi) applied to a kd x kd matrix.
CMatrix amplification_apply(const SuperOp& phi, std::size_t k, const CMatrix& m);

// sum_ij E_ij (x) E_ij: the level-d positive element whose image under the
// d-th amplification is the Choi matrix.
CMatrix max_entangled_projector(std::size_t d);

struct CPReport {
  bool is_cp = false;
  double min_choi_eigenvalue = 0.0;
  // Present exactly when is_cp is false.
  std::optional<CMatrix> witness;
  // Min eigenvalue of the amplified image of the witness.
  std::optional<double> witness_image_min_eigenvalue;
};

CPReport is_completely_positive(const SuperOp& phi, double tol = tol::kFeasibility);
bool is_unital(const SuperOp& phi, double tol = tol::kFeasibility);
bool is_ucp(const SuperOp& phi, double tol = tol::kFeasibility);
bool is_hermiticity_preserving(const SuperOp& phi, double tol = tol::kFeasibility);

// The restriction of phi to V as a list of images of V's basis.
std::vector<CMatrix> restrict_to(const SuperOp& phi, const MatricialSystem& sys);

// Estimate of sup{ |phi(M)| : |M| <= 1 } in spectral norms. The supremum is
// attained on unitaries; each start is refined by alternating top singular
// pairs and polar factors, which never decreases the objective.
double induced_operator_norm(const SuperOp& phi, unsigned starts = 24, unsigned seed = 7);

}  // namespace ucpext
