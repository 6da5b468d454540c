#pragma once

// Generators of UCP semigroups on M_d and on matricial systems, their
// evolution and resolvents, and the identities that tie them together.

#include <cstddef>
#include <string>
#include <vector>

#include "ucpext/cpmaps.hpp"
#include "ucpext/densela.hpp"
#include "ucpext/errors.hpp"
#include "ucpext/opsys.hpp"

namespace ucpext {

struct GeneratorCertificates {
  bool hermiticity_preserving = false;
  bool unital_kernel = false;  // G(I) = 0
  bool ccp = false;
  // ccp of -G as well; allows evolution backwards in time.
  bool group = false;
};

// A generator together with certificates recomputed from the map itself.
class Generator {
 public:
  explicit Generator(SuperOp op, double tol = tol::kFeasibility);

  const SuperOp& op() const noexcept { return op_; }
  std::size_t d() const noexcept { return op_.d(); }
  const GeneratorCertificates& certificates() const noexcept { return cert_; }
  // Generates a UCP semigroup: Hermiticity preserving, G(I) = 0 and ccp.
  bool certified() const noexcept {
    return cert_.hermiticity_preserving && cert_.unital_kernel && cert_.ccp;
  }
  double tolerance() const noexcept { return tol_; }

 private:
  SuperOp op_;
  GeneratorCertificates cert_;
  double tol_;
};

struct Jump {
  CMatrix op;
  double rate = 0.0;
};

// G(B) = i[H, B] + sum_k r_k (V_k^dagger B V_k - 1/2 {V_k^dagger V_k, B}).
Generator gksl_generator(std::size_t d, const HermMatrix& hamiltonian, const std::vector<Jump>& jumps);
// i[H, .] alone.
Generator hamiltonian_generator(const HermMatrix& hamiltonian);

// P choi(L) P with P the projector orthogonal to the maximally entangled vector.
CMatrix ccp_compression(const SuperOp& l);
bool is_conditionally_completely_positive(const SuperOp& l, double tol = tol::kFeasibility);

// exp(t G). Negative t requires the group certificate.
SuperOp evolve(const Generator& g, double t);

// R(lambda, G) = (lambda id - G)^{-1}. Throws NumericalError (with a
// condition estimate) when lambda is numerically in the spectrum.
SuperOp resolvent(const Generator& g, cplx lambda);
SuperOp scaled_resolvent(const Generator& g, double lambda);  // lambda R(lambda, G)

// |(R(l) - R(m)) / (l - m) + R(l) R(m)|_F.
double hilbert_identity_residual(const Generator& g, cplx lambda, cplx mu);

struct LaplaceResult {
  SuperOp value;
  double horizon = 0.0;
  // e^{-lambda T} / lambda bounds the neglected tail for contractive semigroups.
  double truncation_bound = 0.0;
};

// Horizon with e^{-lambda T} <= 1e-8.
double default_laplace_horizon(double lambda);
// Composite 16-point Gauss-Legendre approximation of int_0^T e^{-lambda t} Phi(t) dt.
LaplaceResult laplace_resolvent(const Generator& g, double lambda, double horizon,
                                std::size_t panels);

struct SpectralBoundReport {
  double value = 0.0;
  double hermitian_part_bound = 0.0;  // max eigenvalue of (S + S^dagger) / 2
  double gershgorin_bound = 0.0;      // max_i Re S_ii + sum_{j != i} |S_ij|
  bool kernel_verified = false;       // S vec(I) = 0 checked (certified generators)
};

// Upper bound on max Re(spectrum) of the superoperator matrix: the numerical
// abscissa clamped by Gershgorin discs. For certified generators the exact
// value 0 is returned after checking that vec(I) spans a kernel vector.
SpectralBoundReport spectral_bound_report(const Generator& g);
double spectral_bound(const Generator& g);

// A generator given only on a matricial system: the images A(v_k) of the
// system's basis, all inside span(V).
class SubsystemGenerator {
 public:
  SubsystemGenerator(MatricialSystem system, std::vector<CMatrix> images,
                     double tol = tol::kFeasibility);
  // Restriction of a generator on M_d to an invariant system.
  static SubsystemGenerator restrict(const Generator& g, const MatricialSystem& system,
                                     double tol = tol::kFeasibility);

  const MatricialSystem& system() const noexcept { return system_; }
  const std::vector<CMatrix>& images() const noexcept { return images_; }
  // Matrix of A in the orthonormal basis of V (real for Hermitian-preserving A).
  const CMatrix& coordinate_matrix() const noexcept { return coords_; }

  CMatrix apply(const CMatrix& v) const;
  SubsystemGenerator negated() const;

 private:
  MatricialSystem system_;
  std::vector<CMatrix> images_;
  CMatrix coords_;
};

// A map on V described by the images of V's basis.
std::vector<CMatrix> subsystem_map_images(const MatricialSystem& sys, const CMatrix& coordinate_map);
// Phi(t) = exp(t A) on V, as images of V's basis.
std::vector<CMatrix> subsystem_evolve(const SubsystemGenerator& a, double t);
// lambda R(lambda, A) on V, as images of V's basis.
std::vector<CMatrix> subsystem_scaled_resolvent(const SubsystemGenerator& a, double lambda);

struct ValidationSample {
  std::string kind;  // "lambda" or "t"
  double parameter = 0.0;
  bool contractive = false;
  bool feasible = false;
  double residual = 0.0;  // worst extension residual at this sample
  std::size_t iterations = 0;
  std::string note;
};

struct ValidationReport {
  bool valid = false;
  bool unital_kernel = false;
  double unital_residual = 0.0;
  std::vector<ValidationSample> samples;
  std::string reason;
};

struct ValidationOptions {
  std::vector<double> lambdas{0.5, 1.0, 2.0, 4.0};
  std::vector<double> times{0.5, 1.0, 2.0};
  double tol = tol::kFeasibility;
  std::size_t max_iter = 200000;
};

// Checks that A generates a UCP semigroup on V: A(e) = 0 and every sampled
// lambda R(lambda, A) and Phi(t) admits a UCP extension to M_d.
ValidationReport validate_subsystem_semigroup(const SubsystemGenerator& a,
                                              const ValidationOptions& options = {});

}  // namespace ucpext
