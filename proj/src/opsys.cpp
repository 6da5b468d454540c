#include "ucpext/opsys.hpp"

#include <cmath>
#include <sstream>

namespace ucpext {

namespace {

constexpr int kBisectionSteps = 60;

bool is_psd(const CMatrix& m) {
  return min_eigenvalue(HermMatrix(hermitian_part(m), 1.0)) >= 0.0;
}

}  // namespace

MatricialSystem::MatricialSystem(std::vector<CMatrix> basis) : basis_(std::move(basis)) {
  if (basis_.empty()) throw InputError("MatricialSystem: empty basis");
  d_ = basis_.front().rows();
  for (const auto& b : basis_) {
    if (b.rows() != d_ || b.cols() != d_) throw InputError("MatricialSystem: basis shape mismatch");
    if (!b.all_finite()) throw InputError("MatricialSystem: non-finite basis entry");
    if (hermiticity_defect(b) > tol::kStructural * std::max(1.0, b.frobenius_norm()))
      throw InputError("MatricialSystem: basis element is not Hermitian");
  }
  if (frobenius_distance(basis_.front(), CMatrix::identity(d_)) > tol::kStructural)
    throw InputError("MatricialSystem: basis[0] must be the identity");

  const std::size_t n = basis_.size();
  CMatrix gram(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) gram(i, j) = hs_inner(basis_[i], basis_[j]);
  const double smallest = min_eigenvalue(HermMatrix(gram, 1e-9));
  if (smallest <= 1e-10) {
    std::ostringstream os;
    os << "MatricialSystem: basis is linearly dependent (smallest Gram eigenvalue " << smallest
       << ")";
    throw InputError(os.str());
  }
  gram_inverse_ = inverse(gram);

  for (const auto& b : basis_) {
    CMatrix u = b;
    for (const auto& q : onb_) u -= hs_inner(q, u) * q;
    u *= 1.0 / u.frobenius_norm();
    onb_.push_back(std::move(u));
  }
}

std::vector<cplx> MatricialSystem::coordinates(const CMatrix& m) const {
  const std::size_t n = basis_.size();
  std::vector<cplx> rhs(n);
  for (std::size_t k = 0; k < n; ++k) rhs[k] = hs_inner(basis_[k], m);
  std::vector<cplx> c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) c[i] += gram_inverse_(i, k) * rhs[k];
  return c;
}

std::vector<cplx> MatricialSystem::orthonormal_coordinates(const CMatrix& m) const {
  std::vector<cplx> c;
  c.reserve(onb_.size());
  for (const auto& q : onb_) c.push_back(hs_inner(q, m));
  return c;
}

CMatrix MatricialSystem::combine(const std::vector<cplx>& coords) const {
  if (coords.size() != basis_.size()) throw InputError("combine: coordinate count mismatch");
  CMatrix m(d_, d_);
  for (std::size_t k = 0; k < coords.size(); ++k) m += coords[k] * basis_[k];
  return m;
}

LevelElement::LevelElement(const MatricialSystem& sys, std::size_t level, CMatrix matrix,
                           double tol)
    : level_(level), matrix_(std::move(matrix)) {
  const std::size_t d = sys.ambient_dim();
  if (level_ == 0 || matrix_.rows() != level_ * d || matrix_.cols() != level_ * d)
    throw InputError("LevelElement: matrix size must be level * ambient_dim");
  for (std::size_t i = 0; i < level_; ++i)
    for (std::size_t j = 0; j < level_; ++j)
      if (!contains(sys, matrix_.block(i * d, j * d, d, d), tol))
        throw InputError("LevelElement: block outside the system span");
}

CMatrix project_onto(const MatricialSystem& sys, const CMatrix& m) {
  if (m.rows() != sys.ambient_dim() || m.cols() != sys.ambient_dim())
    throw InputError("project_onto: dimension mismatch");
  CMatrix p(m.rows(), m.cols());
  for (const auto& q : sys.orthonormal_basis()) p += hs_inner(q, m) * q;
  return p;
}

double membership_residual(const MatricialSystem& sys, const CMatrix& m) {
  return frobenius_distance(m, project_onto(sys, m));
}

bool contains(const MatricialSystem& sys, const CMatrix& m, double tol) {
  if (m.rows() != sys.ambient_dim() || m.cols() != sys.ambient_dim()) return false;
  return membership_residual(sys, m) <= tol * (1.0 + m.frobenius_norm());
}

bool is_positive_element(const MatricialSystem& /*sys*/, const LevelElement& el, double tol) {
  const CMatrix& m = el.matrix();
  if (hermiticity_defect(m) > tol * (1.0 + m.frobenius_norm())) return false;
  return min_eigenvalue(HermMatrix(hermitian_part(m), 1.0)) >= -tol;
}

double matrix_norm(const MatricialSystem& /*sys*/, const LevelElement& el) {
  const CMatrix& v = el.matrix();
  const std::size_t n = v.rows();
  CMatrix dilation(2 * n, 2 * n);
  dilation.set_block(0, n, v);
  dilation.set_block(n, 0, v.adjoint());
  auto feasible = [&](double r) {
    CMatrix m = dilation;
    for (std::size_t i = 0; i < 2 * n; ++i) m(i, i) = r;
    return is_psd(m);
  };
  double lo = 0.0;
  double hi = v.frobenius_norm();
  if (hi == 0.0) return 0.0;
  for (int k = 0; k < kBisectionSteps; ++k) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

double order_norm_h(const MatricialSystem& sys, const HermMatrix& v) {
  if (!contains(sys, v.matrix())) throw InputError("order_norm_h: element is not in the system");
  const std::size_t d = v.dim();
  const CMatrix id = CMatrix::identity(d);
  auto feasible = [&](double r) {
    return is_psd(r * id - v.matrix()) && is_psd(r * id + v.matrix());
  };
  double lo = 0.0;
  // |v|_F bounds every eigenvalue in modulus.
  double hi = v.matrix().frobenius_norm();
  if (hi == 0.0) return 0.0;
  for (int k = 0; k < kBisectionSteps; ++k) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace ucpext
