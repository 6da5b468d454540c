#include "ucpext/cpmaps.hpp"

#include <cmath>
#include <random>

namespace ucpext {

namespace {

void require_same_d(const SuperOp& a, const SuperOp& b, const char* op) {
  if (a.d() != b.d()) throw InputError(std::string(op) + ": dimension mismatch");
}

// Orthonormalize the columns of m in place (modified Gram-Schmidt). Columns
// that collapse are replaced by vectors drawn from `rng`.
void orthonormalize_columns(CMatrix& m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const std::size_t n = m.rows();
  for (std::size_t c = 0; c < m.cols(); ++c) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      for (std::size_t p = 0; p < c; ++p) {
        cplx dot = 0.0;
        for (std::size_t r = 0; r < n; ++r) dot += std::conj(m(r, p)) * m(r, c);
        for (std::size_t r = 0; r < n; ++r) m(r, c) -= dot * m(r, p);
      }
      double nrm = 0.0;
      for (std::size_t r = 0; r < n; ++r) nrm += std::norm(m(r, c));
      nrm = std::sqrt(nrm);
      if (nrm > 1e-10) {
        for (std::size_t r = 0; r < n; ++r) m(r, c) /= nrm;
        break;
      }
      for (std::size_t r = 0; r < n; ++r) m(r, c) = cplx{g(rng), g(rng)};
    }
  }
}

CMatrix random_unitary(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(d, d);
  for (auto& z : m.data()) z = cplx{g(rng), g(rng)};
  orthonormalize_columns(m, rng);
  return m;
}

// Unitary factor U of a polar decomposition W = U P, completed arbitrarily on
// the kernel of W.
CMatrix polar_unitary(const CMatrix& w, std::mt19937_64& rng) {
  const std::size_t d = w.rows();
  const auto eig = herm_eig(HermMatrix(hermitian_part(w.adjoint() * w), 1.0));
  const double top = std::sqrt(std::max(eig.values.back(), 0.0));
  CMatrix left(d, d);
  for (std::size_t c = 0; c < d; ++c) {
    const double sigma = std::sqrt(std::max(eig.values[c], 0.0));
    if (sigma <= 1e-12 * std::max(top, 1e-300)) continue;
    CMatrix b = eig.vectors.block(0, c, d, 1);
    left.set_block(0, c, (1.0 / sigma) * (w * b));
  }
  // Process strongest columns first so kernel directions are completed last.
  CMatrix ordered(d, d);
  CMatrix right(d, d);
  for (std::size_t c = 0; c < d; ++c) {
    ordered.set_block(0, c, left.block(0, d - 1 - c, d, 1));
    right.set_block(0, c, eig.vectors.block(0, d - 1 - c, d, 1));
  }
  orthonormalize_columns(ordered, rng);
  return ordered * right.adjoint();
}

}  // namespace

SuperOp::SuperOp(std::size_t d, CMatrix choi) : d_(d), choi_(std::move(choi)) {
  if (choi_.rows() != d * d || choi_.cols() != d * d)
    throw InputError("SuperOp: Choi matrix must be d^2 x d^2");
}

SuperOp SuperOp::identity(std::size_t d) { return SuperOp(d, max_entangled_projector(d)); }

SuperOp SuperOp::zero(std::size_t d) { return SuperOp(d, CMatrix(d * d, d * d)); }

SuperOp SuperOp::transpose_map(std::size_t d) {
  CMatrix c(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) c(i * d + j, j * d + i) = 1.0;
  return SuperOp(d, std::move(c));
}

SuperOp SuperOp::from_matrix(std::size_t d, const CMatrix& s) {
  if (s.rows() != d * d || s.cols() != d * d)
    throw InputError("SuperOp::from_matrix: matrix must be d^2 x d^2");
  CMatrix c(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l) c(i * d + k, j * d + l) = s(k * d + l, i * d + j);
  return SuperOp(d, std::move(c));
}

CMatrix SuperOp::matrix() const {
  const std::size_t d = d_;
  CMatrix s(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l) s(k * d + l, i * d + j) = choi_(i * d + k, j * d + l);
  return s;
}

CMatrix SuperOp::block(std::size_t i, std::size_t j) const {
  return choi_.block(i * d_, j * d_, d_, d_);
}

SuperOp operator+(const SuperOp& a, const SuperOp& b) {
  require_same_d(a, b, "SuperOp +");
  return SuperOp(a.d(), a.choi() + b.choi());
}

SuperOp operator-(const SuperOp& a, const SuperOp& b) {
  require_same_d(a, b, "SuperOp -");
  return SuperOp(a.d(), a.choi() - b.choi());
}

SuperOp operator*(cplx s, const SuperOp& a) { return SuperOp(a.d(), s * a.choi()); }

double distance(const SuperOp& a, const SuperOp& b) {
  require_same_d(a, b, "distance");
  return frobenius_distance(a.choi(), b.choi());
}

SuperOp from_kraus(std::size_t d, std::span<const CMatrix> kraus, std::span<const double> weights) {
  if (kraus.size() != weights.size()) throw InputError("from_kraus: one weight per Kraus operator");
  CMatrix c(d * d, d * d);
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    const CMatrix& op = kraus[k];
    if (op.rows() != d || op.cols() != d) throw InputError("from_kraus: Kraus operator shape");
    const CMatrix opd = op.adjoint();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        // K^dagger E_ij K has entries conj(K_ik) K_jl.
        for (std::size_t p = 0; p < d; ++p)
          for (std::size_t q = 0; q < d; ++q)
            c(i * d + p, j * d + q) += weights[k] * opd(p, i) * op(j, q);
      }
  }
  return SuperOp(d, std::move(c));
}

SuperOp conjugation(const CMatrix& u) {
  const CMatrix ops[] = {u};
  const double w[] = {1.0};
  return from_kraus(u.rows(), ops, w);
}

CMatrix apply(const SuperOp& phi, const CMatrix& m) {
  const std::size_t d = phi.d();
  if (m.rows() != d || m.cols() != d) throw InputError("apply: shape mismatch");
  CMatrix out(d, d);
  const CMatrix& c = phi.choi();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const cplx mij = m(i, j);
      if (mij == cplx{}) continue;
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l) out(k, l) += mij * c(i * d + k, j * d + l);
    }
  return out;
}

SuperOp compose(const SuperOp& phi, const SuperOp& psi) {
  require_same_d(phi, psi, "compose");
  return SuperOp::from_matrix(phi.d(), phi.matrix() * psi.matrix());
}

SuperOp power(const SuperOp& phi, unsigned k) {
  SuperOp result = SuperOp::identity(phi.d());
  SuperOp base = phi;
  while (k > 0) {
    if (k & 1U) result = compose(result, base);
    k >>= 1U;
    if (k > 0) base = compose(base, base);
  }
  return result;
}

CMatrix amplification_apply(const SuperOp& phi, std::size_t k, const CMatrix& m) {
  const std::size_t d = phi.d();
  if (m.rows() != k * d || m.cols() != k * d) throw InputError("amplification_apply: shape mismatch");
  CMatrix out(k * d, k * d);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) out.set_block(a * d, b * d, apply(phi, m.block(a * d, b * d, d, d)));
  return out;
}

CMatrix max_entangled_projector(std::size_t d) {
  CMatrix c(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) c(i * d + i, j * d + j) = 1.0;
  return c;
}

CPReport is_completely_positive(const SuperOp& phi, double tol) {
  const CMatrix& c = phi.choi();
  const double scale = 1.0 + c.frobenius_norm();
  CPReport r;
  r.min_choi_eigenvalue = min_eigenvalue(HermMatrix(hermitian_part(c), 1.0));
  const bool hermitian = hermiticity_defect(c) <= tol * scale;
  r.is_cp = hermitian && r.min_choi_eigenvalue >= -tol * scale;
  if (!r.is_cp) {
    const std::size_t d = phi.d();
    r.witness = max_entangled_projector(d);
    const CMatrix image = amplification_apply(phi, d, *r.witness);
    r.witness_image_min_eigenvalue = min_eigenvalue(HermMatrix(hermitian_part(image), 1.0));
  }
  return r;
}

bool is_unital(const SuperOp& phi, double tol) {
  const CMatrix id = CMatrix::identity(phi.d());
  return frobenius_distance(apply(phi, id), id) <= tol;
}

bool is_ucp(const SuperOp& phi, double tol) {
  return is_unital(phi, tol) && is_completely_positive(phi, tol).is_cp;
}

bool is_hermiticity_preserving(const SuperOp& phi, double tol) {
  return hermiticity_defect(phi.choi()) <= tol;
}

std::vector<CMatrix> restrict_to(const SuperOp& phi, const MatricialSystem& sys) {
  if (phi.d() != sys.ambient_dim()) throw InputError("restrict_to: dimension mismatch");
  std::vector<CMatrix> images;
  images.reserve(sys.dim());
  for (const auto& v : sys.basis()) images.push_back(apply(phi, v));
  return images;
}

double induced_operator_norm(const SuperOp& phi, unsigned starts, unsigned seed) {
  const std::size_t d = phi.d();
  std::mt19937_64 rng(seed);
  // Hilbert-Schmidt adjoint of phi.
  const SuperOp adj = SuperOp::from_matrix(d, phi.matrix().adjoint());
  double best = 0.0;
  for (unsigned s = 0; s < std::max(starts, 1U); ++s) {
    CMatrix u = s == 0 ? CMatrix::identity(d) : random_unitary(d, rng);
    double value = spectral_norm(apply(phi, u));
    for (int it = 0; it < 200; ++it) {
      const CMatrix image = apply(phi, u);
      const auto eig = herm_eig(HermMatrix(hermitian_part(image.adjoint() * image), 1.0));
      const double sigma = std::sqrt(std::max(eig.values.back(), 0.0));
      if (sigma == 0.0) break;
      const CMatrix y = eig.vectors.block(0, d - 1, d, 1);
      const CMatrix x = (1.0 / sigma) * (image * y);
      const CMatrix w = apply(adj, x * y.adjoint());
      u = polar_unitary(w, rng);
      const double next = spectral_norm(apply(phi, u));
      const bool stalled = next <= value * (1.0 + 1e-14);
      value = std::max(value, next);
      if (stalled) break;
    }
    best = std::max(best, value);
  }
  return best;
}

}  // namespace ucpext
