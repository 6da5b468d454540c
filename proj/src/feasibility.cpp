#include "ucpext/feasibility.hpp"

#include <cmath>
#include <numeric>

#include "ucpext/errors.hpp"

namespace ucpext {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Householder reflection W (real, symmetric, orthogonal) with W e_last equal
// to the normalized maximally entangled vector.
CMatrix entangled_frame(std::size_t d) {
  const std::size_t n = d * d;
  std::vector<double> u(n, 0.0);
  const double w = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i) u[i * d + i] -= w;
  u[n - 1] += 1.0;
  const double nu = norm(u);
  CMatrix h = CMatrix::identity(n);
  if (nu < 1e-15) return h;
  for (auto& x : u) x /= nu;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) -= 2.0 * u[i] * u[j];
  return h;
}

}  // namespace

std::vector<double> herm_to_coords(const CMatrix& h) {
  const std::size_t n = h.rows();
  std::vector<double> x;
  x.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) x.push_back(h(i, i).real());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      // Average both triangles so non-Hermitian input maps to its Hermitian part.
      const cplx z = 0.5 * (h(i, j) + std::conj(h(j, i)));
      x.push_back(kSqrt2 * z.real());
      x.push_back(kSqrt2 * z.imag());
    }
  return x;
}

CMatrix coords_to_herm(std::span<const double> x, std::size_t n) {
  if (x.size() != n * n) throw InputError("coords_to_herm: coordinate count mismatch");
  CMatrix h(n, n);
  std::size_t p = 0;
  for (std::size_t i = 0; i < n; ++i) h(i, i) = x[p++];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx z{x[p] / kSqrt2, x[p + 1] / kSqrt2};
      p += 2;
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  return h;
}

AffineSubspace::AffineSubspace(std::size_t dimension, const std::vector<std::vector<double>>& rows,
                               const std::vector<double>& rhs)
    : dim_(dimension) {
  if (rows.size() != rhs.size()) throw InputError("AffineSubspace: one right-hand side per row");
  double scale = 0.0;
  for (const auto& r : rows) {
    if (r.size() != dimension) throw InputError("AffineSubspace: row length mismatch");
    scale = std::max(scale, norm(r));
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::vector<double> a = rows[k];
    double b = rhs[k];
    const double original = norm(a);
    // Two passes of modified Gram-Schmidt for numerical orthogonality.
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < q_.size(); ++j) {
        const double c = dot(q_[j], a);
        for (std::size_t i = 0; i < dim_; ++i) a[i] -= c * q_[j][i];
        b -= c * beta_[j];
      }
    const double na = norm(a);
    if (na <= 1e-10 * std::max(original, scale)) {
      if (std::abs(b) > 1e-8 * (1.0 + std::abs(rhs[k])))
        throw InputError("AffineSubspace: inconsistent constraints (targets violate Hermiticity or linearity)");
      continue;
    }
    for (auto& v : a) v /= na;
    q_.push_back(std::move(a));
    beta_.push_back(b / na);
  }
}

std::vector<double> AffineSubspace::project(std::span<const double> x) const {
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t j = 0; j < q_.size(); ++j) {
    const double c = dot(q_[j], x) - beta_[j];
    for (std::size_t i = 0; i < dim_; ++i) y[i] -= c * q_[j][i];
  }
  return y;
}

double AffineSubspace::residual(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < q_.size(); ++j) {
    const double c = dot(q_[j], x) - beta_[j];
    s += c * c;
  }
  return std::sqrt(s);
}

AffineSubspace choi_agreement_subspace(std::size_t d, const std::vector<ChoiConstraint>& constraints) {
  const std::size_t n = d * d;
  const std::size_t dim = n * n;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (const auto& con : constraints) {
    if (con.input.rows() != d || con.target.rows() != d)
      throw InputError("choi_agreement_subspace: constraint shape mismatch");
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = 0; q < d; ++q) {
        // psi(v)_pq = sum_ij v_ij C[(i,p),(j,q)]; w holds the coefficient of each C entry.
        CMatrix w(n, n);
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j) w(i * d + p, j * d + q) = con.input(i, j);
        std::vector<double> re;
        std::vector<double> im;
        re.reserve(dim);
        im.reserve(dim);
        for (std::size_t a = 0; a < n; ++a) {
          re.push_back(w(a, a).real());
          im.push_back(w(a, a).imag());
        }
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = a + 1; b < n; ++b) {
            const cplx fre = (w(a, b) + w(b, a)) / kSqrt2;
            const cplx fim = cplx{0.0, 1.0} * (w(a, b) - w(b, a)) / kSqrt2;
            re.push_back(fre.real());
            re.push_back(fim.real());
            im.push_back(fre.imag());
            im.push_back(fim.imag());
          }
        rows.push_back(std::move(re));
        rhs.push_back(con.target(p, q).real());
        rows.push_back(std::move(im));
        rhs.push_back(con.target(p, q).imag());
      }
  }
  return AffineSubspace(dim, rows, rhs);
}

CMatrix project_cone(ConeKind kind, std::size_t d, const CMatrix& choi) {
  if (kind == ConeKind::psd) return psd_project(HermMatrix(hermitian_part(choi), 1.0)).matrix();
  const std::size_t n = d * d;
  static thread_local std::size_t cached_d = 0;
  static thread_local CMatrix frame;
  if (cached_d != d) {
    frame = entangled_frame(d);
    cached_d = d;
  }
  CMatrix rotated = frame * hermitian_part(choi) * frame;
  if (n > 1) {
    const CMatrix lead = rotated.block(0, 0, n - 1, n - 1);
    rotated.set_block(0, 0, psd_project(HermMatrix(hermitian_part(lead), 1.0)).matrix());
  }
  return frame * rotated * frame;
}

DykstraResult dykstra(ConeKind kind, std::size_t d, const AffineSubspace& affine,
                      const CMatrix& start, const DykstraOptions& options) {
  const std::size_t n = d * d;
  if (start.rows() != n || start.cols() != n) throw InputError("dykstra: start has wrong shape");
  if (affine.dimension() != n * n) throw InputError("dykstra: affine set has wrong dimension");

  std::vector<double> x = herm_to_coords(start);
  std::vector<double> q(x.size(), 0.0);  // cone correction
  // The affine set needs no correction term: Dykstra on an affine subspace
  // reduces to plain projection.
  DykstraResult r;
  std::vector<double> y(x.size());
  std::vector<double> x_next(x.size());
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    y = affine.project(x);
    std::vector<double> shifted(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) shifted[i] = y[i] + q[i];
    x_next = herm_to_coords(project_cone(kind, d, coords_to_herm(shifted, n)));
    double step2 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      q[i] = shifted[i] - x_next[i];
      const double dx = x_next[i] - x[i];
      step2 += dx * dx;
    }
    x.swap(x_next);
    r.iterations = it;
    r.step = std::sqrt(step2);
    r.affine_residual = affine.residual(x);
    if (r.step <= options.tol && r.affine_residual <= options.tol) {
      r.converged = true;
      break;
    }
  }
  const CMatrix result = coords_to_herm(affine.project(x), n);
  r.cone_residual = frobenius_distance(result, project_cone(kind, d, result));
  r.choi = result;
  return r;
}

}  // namespace ucpext
