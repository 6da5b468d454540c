#include "ucpext/densela.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ucpext/errors.hpp"

namespace ucpext {

namespace {

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
       << b.cols();
    throw InputError(os.str());
  }
}

void require_square(const CMatrix& a, const char* op) {
  if (!a.is_square()) throw InputError(std::string(op) + ": matrix must be square");
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) throw InputError("CMatrix: entry count does not match shape");
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InputError("CMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const double> diag) {
  CMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix CMatrix::unit(std::size_t n, std::size_t i, std::size_t j) {
  CMatrix m(n, n);
  m(i, j) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

CMatrix CMatrix::transpose() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

CMatrix CMatrix::conj() const {
  CMatrix r = *this;
  for (auto& z : r.data_) z = std::conj(z);
  return r;
}

cplx CMatrix::trace() const {
  require_square(*this, "trace");
  cplx t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

bool CMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

CMatrix CMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw InputError("block: out of range");
  CMatrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

void CMatrix::set_block(std::size_t r0, std::size_t c0, const CMatrix& b) {
  if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw InputError("set_block: out of range");
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  require_same_shape(*this, o, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  require_same_shape(*this, o, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator-(CMatrix a) { return a *= -1.0; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
CMatrix operator*(CMatrix a, cplx s) { return a *= s; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw InputError("operator*: inner dimension mismatch");
  CMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
  return k;
}

cplx hs_inner(const CMatrix& a, const CMatrix& b) {
  require_same_shape(a, b, "hs_inner");
  cplx s = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t k = 0; k < da.size(); ++k) s += std::conj(da[k]) * db[k];
  return s;
}

double frobenius_distance(const CMatrix& a, const CMatrix& b) { return (a - b).frobenius_norm(); }

double hermiticity_defect(const CMatrix& a) {
  require_square(a, "hermiticity_defect");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
  return worst;
}

bool is_hermitian(const CMatrix& a, double tol) {
  return a.is_square() && hermiticity_defect(a) <= tol;
}

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }
CMatrix anticommutator(const CMatrix& a, const CMatrix& b) { return a * b + b * a; }

HermMatrix::HermMatrix(const CMatrix& m, double tol) {
  require_square(m, "HermMatrix");
  if (!m.all_finite()) throw InputError("HermMatrix: non-finite entry");
  const double scale = std::max(1.0, m.frobenius_norm());
  if (hermiticity_defect(m) > tol * scale) throw InputError("HermMatrix: matrix is not Hermitian");
  m_ = hermitian_part(m);
  for (std::size_t i = 0; i < m_.rows(); ++i) m_(i, i) = m_(i, i).real();
}

EigenDecomposition herm_eig(const HermMatrix& h) {
  const std::size_t n = h.dim();
  CMatrix a = h.matrix();
  CMatrix v = CMatrix::identity(n);

  const double scale = a.frobenius_norm();
  const double floor = 1e-15 * scale;

  for (int sweep = 0; sweep < 100; ++sweep) {
    int rotations = 0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double g = std::abs(apq);
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Below the resolution of the diagonal: annihilate without rotating.
        if (g <= floor || g <= 1e-17 * (std::abs(app) + std::abs(aqq))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        ++rotations;
        const cplx e = apq / g;
        const double tau = (aqq - app) / (2.0 * g);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Columns p, q of a <- a U with U_pp = c, U_pq = s e, U_qp = -s conj(e), U_qq = c.
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = c * akp - s * std::conj(e) * akq;
          a(k, q) = s * e * akp + c * akq;
        }
        // Rows p, q of a <- U^dagger a.
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = c * apk - s * e * aqk;
          a(q, k) = s * std::conj(e) * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = c * vkp - s * std::conj(e) * vkq;
          v(k, q) = s * e * vkp + c * vkq;
        }
      }
    }
    if (rotations == 0) break;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

std::vector<double> herm_eigenvalues(const HermMatrix& h) { return herm_eig(h).values; }

double min_eigenvalue(const HermMatrix& h) {
  if (h.dim() == 0) return 0.0;
  return herm_eig(h).values.front();
}

double max_eigenvalue(const HermMatrix& h) {
  if (h.dim() == 0) return 0.0;
  return herm_eig(h).values.back();
}

CMatrix expm(const CMatrix& m, double scale) { return expm(m, cplx{scale, 0.0}); }

CMatrix expm(const CMatrix& m, cplx scale) {
  require_square(m, "expm");
  const std::size_t n = m.rows();
  CMatrix a = scale * m;
  const CMatrix id = CMatrix::identity(n);
  if (a.frobenius_norm() == 0.0) return id;

  constexpr double theta13 = 5.371920351148152;
  constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                          1187353796428800.0,  129060195264000.0,   10559470521600.0,
                          670442572800.0,      33522128640.0,       1323241920.0,
                          40840800.0,          960960.0,            16380.0,
                          182.0,               1.0};
  const double norm1 = one_norm(a);
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    a *= std::ldexp(1.0, -squarings);
  }
  const CMatrix a2 = a * a;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a4 * a2;
  CMatrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                    b[3] * a2 + b[1] * id;
  const CMatrix u = a * u_inner;
  const CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                    b[2] * a2 + b[0] * id;
  CMatrix r = solve(v - u, v + u);
  for (int k = 0; k < squarings; ++k) r = r * r;
  return r;
}

HermMatrix psd_project(const HermMatrix& h) {
  const auto eig = herm_eig(h);
  const std::size_t n = h.dim();
  CMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = eig.values[k];
    if (lam <= 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vi = lam * eig.vectors(i, k);
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vi * std::conj(eig.vectors(j, k));
    }
  }
  return HermMatrix(hermitian_part(out), 1.0);
}

double spectral_norm(const CMatrix& m) {
  if (m.empty()) return 0.0;
  const CMatrix g = m.adjoint() * m;
  const double top = max_eigenvalue(HermMatrix(hermitian_part(g), 1.0));
  return std::sqrt(std::max(top, 0.0));
}

double one_norm(const CMatrix& m) {
  double best = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

LuFactorization lu_factor(const CMatrix& a) {
  require_square(a, "lu_factor");
  const std::size_t n = a.rows();
  LuFactorization f{a, std::vector<std::size_t>(n), 0.0, 0.0};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  double amax = 0.0;
  for (const auto& z : a.data()) amax = std::max(amax, std::abs(z));
  f.min_pivot = std::numeric_limits<double>::infinity();
  CMatrix& lu = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > best) best = std::abs(lu(i, k)), piv = i;
    if (best <= 1e-14 * amax * static_cast<double>(n) || best == 0.0) {
      throw NumericalError("lu_factor: matrix is numerically singular",
                           std::numeric_limits<double>::infinity());
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
    }
    f.min_pivot = std::min(f.min_pivot, best);
    f.max_pivot = std::max(f.max_pivot, best);
    for (std::size_t i = k + 1; i < n; ++i) {
      lu(i, k) /= lu(k, k);
      const cplx l = lu(i, k);
      if (l == cplx{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= l * lu(k, j);
    }
  }
  return f;
}

CMatrix lu_solve(const LuFactorization& f, const CMatrix& b) {
  const std::size_t n = f.lu.rows();
  if (b.rows() != n) throw InputError("lu_solve: right-hand side has wrong row count");
  CMatrix x(n, b.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) x(i, j) = b(f.perm[i], j);
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < i; ++k) x(i, j) -= f.lu(i, k) * x(k, j);
    for (std::size_t ii = n; ii-- > 0;) {
      for (std::size_t k = ii + 1; k < n; ++k) x(ii, j) -= f.lu(ii, k) * x(k, j);
      x(ii, j) /= f.lu(ii, ii);
    }
  }
  return x;
}

CMatrix solve(const CMatrix& a, const CMatrix& b) { return lu_solve(lu_factor(a), b); }

CMatrix inverse(const CMatrix& a) { return solve(a, CMatrix::identity(a.rows())); }

double condition_number(const CMatrix& a) {
  try {
    return one_norm(a) * one_norm(inverse(a));
  } catch (const NumericalError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace ucpext
