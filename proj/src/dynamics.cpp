#include "ucpext/dynamics.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <sstream>

namespace ucpext {

namespace {

SuperOp superop_from_function(std::size_t d, const std::function<CMatrix(const CMatrix&)>& f) {
  CMatrix c(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) c.set_block(i * d, j * d, f(CMatrix::unit(d, i, j)));
  return SuperOp(d, std::move(c));
}

CMatrix vec_identity(std::size_t d) {
  CMatrix v(d * d, 1);
  for (std::size_t i = 0; i < d; ++i) v(i * d + i, 0) = 1.0;
  return v;
}

// 16-point Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration
// on the Legendre recurrence.
struct GaussLegendre16 {
  std::array<double, 16> nodes{};
  std::array<double, 16> weights{};

  GaussLegendre16() {
    constexpr int n = 16;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 1.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendre16& gauss_legendre16() {
  static const GaussLegendre16 rule;
  return rule;
}

}  // namespace

Generator::Generator(SuperOp op, double tol) : op_(std::move(op)), tol_(tol) {
  const std::size_t d = op_.d();
  const double scale = 1.0 + op_.choi().frobenius_norm();
  cert_.hermiticity_preserving = is_hermiticity_preserving(op_, tol * scale);
  cert_.unital_kernel = apply(op_, CMatrix::identity(d)).frobenius_norm() <= tol * scale;
  cert_.ccp = is_conditionally_completely_positive(op_, tol);
  cert_.group = cert_.ccp && is_conditionally_completely_positive(-1.0 * op_, tol);
}

Generator gksl_generator(std::size_t d, const HermMatrix& hamiltonian, const std::vector<Jump>& jumps) {
  if (hamiltonian.dim() != d) throw InputError("gksl_generator: Hamiltonian has wrong dimension");
  std::vector<CMatrix> vd_v;
  for (const auto& j : jumps) {
    if (j.op.rows() != d || j.op.cols() != d) throw InputError("gksl_generator: jump operator shape");
    if (!(j.rate >= 0.0) || !std::isfinite(j.rate)) throw InputError("gksl_generator: negative rate");
    vd_v.push_back(j.op.adjoint() * j.op);
  }
  const CMatrix& h = hamiltonian.matrix();
  const cplx im{0.0, 1.0};
  auto g = [&](const CMatrix& b) {
    CMatrix out = im * commutator(h, b);
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      const CMatrix& v = jumps[k].op;
      out += jumps[k].rate * (v.adjoint() * b * v - 0.5 * anticommutator(vd_v[k], b));
    }
    return out;
  };
  return Generator(superop_from_function(d, g));
}

Generator hamiltonian_generator(const HermMatrix& hamiltonian) {
  return gksl_generator(hamiltonian.dim(), hamiltonian, {});
}

CMatrix ccp_compression(const SuperOp& l) {
  const std::size_t d = l.d();
  const std::size_t n = d * d;
  CMatrix p = CMatrix::identity(n);
  const double w = 1.0 / static_cast<double>(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) p(i * d + i, j * d + j) -= w;
  return p * l.choi() * p;
}

bool is_conditionally_completely_positive(const SuperOp& l, double tol) {
  const double scale = 1.0 + l.choi().frobenius_norm();
  if (!is_hermiticity_preserving(l, tol * scale)) return false;
  const CMatrix c = ccp_compression(l);
  return min_eigenvalue(HermMatrix(hermitian_part(c), 1.0)) >= -tol * scale;
}

SuperOp evolve(const Generator& g, double t) {
  if (t < 0.0 && !g.certificates().group)
    throw InputError("evolve: negative time requires a generator of a group (both +G and -G ccp)");
  if (t == 0.0) return SuperOp::identity(g.d());
  return SuperOp::from_matrix(g.d(), expm(g.op().matrix(), t));
}

SuperOp resolvent(const Generator& g, cplx lambda) {
  const std::size_t n = g.d() * g.d();
  const CMatrix shifted = lambda * CMatrix::identity(n) - g.op().matrix();
  CMatrix inv;
  try {
    inv = inverse(shifted);
  } catch (const NumericalError&) {
    throw NumericalError("resolvent: lambda lies in the spectrum of the generator",
                         std::numeric_limits<double>::infinity());
  }
  const double cond = one_norm(shifted) * one_norm(inv);
  if (!(cond < 1e14)) {
    std::ostringstream os;
    os << "resolvent: lambda is numerically in the spectrum (condition " << cond << ")";
    throw NumericalError(os.str(), cond);
  }
  return SuperOp::from_matrix(g.d(), inv);
}

SuperOp scaled_resolvent(const Generator& g, double lambda) {
  return lambda * resolvent(g, lambda);
}

double hilbert_identity_residual(const Generator& g, cplx lambda, cplx mu) {
  if (lambda == mu) throw InputError("hilbert_identity_residual: lambda and mu must differ");
  const CMatrix rl = resolvent(g, lambda).matrix();
  const CMatrix rm = resolvent(g, mu).matrix();
  const CMatrix lhs = (1.0 / (lambda - mu)) * (rl - rm) + rl * rm;
  return lhs.frobenius_norm();
}

double default_laplace_horizon(double lambda) {
  if (!(lambda > 0.0)) throw InputError("default_laplace_horizon: lambda must be positive");
  return std::log(1e8) / lambda;
}

LaplaceResult laplace_resolvent(const Generator& g, double lambda, double horizon,
                                std::size_t panels) {
  if (!(lambda > 0.0)) throw InputError("laplace_resolvent: lambda must be positive");
  if (!(horizon > 0.0) || panels == 0) throw InputError("laplace_resolvent: bad quadrature grid");
  const std::size_t n = g.d() * g.d();
  const CMatrix shifted = g.op().matrix() - lambda * CMatrix::identity(n);
  const double h = horizon / static_cast<double>(panels);
  const auto& rule = gauss_legendre16();

  // int over one panel [a, a + h] equals e^{a(S - lambda)} times this matrix.
  CMatrix panel(n, n);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k)
    panel += (0.5 * h * rule.weights[k]) * expm(shifted, 0.5 * h * (1.0 + rule.nodes[k]));
  const CMatrix step = expm(shifted, h);
  CMatrix offset = CMatrix::identity(n);
  CMatrix offsets_sum(n, n);
  for (std::size_t p = 0; p < panels; ++p) {
    offsets_sum += offset;
    offset = offset * step;
  }
  LaplaceResult r;
  r.value = SuperOp::from_matrix(g.d(), offsets_sum * panel);
  r.horizon = horizon;
  r.truncation_bound = std::exp(-lambda * horizon) / lambda;
  return r;
}

SpectralBoundReport spectral_bound_report(const Generator& g) {
  const CMatrix s = g.op().matrix();
  const std::size_t n = s.rows();
  SpectralBoundReport r;
  r.hermitian_part_bound = max_eigenvalue(HermMatrix(hermitian_part(s), 1.0));
  double gersh = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) radius += std::abs(s(i, j));
    gersh = std::max(gersh, s(i, i).real() + radius);
  }
  r.gershgorin_bound = gersh;
  r.value = std::min(r.hermitian_part_bound, r.gershgorin_bound);
  if (g.certified()) {
    const double kernel = (s * vec_identity(g.d())).frobenius_norm();
    r.kernel_verified = kernel <= g.tolerance() * (1.0 + s.frobenius_norm());
    // Contractive semigroups have s <= 0 and vec(I) gives s >= 0.
    if (r.kernel_verified) r.value = 0.0;
  }
  return r;
}

double spectral_bound(const Generator& g) { return spectral_bound_report(g).value; }

SubsystemGenerator::SubsystemGenerator(MatricialSystem system, std::vector<CMatrix> images, double tol)
    : system_(std::move(system)), images_(std::move(images)) {
  if (images_.size() != system_.dim())
    throw InputError("SubsystemGenerator: one image per basis element is required");
  for (const auto& m : images_) {
    if (m.rows() != system_.ambient_dim() || m.cols() != system_.ambient_dim())
      throw InputError("SubsystemGenerator: image has wrong shape");
    if (!contains(system_, m, tol)) throw InputError("SubsystemGenerator: image leaves the system");
  }
  const auto& onb = system_.orthonormal_basis();
  const std::size_t n = onb.size();
  coords_ = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const CMatrix image = apply(onb[k]);
    for (std::size_t j = 0; j < n; ++j) coords_(j, k) = hs_inner(onb[j], image);
  }
  double imag = 0.0;
  for (const auto& z : coords_.data()) imag = std::max(imag, std::abs(z.imag()));
  if (imag > tol * (1.0 + coords_.frobenius_norm()))
    throw InputError("SubsystemGenerator: dynamics does not preserve Hermitian elements");
  for (auto& z : coords_.data()) z = z.real();
}

SubsystemGenerator SubsystemGenerator::restrict(const Generator& g, const MatricialSystem& system,
                                                double tol) {
  if (g.d() != system.ambient_dim()) throw InputError("restrict: dimension mismatch");
  std::vector<CMatrix> images = restrict_to(g.op(), system);
  for (const auto& m : images)
    if (!contains(system, m, tol)) throw InputError("restrict: the system is not invariant under the generator");
  return SubsystemGenerator(system, std::move(images), tol);
}

CMatrix SubsystemGenerator::apply(const CMatrix& v) const {
  const auto c = system_.coordinates(v);
  CMatrix out(system_.ambient_dim(), system_.ambient_dim());
  for (std::size_t k = 0; k < c.size(); ++k) out += c[k] * images_[k];
  return out;
}

SubsystemGenerator SubsystemGenerator::negated() const {
  std::vector<CMatrix> neg;
  neg.reserve(images_.size());
  for (const auto& m : images_) neg.push_back(-m);
  return SubsystemGenerator(system_, std::move(neg));
}

std::vector<CMatrix> subsystem_map_images(const MatricialSystem& sys, const CMatrix& coordinate_map) {
  const auto& onb = sys.orthonormal_basis();
  std::vector<CMatrix> images;
  images.reserve(sys.dim());
  for (const auto& v : sys.basis()) {
    const auto c = sys.orthonormal_coordinates(v);
    CMatrix out(sys.ambient_dim(), sys.ambient_dim());
    for (std::size_t j = 0; j < onb.size(); ++j) {
      cplx coef = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k) coef += coordinate_map(j, k) * c[k];
      out += coef * onb[j];
    }
    images.push_back(std::move(out));
  }
  return images;
}

std::vector<CMatrix> subsystem_evolve(const SubsystemGenerator& a, double t) {
  return subsystem_map_images(a.system(), expm(a.coordinate_matrix(), t));
}

std::vector<CMatrix> subsystem_scaled_resolvent(const SubsystemGenerator& a, double lambda) {
  const CMatrix& coords = a.coordinate_matrix();
  const std::size_t n = coords.rows();
  const CMatrix shifted = lambda * CMatrix::identity(n) - coords;
  CMatrix inv;
  try {
    inv = inverse(shifted);
  } catch (const NumericalError&) {
    throw NumericalError("subsystem resolvent: lambda lies in the spectrum of A",
                         std::numeric_limits<double>::infinity());
  }
  const double cond = one_norm(shifted) * one_norm(inv);
  if (!(cond < 1e14)) throw NumericalError("subsystem resolvent: lambda is numerically in the spectrum", cond);
  return subsystem_map_images(a.system(), lambda * inv);
}

}  // namespace ucpext
