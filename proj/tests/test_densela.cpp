#include "doctest.h"

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "ucpext/densela.hpp"
#include "ucpext/errors.hpp"

using namespace ucpext;

namespace {

CMatrix series_exp(const CMatrix& a, int order) {
  CMatrix term = CMatrix::identity(a.rows());
  CMatrix sum = term;
  for (int k = 1; k <= order; ++k) {
    term = (1.0 / k) * (term * a);
    sum += term;
  }
  return sum;
}

double unitarity_defect(const CMatrix& u) {
  return frobenius_distance(u.adjoint() * u, CMatrix::identity(u.rows()));
}

}  // namespace

TEST_CASE("basic algebra") {
  const auto& p = catalog::pauli();
  CHECK(p.X * p.X == p.I);
  CHECK(frobenius_distance(p.X * p.Y, cplx{0, 1} * p.Z) == 0.0);
  CHECK(commutator(p.X, p.Y) == cplx{0, 2} * p.Z);
  CHECK(anticommutator(p.X, p.Z) == CMatrix(2, 2));
  CHECK(p.Y.adjoint() == p.Y);
  CHECK(p.Y.transpose() == -p.Y);
  CHECK(hs_inner(p.X, p.X) == cplx{2.0});
  CHECK(p.Z.trace() == cplx{0.0});
  CHECK(CMatrix::unit(3, 0, 2)(0, 2) == cplx{1.0});
  CHECK(kron(p.X, p.I).rows() == 4);
}

TEST_CASE("kron mixed product") {
  std::mt19937_64 rng(1);
  for (int n = 0; n < 20; ++n) {
    const CMatrix a = testing::random_matrix(rng, 2, 2), b = testing::random_matrix(rng, 3, 3);
    const CMatrix c = testing::random_matrix(rng, 2, 2), d = testing::random_matrix(rng, 3, 3);
    CHECK(frobenius_distance(kron(a, b) * kron(c, d), kron(a * c, b * d)) < 1e-12);
  }
}

TEST_CASE("HermMatrix validates symmetry") {
  CHECK_THROWS_AS(HermMatrix(CMatrix{{0, 1}, {0, 0}}), InputError);
  CHECK_THROWS_AS(HermMatrix(CMatrix(2, 3)), InputError);
  const HermMatrix h(CMatrix{{1, cplx{0, 1}}, {cplx{0, -1}, 2}});
  CHECK(h.dim() == 2);
  // Tolerance is relative to the size of the matrix.
  CMatrix big{{1e6, 1}, {1 + 1e-9, 1e6}};
  CHECK_NOTHROW(HermMatrix(big, 1e-12));
  CHECK(h.matrix() == h.matrix().adjoint());
}

TEST_CASE("eigendecomposition examples") {
  const auto& p = catalog::pauli();
  for (const CMatrix* m : {&p.X, &p.Y, &p.Z}) {
    const auto v = herm_eigenvalues(HermMatrix(*m));
    CHECK(v[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(v[1] == doctest::Approx(1.0).epsilon(1e-14));
  }
  const double diag[] = {3.0, -1.0, 2.0};
  const auto v = herm_eigenvalues(HermMatrix(CMatrix::diagonal(diag)));
  CHECK(v == std::vector<double>{-1.0, 2.0, 3.0});
}

TEST_CASE("eigendecomposition reconstructs random Hermitian matrices") {
  std::mt19937_64 rng(2);
  for (int n = 0; n < 100; ++n) {
    const std::size_t d = 1 + n % 9;
    const CMatrix h = testing::random_hermitian(rng, d);
    const auto e = herm_eig(HermMatrix(h));
    CMatrix recon(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      const CMatrix v = e.vectors.block(0, i, d, 1);
      recon += cplx{e.values[i]} * (v * v.adjoint());
    }
    CHECK(frobenius_distance(recon, h) <= 1e-12 * (1 + h.frobenius_norm()));
    CHECK(unitarity_defect(e.vectors) <= 1e-12);
    CHECK(std::is_sorted(e.values.begin(), e.values.end()));
    double tr = 0;
    for (double x : e.values) tr += x;
    CHECK(std::abs(tr - h.trace().real()) <= 1e-12 * (1 + h.frobenius_norm()));
  }
}

TEST_CASE("eigendecomposition handles degenerate spectra") {
  std::mt19937_64 rng(3);
  const CMatrix u = testing::random_unitary(rng, 5);
  const double diag[] = {1, 1, 1, -2, -2};
  const CMatrix h = u * CMatrix::diagonal(diag) * u.adjoint();
  const auto v = herm_eigenvalues(HermMatrix(h, 1e-10));
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(v[i] - (i < 2 ? -2.0 : 1.0)) < 1e-12);
}

TEST_CASE("matrix exponential agrees with the power series") {
  std::mt19937_64 rng(4);
  for (int n = 0; n < 40; ++n) {
    const std::size_t d = 2 + n % 4;
    CMatrix a = testing::random_matrix(rng, d, d);
    a *= cplx{1.0 / (1.0 + a.frobenius_norm())};
    CHECK(frobenius_distance(expm(a), series_exp(a, 30)) < 1e-13);
  }
}

TEST_CASE("matrix exponential semigroup and unitarity") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 30; ++n) {
    const CMatrix a = testing::random_matrix(rng, 4, 4, 2.0);
    const double s = 0.3 + 0.1 * n, t = 1.7;
    const CMatrix lhs = expm(a, s + t), rhs = expm(a, s) * expm(a, t);
    CHECK(frobenius_distance(lhs, rhs) <= 1e-10 * (1 + lhs.frobenius_norm()));
    const CMatrix h = testing::random_hermitian(rng, 4, 3.0);
    CHECK(unitarity_defect(expm(h, cplx{0, 1})) < 1e-12);
  }
  const double diag[] = {0.0, 1.0, -30.0};
  const CMatrix e = expm(CMatrix::diagonal(diag));
  CHECK(std::abs(e(1, 1) - std::exp(1.0)) < 1e-14);
  CHECK(std::abs(e(2, 2) - std::exp(-30.0)) < 1e-25);
  CHECK(expm(CMatrix(3, 3)) == CMatrix::identity(3));
}

TEST_CASE("positive semidefinite projection") {
  std::mt19937_64 rng(6);
  for (int n = 0; n < 50; ++n) {
    const CMatrix h = testing::random_hermitian(rng, 4);
    const HermMatrix p = psd_project(HermMatrix(h));
    CHECK(min_eigenvalue(p) >= -1e-12);
    CHECK(frobenius_distance(psd_project(p).matrix(), p.matrix()) < 1e-12);
    // Nearest point: no random PSD candidate is closer.
    const CMatrix g = testing::random_matrix(rng, 4, 4);
    const CMatrix q = g * g.adjoint();
    CHECK(frobenius_distance(h, p) <= frobenius_distance(h, q) + 1e-12);
    // The residual is negative semidefinite and orthogonal to the projection.
    CHECK(max_eigenvalue(HermMatrix(h - p.matrix(), 1e-10)) <= 1e-12);
    CHECK(std::abs(hs_inner(h - p.matrix(), p)) <= 1e-10);
  }
}

TEST_CASE("norms") {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 30; ++n) {
    const CMatrix a = testing::random_matrix(rng, 3, 5);
    const double oracle = std::sqrt(max_eigenvalue(HermMatrix(a * a.adjoint(), 1e-10)));
    CHECK(spectral_norm(a) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(spectral_norm(a) <= a.frobenius_norm() + 1e-12);
  }
  CHECK(one_norm(CMatrix{{1, -2}, {3, 4}}) == 6.0);
}

TEST_CASE("LU solve and singular detection") {
  std::mt19937_64 rng(8);
  for (int n = 0; n < 30; ++n) {
    const std::size_t d = 2 + n % 7;
    const CMatrix a = testing::random_matrix(rng, d, d), b = testing::random_matrix(rng, d, 2);
    const CMatrix x = solve(a, b);
    CHECK(frobenius_distance(a * x, b) <= 1e-13 * condition_number(a) * (1 + b.frobenius_norm()));
    CHECK(frobenius_distance(inverse(a) * a, CMatrix::identity(d)) <= 1e-12 * condition_number(a));
  }
  CHECK_THROWS_AS(lu_factor(CMatrix{{1, 2}, {2, 4}}), NumericalError);
  CHECK_THROWS_AS(lu_factor(CMatrix(3, 3)), NumericalError);
  CHECK_THROWS_AS(lu_factor(CMatrix(2, 3)), InputError);
}
