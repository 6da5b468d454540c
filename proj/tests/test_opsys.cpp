#include "doctest.h"

#include <random>

#include "test_support.hpp"
#include "ucpext/catalog.hpp"
#include "ucpext/opsys.hpp"

using namespace ucpext;

namespace {

CMatrix random_member(std::mt19937_64& rng, const MatricialSystem& sys, bool hermitian) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<cplx> c;
  for (std::size_t k = 0; k < sys.dim(); ++k) c.push_back(hermitian ? cplx{n(rng)} : cplx{n(rng), n(rng)});
  return sys.combine(c);
}

CMatrix random_level(std::mt19937_64& rng, const MatricialSystem& sys, std::size_t level) {
  const std::size_t d = sys.ambient_dim();
  CMatrix m(level * d, level * d);
  for (std::size_t i = 0; i < level; ++i)
    for (std::size_t j = 0; j < level; ++j) m.set_block(i * d, j * d, random_member(rng, sys, false));
  return m;
}

}  // namespace

TEST_CASE("system validation") {
  const auto& p = catalog::pauli();
  CHECK_THROWS_AS(MatricialSystem({p.X, p.Z}), InputError);
  CHECK_THROWS_AS(MatricialSystem({p.I, CMatrix{{0, 1}, {0, 0}}}), InputError);
  CHECK_THROWS_AS(MatricialSystem({p.I, p.X, 2.0 * p.X}), InputError);
  CHECK_THROWS_AS(MatricialSystem({}), InputError);
  CHECK(catalog::rebit_system().dim() == 3);
  CHECK(catalog::full_system(3).dim() == 9);
  CHECK(catalog::real_symmetric_system(3).dim() == 6);
}

TEST_CASE("orthonormal basis and coordinates") {
  std::mt19937_64 rng(11);
  const MatricialSystem sys({CMatrix::identity(2), catalog::pauli().X + catalog::pauli().I, catalog::pauli().Z});
  const auto& onb = sys.orthonormal_basis();
  for (std::size_t i = 0; i < onb.size(); ++i)
    for (std::size_t j = 0; j < onb.size(); ++j)
      CHECK(std::abs(hs_inner(onb[i], onb[j]) - (i == j ? 1.0 : 0.0)) < 1e-14);
  for (int n = 0; n < 20; ++n) {
    const CMatrix v = random_member(rng, sys, false);
    CHECK(frobenius_distance(sys.combine(sys.coordinates(v)), v) < 1e-12);
    CHECK(contains(sys, v));
    CHECK(frobenius_distance(project_onto(sys, v), v) < 1e-12);
  }
  CHECK_FALSE(contains(sys, catalog::pauli().Y));
  CHECK(membership_residual(sys, catalog::pauli().Y) == doctest::Approx(std::sqrt(2.0)));
  CHECK(project_onto(sys, catalog::pauli().Y).frobenius_norm() < 1e-14);
}

TEST_CASE("level elements must have blocks in the system") {
  const auto sys = catalog::rebit_system();
  CHECK_THROWS_AS(LevelElement(sys, 1, catalog::pauli().Y), InputError);
  CHECK_THROWS_AS(LevelElement(sys, 2, catalog::pauli().X), InputError);
  CHECK_NOTHROW(LevelElement(sys, 2, kron(catalog::pauli().Y, catalog::pauli().X)));
}

TEST_CASE("rebit cone: aI + bX + cZ >= 0 iff a >= 0 and b^2 + c^2 <= a^2") {
  const auto sys = catalog::rebit_system();
  const auto& p = catalog::pauli();
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -3; c <= 3; ++c) {
        const CMatrix v = double(a) * p.I + double(b) * p.X + double(c) * p.Z;
        CHECK(is_positive_element(sys, LevelElement(sys, 1, v)) == (a >= 0 && b * b + c * c <= a * a));
      }
}

TEST_CASE("matrix norm equals the operator norm") {
  std::mt19937_64 rng(12);
  for (const auto& sys : {catalog::rebit_system(), catalog::real_symmetric_system(3), catalog::diagonal_system()}) {
    for (std::size_t level : {1u, 2u})
      for (int n = 0; n < 25; ++n) {
        const CMatrix m = random_level(rng, sys, level);
        const double r = matrix_norm(sys, LevelElement(sys, level, m));
        CHECK(std::abs(r - spectral_norm(m)) <= 1e-8 * (1 + spectral_norm(m)));
      }
  }
  const auto sys = catalog::rebit_system();
  CHECK(matrix_norm(sys, LevelElement(sys, 1, CMatrix(2, 2))) == 0.0);
}

TEST_CASE("order norm of Hermitian members") {
  std::mt19937_64 rng(13);
  const auto sys = catalog::real_symmetric_system(3);
  for (int n = 0; n < 25; ++n) {
    const CMatrix v = random_member(rng, sys, true);
    const double r = order_norm_h(sys, HermMatrix(v, 1e-10));
    CHECK(std::abs(r - spectral_norm(v)) <= 1e-8 * (1 + r));
    // Archimedean: v + r e is positive exactly from r = |v| on.
    const CMatrix e = CMatrix::identity(3);
    CHECK(is_positive_element(sys, LevelElement(sys, 1, v + cplx{r + 1e-9} * e)));
    const bool below = is_positive_element(sys, LevelElement(sys, 1, v + cplx{0.99 * r} * e)) &&
                       is_positive_element(sys, LevelElement(sys, 1, cplx{0.99 * r} * e - v));
    CHECK_FALSE(below);
  }
  CHECK_THROWS_AS(order_norm_h(sys, HermMatrix(catalog::full_system(3).basis()[2])), InputError);
}

TEST_CASE("compression preserves matrix positivity") {
  std::mt19937_64 rng(14);
  const auto sys = catalog::rebit_system();
  for (int n = 0; n < 25; ++n) {
    CMatrix x = random_level(rng, sys, 2);
    x = hermitian_part(x);
    x += cplx{spectral_norm(x) + 0.1} * CMatrix::identity(4);
    REQUIRE(is_positive_element(sys, LevelElement(sys, 2, x)));
    const CMatrix alpha = testing::random_matrix(rng, 2, 3);
    const CMatrix a = kron(alpha, CMatrix::identity(2));
    const CMatrix y = a.adjoint() * x * a;
    CHECK(is_positive_element(sys, LevelElement(sys, 3, y)));
  }
}
