#include "ucpext/catalog.hpp"

#include <cmath>

namespace ucpext::catalog {

const PauliBasis& pauli() {
  static const PauliBasis p{
      CMatrix{{1, 0}, {0, 1}},
      CMatrix{{0, 1}, {1, 0}},
      CMatrix{{0, cplx{0, -1}}, {cplx{0, 1}, 0}},
      CMatrix{{1, 0}, {0, -1}},
  };
  return p;
}

MatricialSystem scalar_system() { return MatricialSystem({pauli().I}); }

MatricialSystem diagonal_system() { return MatricialSystem({pauli().I, pauli().Z}); }

MatricialSystem rebit_system() { return MatricialSystem({pauli().I, pauli().X, pauli().Z}); }

MatricialSystem qubit_system() {
  const auto& p = pauli();
  return MatricialSystem({p.I, p.X, p.Y, p.Z});
}

MatricialSystem full_system(std::size_t d) {
  std::vector<CMatrix> basis{CMatrix::identity(d)};
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      CMatrix re(d, d), im(d, d);
      re(i, j) = re(j, i) = s;
      im(i, j) = cplx{0, -s};
      im(j, i) = cplx{0, s};
      basis.push_back(re);
      basis.push_back(im);
    }
  // Traceless diagonal directions.
  for (std::size_t k = 1; k < d; ++k) {
    CMatrix h(d, d);
    for (std::size_t i = 0; i < k; ++i) h(i, i) = 1.0;
    h(k, k) = -static_cast<double>(k);
    basis.push_back((1.0 / std::sqrt(static_cast<double>(k * (k + 1)))) * h);
  }
  return MatricialSystem(std::move(basis));
}

MatricialSystem real_symmetric_system(std::size_t d) {
  std::vector<CMatrix> basis{CMatrix::identity(d)};
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      CMatrix re(d, d);
      re(i, j) = re(j, i) = s;
      basis.push_back(re);
    }
  for (std::size_t k = 1; k < d; ++k) {
    CMatrix h(d, d);
    for (std::size_t i = 0; i < k; ++i) h(i, i) = 1.0;
    h(k, k) = -static_cast<double>(k);
    basis.push_back((1.0 / std::sqrt(static_cast<double>(k * (k + 1)))) * h);
  }
  return MatricialSystem(std::move(basis));
}

std::vector<CatalogCase> four_case_catalog() {
  return {
      {"scalar", scalar_system(), {1, true, "C"}},
      {"diagonal", diagonal_system(), {2, true, "C^2"}},
      {"rebit", rebit_system(), {4, false, "M_2"}},
      {"qubit", qubit_system(), {4, false, "M_2"}},
  };
}

SubsystemGenerator rebit_rotation(double omega) {
  const auto& p = pauli();
  return SubsystemGenerator(rebit_system(), {CMatrix(2, 2), omega * p.Z, -omega * p.X});
}

SubsystemGenerator rebit_dissipative(double delta) {
  if (!(delta > 0.0)) throw InputError("rebit_dissipative: delta must be positive");
  const auto& p = pauli();
  return SubsystemGenerator(rebit_system(), {CMatrix(2, 2), -delta * p.X, -delta * p.Z});
}

Generator rotation_extension(double omega) {
  return hamiltonian_generator(HermMatrix((0.5 * omega) * pauli().Y));
}

Generator g1(double delta) {
  if (!(delta > 0.0)) throw InputError("g1: delta must be positive");
  const auto& p = pauli();
  const CMatrix kraus[] = {p.X, p.Z};
  const double w[] = {0.5, 0.5};
  const SuperOp inner = from_kraus(2, kraus, w);
  return Generator(cplx{delta} * (inner - SuperOp::identity(2)));
}

double g2_prefactor(G2Prefactor p) { return p == G2Prefactor::derived ? 0.75 : 4.0 / 3.0; }

Generator g2(double delta, G2Prefactor prefactor) {
  if (!(delta > 0.0)) throw InputError("g2: delta must be positive");
  const auto& p = pauli();
  const CMatrix kraus[] = {p.X, p.Y, p.Z};
  const double third = 1.0 / 3.0;
  const double w[] = {third, third, third};
  const SuperOp inner = from_kraus(2, kraus, w);
  return Generator(cplx{g2_prefactor(prefactor) * delta} * (inner - SuperOp::identity(2)));
}

SuperOp state_map(const CMatrix& rho) {
  const std::size_t d = rho.rows();
  if (!rho.is_square() || !is_hermitian(rho, 1e-12) || std::abs(rho.trace() - 1.0) > 1e-12 ||
      min_eigenvalue(HermMatrix(rho)) < -1e-12)
    throw InputError("state_map: rho must be a density matrix");
  // psi(E_ij) = rho_ji I.
  CMatrix c(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) c(i * d + k, j * d + k) = rho(j, i);
  return SuperOp(d, std::move(c));
}

}  // namespace ucpext::catalog
