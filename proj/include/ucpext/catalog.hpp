#pragma once

// Exact constructors for the 2x2 worked examples: Pauli matrices, the four
// operator systems inside M_2, rebit rotations and dissipation, and the two
// qubit generators that extend the dissipative rebit semigroup.

#include <string>
#include <vector>

#include "ucpext/cpmaps.hpp"
#include "ucpext/dynamics.hpp"
#include "ucpext/opsys.hpp"

namespace ucpext::catalog {

struct PauliBasis {
  CMatrix I, X, Y, Z;
};

const PauliBasis& pauli();

MatricialSystem scalar_system();      // span{I}
MatricialSystem diagonal_system();    // span{I, Z}
MatricialSystem rebit_system();       // span{I, X, Z}
MatricialSystem qubit_system();       // M_2
MatricialSystem full_system(std::size_t d);
// Real symmetric d x d matrices (d(d+1)/2 dimensional).
MatricialSystem real_symmetric_system(std::size_t d);

struct Envelope {
  std::size_t dim = 0;
  bool commutative = false;
  std::string name;
};

struct CatalogCase {
  std::string name;
  MatricialSystem system;
  Envelope envelope;
};

std::vector<CatalogCase> four_case_catalog();

// A[aI + bX + cZ] = omega (-c X + b Z).
SubsystemGenerator rebit_rotation(double omega);
// A[aI + bX + cZ] = -delta (b X + c Z); delta > 0.
SubsystemGenerator rebit_dissipative(double delta);

// i (omega / 2) [Y, .], the unique extension of rebit_rotation(omega).
Generator rotation_extension(double omega);

Generator g1(double delta);

enum class G2Prefactor {
  derived,  // 3/4: makes G2[X] = -delta X, G2[Y] = -delta Y, G2[Z] = -delta Z hold
  printed,  // 4/3; gives -(16/9) delta on X, Y, Z instead
};

double g2_prefactor(G2Prefactor p);
Generator g2(double delta, G2Prefactor p = G2Prefactor::derived);

// psi(B) = tr(rho B) I: a UCP map extending id on span{I} for every state rho.
SuperOp state_map(const CMatrix& rho);

}  // namespace ucpext::catalog
