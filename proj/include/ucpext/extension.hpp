#pragma once

// Extension of UCP maps, generators, semigroups and groups from a matricial
// system V inside M_d to all of M_d.
//
// Every extension is a convex feasibility problem over Choi matrices, solved
// with Dykstra's algorithm: the limit is the Frobenius projection of the
// start point onto the feasible set, so different starts land on different
// extensions exactly when the extension is not unique.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ucpext/cpmaps.hpp"
#include "ucpext/dynamics.hpp"
#include "ucpext/errors.hpp"
#include "ucpext/opsys.hpp"

namespace ucpext {

enum class StartMode { deterministic, random };

struct ExtensionOptions {
  double tol = tol::kFeasibility;
  std::size_t max_iter = 200000;
  std::uint64_t seed = 0;
  StartMode start = StartMode::deterministic;
  // Standard deviation of the Hermitian Gaussian start perturbation.
  double perturbation = 1.0;
  // Choi matrix the start is built around; zero when absent.
  std::optional<CMatrix> anchor;
};

struct MapTarget {
  std::vector<CMatrix> images;  // phi(v_k) for the system's basis
};

class ExtensionProblem {
 public:
  // Map case: phi(e) = I is required.
  ExtensionProblem(MatricialSystem system, MapTarget target, ExtensionOptions options = {});
  // Generator case: A(e) = 0 is required.
  ExtensionProblem(SubsystemGenerator generator, ExtensionOptions options = {});

  const MatricialSystem& system() const noexcept { return system_; }
  bool is_generator_case() const noexcept { return std::holds_alternative<SubsystemGenerator>(target_); }
  const std::vector<CMatrix>& target_images() const;
  const SubsystemGenerator& generator() const;
  const ExtensionOptions& options() const noexcept { return options_; }
  ExtensionProblem with_options(ExtensionOptions options) const;

 private:
  MatricialSystem system_;
  std::variant<MapTarget, SubsystemGenerator> target_;
  ExtensionOptions options_;
};

struct ExtensionReport {
  std::size_t iterations = 0;
  double cone_residual = 0.0;
  double affine_residual = 0.0;
  // max_k |result(v_k) - target(v_k)|_F, recomputed by direct application.
  double restriction_error = 0.0;
  bool converged = false;
};

struct MapExtension {
  SuperOp map;
  ExtensionReport report;
};

struct GeneratorExtension {
  SuperOp generator;
  ExtensionReport report;
  Generator certified() const { return Generator(generator); }
};

MapExtension extend_ucp_map(const ExtensionProblem& problem);
GeneratorExtension extend_generator(const ExtensionProblem& problem);

enum class HBetaMode { series, closed };

// H_beta[phi] = sum_k beta (1 - beta)^k phi^{k+1}. Requires phi UCP.
SuperOp hbeta(const SuperOp& phi, double beta, HBetaMode mode = HBetaMode::closed,
              double tol = tol::kFeasibility);
// Number of series terms used for a given beta and tolerance.
std::size_t hbeta_series_terms(double beta, double tol);

struct ResolventFamily {
  double omega = 0.0;
  SuperOp f_omega;
  std::vector<double> grid;
  std::vector<SuperOp> f;  // F(lambda) = H_{lambda / omega}[F(omega)]
  double max_ucp_defect = 0.0;
  double max_hilbert_residual = 0.0;       // |(l F(m) - m F(l)) / (l - m) - F(l) F(m)|
  double max_restriction_error = 0.0;      // |F(l) o i - i o l R(l, A)|
  double generator_spread = 0.0;           // max pairwise |G_l - G_m|
};

struct ResolventFamilyExtension {
  bool success = false;
  SuperOp generator;
  ResolventFamily family;
  ExtensionReport report;
  std::size_t attempts = 0;
  std::string failure;
};

// Builds F(omega) extending omega R(omega, A), transports it over the grid
// with H_beta, recovers G = lambda (id - F(lambda)^{-1}) and accepts it once
// it is ccp; otherwise omega is doubled, up to 2^10 times the initial value.
ResolventFamilyExtension extend_via_resolvent_family(const ExtensionProblem& problem, double omega,
                                                     const std::vector<double>& grid);

struct GroupExtension {
  bool success = false;
  SuperOp generator;        // extension of +A
  SuperOp inverse_generator;  // extension of -A
  ExtensionReport report;
  double inverse_defect = 0.0;      // max_t |Psi_+(t) Psi_-(t) - id|_F
  double uniqueness_spread = 0.0;   // max pairwise distance over randomized starts
  double multiplicativity_defect = 0.0;
  std::size_t starts = 0;
  std::string failure;
};

struct GroupOptions {
  std::size_t starts = 8;
  std::vector<double> times{0.5, 1.0, 2.0};
  // Tolerance on the derived checks (inverse, multiplicativity); defaults to
  // 100 * problem tol.
  std::optional<double> check_tol;
};

GroupExtension extend_group(const ExtensionProblem& problem, const GroupOptions& options = {});

struct RigidityReport {
  std::size_t starts = 0;
  std::size_t converged = 0;
  double max_pairwise_distance = 0.0;
  double max_distance_to_identity = 0.0;
  bool all_identity = false;
  std::vector<SuperOp> extensions;
};

// Heuristic: extends id_V from randomized starts and checks whether every
// converged extension is the identity of M_d.
RigidityReport rigidity_probe(const MatricialSystem& system, std::size_t starts, std::uint64_t seed,
                              double tol = tol::kFeasibility);

struct DiscreteExtension {
  std::vector<SuperOp> powers;             // psi^0 .. psi^n
  std::vector<double> restriction_errors;  // |psi^k o i - i o phi^k|
  ExtensionReport report;
};

DiscreteExtension extend_discrete(const MatricialSystem& system, const MapTarget& phi,
                                  std::size_t horizon, const ExtensionOptions& options = {});

// Matrix of a map on V (given by basis images) in V's orthonormal basis.
CMatrix coordinate_matrix(const MatricialSystem& system, const std::vector<CMatrix>& images);

// max_k |psi(v_k) - images_k|_F.
double restriction_error(const SuperOp& psi, const MatricialSystem& system,
                         const std::vector<CMatrix>& images);

// UCP maps are contractive: checks |phi(v)| <= |v| on basis elements and
// seeded random Hermitian members.
bool contractive_on_system(const MatricialSystem& system, const std::vector<CMatrix>& images,
                           double tol, std::uint64_t seed = 11);

}  // namespace ucpext
