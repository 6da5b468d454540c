#include "ucpext/extension.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ucpext/feasibility.hpp"

namespace ucpext {

namespace {

CMatrix random_hermitian(std::size_t n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  CMatrix m(n, n);
  for (auto& z : m.data()) z = cplx{g(rng), g(rng)};
  return hermitian_part(m);
}

CMatrix start_point(std::size_t d, const ExtensionOptions& o) {
  const std::size_t n = d * d;
  CMatrix start = o.anchor ? *o.anchor : CMatrix(n, n);
  if (start.rows() != n || start.cols() != n) throw InputError("extension: anchor has wrong shape");
  if (o.start == StartMode::random) start += random_hermitian(n, o.perturbation, o.seed);
  return start;
}

std::vector<ChoiConstraint> agreement_constraints(const MatricialSystem& sys,
                                                  const std::vector<CMatrix>& images) {
  std::vector<ChoiConstraint> cons;
  for (std::size_t k = 0; k < sys.dim(); ++k) cons.push_back({sys.basis()[k], images[k]});
  return cons;
}

ExtensionReport to_report(const DykstraResult& r, double restriction) {
  ExtensionReport rep;
  rep.iterations = r.iterations;
  rep.cone_residual = r.cone_residual;
  rep.affine_residual = r.affine_residual;
  rep.restriction_error = restriction;
  rep.converged = r.converged;
  return rep;
}

CMatrix apply_on_system(const MatricialSystem& sys, const std::vector<CMatrix>& images,
                        const CMatrix& v) {
  const auto c = sys.coordinates(v);
  CMatrix out(sys.ambient_dim(), sys.ambient_dim());
  for (std::size_t k = 0; k < c.size(); ++k) out += c[k] * images[k];
  return out;
}

double ucp_defect(const SuperOp& phi) {
  const double unital = frobenius_distance(apply(phi, CMatrix::identity(phi.d())), CMatrix::identity(phi.d()));
  const double neg = -std::min(0.0, min_eigenvalue(HermMatrix(hermitian_part(phi.choi()), 1.0)));
  return std::max({unital, neg, hermiticity_defect(phi.choi())});
}

SuperOp recover_generator(const SuperOp& f, double lambda) {
  const std::size_t n = f.d() * f.d();
  return SuperOp::from_matrix(f.d(), lambda * (CMatrix::identity(n) - inverse(f.matrix())));
}

}  // namespace

ExtensionProblem::ExtensionProblem(MatricialSystem system, MapTarget target, ExtensionOptions options)
    : system_(std::move(system)), target_(std::move(target)), options_(std::move(options)) {
  const auto& images = std::get<MapTarget>(target_).images;
  if (images.size() != system_.dim()) throw InputError("ExtensionProblem: one image per basis element");
  for (const auto& m : images)
    if (m.rows() != system_.ambient_dim() || m.cols() != system_.ambient_dim())
      throw InputError("ExtensionProblem: image has wrong shape");
  const CMatrix id = CMatrix::identity(system_.ambient_dim());
  const CMatrix unit_image = apply_on_system(system_, images, id);
  if (frobenius_distance(unit_image, id) > options_.tol)
    throw InputError("ExtensionProblem: target map is not unital");
}

ExtensionProblem::ExtensionProblem(SubsystemGenerator generator, ExtensionOptions options)
    : system_(generator.system()), target_(std::move(generator)), options_(std::move(options)) {
  const CMatrix id = CMatrix::identity(system_.ambient_dim());
  if (std::get<SubsystemGenerator>(target_).apply(id).frobenius_norm() > options_.tol)
    throw InputError("ExtensionProblem: generator does not annihilate the unit");
}

const std::vector<CMatrix>& ExtensionProblem::target_images() const {
  if (const auto* m = std::get_if<MapTarget>(&target_)) return m->images;
  return std::get<SubsystemGenerator>(target_).images();
}

const SubsystemGenerator& ExtensionProblem::generator() const {
  if (const auto* g = std::get_if<SubsystemGenerator>(&target_)) return *g;
  throw InputError("ExtensionProblem: not a generator problem");
}

ExtensionProblem ExtensionProblem::with_options(ExtensionOptions options) const {
  ExtensionProblem p = *this;
  p.options_ = std::move(options);
  return p;
}

double restriction_error(const SuperOp& psi, const MatricialSystem& system,
                         const std::vector<CMatrix>& images) {
  double worst = 0.0;
  for (std::size_t k = 0; k < system.dim(); ++k)
    worst = std::max(worst, frobenius_distance(apply(psi, system.basis()[k]), images[k]));
  return worst;
}

MapExtension extend_ucp_map(const ExtensionProblem& problem) {
  if (problem.is_generator_case()) throw InputError("extend_ucp_map: problem is a generator problem");
  const auto& sys = problem.system();
  const std::size_t d = sys.ambient_dim();
  const auto& opts = problem.options();
  const AffineSubspace affine = choi_agreement_subspace(d, agreement_constraints(sys, problem.target_images()));
  const DykstraResult r =
      dykstra(ConeKind::psd, d, affine, start_point(d, opts), {opts.tol, opts.max_iter});
  SuperOp psi(d, r.choi);
  const double err = restriction_error(psi, sys, problem.target_images());
  return {std::move(psi), to_report(r, err)};
}

GeneratorExtension extend_generator(const ExtensionProblem& problem) {
  if (!problem.is_generator_case()) throw InputError("extend_generator: problem is a map problem");
  const auto& sys = problem.system();
  const std::size_t d = sys.ambient_dim();
  const auto& opts = problem.options();
  const AffineSubspace affine = choi_agreement_subspace(d, agreement_constraints(sys, problem.target_images()));
  const DykstraResult r =
      dykstra(ConeKind::ccp, d, affine, start_point(d, opts), {opts.tol, opts.max_iter});
  SuperOp g(d, r.choi);
  const double err = restriction_error(g, sys, problem.target_images());
  return {std::move(g), to_report(r, err)};
}

std::size_t hbeta_series_terms(double beta, double tol) {
  if (!(beta > 0.0 && beta <= 1.0)) throw InputError("hbeta: beta must lie in (0, 1]");
  if (!(tol > 0.0 && tol < 1.0)) throw InputError("hbeta: tolerance must lie in (0, 1)");
  std::size_t k = 0;
  double tail = 1.0 - beta;  // (1 - beta)^{k+1}
  while (tail > tol) {
    tail *= 1.0 - beta;
    ++k;
  }
  return k + 1;
}

SuperOp hbeta(const SuperOp& phi, double beta, HBetaMode mode, double tol) {
  if (!(beta > 0.0 && beta <= 1.0)) throw InputError("hbeta: beta must lie in (0, 1]");
  if (!is_ucp(phi, std::max(10.0 * tol, 1e-7)))
    throw InputError("hbeta: input map is not unital completely positive");
  const std::size_t d = phi.d();
  const std::size_t n = d * d;
  const CMatrix s = phi.matrix();
  if (mode == HBetaMode::closed) {
    const CMatrix base = CMatrix::identity(n) - (1.0 - beta) * s;
    CMatrix inv;
    try {
      inv = inverse(base);
    } catch (const NumericalError& e) {
      throw NumericalError("hbeta: id - (1 - beta) phi is singular; the UCP certificate is invalid",
                           e.condition());
    }
    return SuperOp::from_matrix(d, beta * (s * inv));
  }
  const std::size_t terms = hbeta_series_terms(beta, tol);
  CMatrix sum(n, n);
  CMatrix pw = s;  // phi^{k+1}
  double coef = beta;
  for (std::size_t k = 0; k < terms; ++k) {
    sum += coef * pw;
    pw = pw * s;
    coef *= 1.0 - beta;
  }
  return SuperOp::from_matrix(d, sum);
}

CMatrix coordinate_matrix(const MatricialSystem& system, const std::vector<CMatrix>& images) {
  const auto& onb = system.orthonormal_basis();
  const std::size_t n = onb.size();
  CMatrix m(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const CMatrix image = apply_on_system(system, images, onb[k]);
    for (std::size_t j = 0; j < n; ++j) m(j, k) = hs_inner(onb[j], image);
  }
  return m;
}

bool contractive_on_system(const MatricialSystem& system, const std::vector<CMatrix>& images,
                           double tol, std::uint64_t seed) {
  std::vector<CMatrix> samples(system.basis().begin(), system.basis().end());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int s = 0; s < 16; ++s) {
    CMatrix v(system.ambient_dim(), system.ambient_dim());
    for (const auto& b : system.basis()) v += g(rng) * b;
    samples.push_back(std::move(v));
  }
  for (const auto& v : samples) {
    const double before = spectral_norm(v);
    const double after = spectral_norm(apply_on_system(system, images, v));
    if (after > before * (1.0 + tol) + tol) return false;
  }
  return true;
}

ResolventFamilyExtension extend_via_resolvent_family(const ExtensionProblem& problem, double omega,
                                                     const std::vector<double>& grid) {
  const auto& a = problem.generator();
  const auto& sys = problem.system();
  const double tol = problem.options().tol;
  if (!(omega > 0.0)) throw InputError("extend_via_resolvent_family: omega must be positive");
  for (double l : grid)
    if (!(l > 0.0 && l <= omega)) throw InputError("extend_via_resolvent_family: grid must lie in (0, omega]");

  ResolventFamilyExtension out;
  constexpr int kMaxDoublings = 10;
  for (int attempt = 0; attempt <= kMaxDoublings; ++attempt) {
    const double w = std::ldexp(omega, attempt);
    out.attempts = static_cast<std::size_t>(attempt) + 1;
    ExtensionOptions opts = problem.options();
    // F(lambda) tends to id as lambda grows; start from the identity so the
    // selected extension is the one closest to that limit.
    if (!opts.anchor) opts.anchor = SuperOp::identity(sys.ambient_dim()).choi();
    const ExtensionProblem map_problem(sys, MapTarget{subsystem_scaled_resolvent(a, w)}, opts);
    MapExtension fw = extend_ucp_map(map_problem);
    out.report = fw.report;
    if (!fw.report.converged) {
      std::ostringstream os;
      os << "extension of omega R(omega, A) did not converge at omega = " << w;
      out.failure = os.str();
      return out;
    }

    ResolventFamily fam;
    fam.omega = w;
    fam.f_omega = fw.map;
    fam.grid = grid;
    fam.max_ucp_defect = ucp_defect(fw.map);
    std::vector<SuperOp> gens;
    for (double l : grid) {
      SuperOp f = hbeta(fw.map, l / w, HBetaMode::closed, tol);
      fam.max_ucp_defect = std::max(fam.max_ucp_defect, ucp_defect(f));
      fam.max_restriction_error = std::max(
          fam.max_restriction_error, restriction_error(f, sys, subsystem_scaled_resolvent(a, l)));
      gens.push_back(recover_generator(f, l));
      fam.f.push_back(std::move(f));
    }
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = i + 1; j < grid.size(); ++j) {
        const double l = grid[i];
        const double m = grid[j];
        if (l == m) continue;
        const CMatrix lhs = (1.0 / (l - m)) * (l * fam.f[j].matrix() - m * fam.f[i].matrix());
        const CMatrix rhs = fam.f[i].matrix() * fam.f[j].matrix();
        fam.max_hilbert_residual = std::max(fam.max_hilbert_residual, frobenius_distance(lhs, rhs));
        fam.generator_spread = std::max(fam.generator_spread, distance(gens[i], gens[j]));
      }

    SuperOp g = recover_generator(fw.map, w);
    const bool ccp = is_conditionally_completely_positive(g, tol);
    out.generator = std::move(g);
    out.family = std::move(fam);
    if (ccp) {
      out.success = true;
      out.failure.clear();
      return out;
    }
  }
  out.failure =
      "omega cap reached without a ccp generator; use extend_generator (direct generator extension)";
  return out;
}

GroupExtension extend_group(const ExtensionProblem& problem, const GroupOptions& options) {
  const auto& a = problem.generator();
  const auto& opts = problem.options();
  const double check_tol = options.check_tol.value_or(100.0 * opts.tol);
  GroupExtension out;
  out.starts = options.starts;

  const SubsystemGenerator minus = a.negated();
  ValidationOptions vo;
  vo.tol = opts.tol;
  vo.max_iter = opts.max_iter;
  for (const auto* gen : {&a, &minus}) {
    const ValidationReport v = validate_subsystem_semigroup(*gen, vo);
    if (!v.valid) {
      out.failure = std::string("not a group on V: ") + (gen == &a ? "+A" : "-A") +
                    " does not generate a UCP semigroup (" + v.reason + ")";
      return out;
    }
  }

  ExtensionOptions det = opts;
  det.start = StartMode::deterministic;
  GeneratorExtension plus_ext = extend_generator(ExtensionProblem(a, det));
  GeneratorExtension minus_ext = extend_generator(ExtensionProblem(minus, det));
  out.generator = plus_ext.generator;
  out.inverse_generator = minus_ext.generator;
  out.report = plus_ext.report;
  if (!plus_ext.report.converged || !minus_ext.report.converged) {
    out.failure = "generator extension did not converge";
    return out;
  }

  const std::size_t d = a.system().ambient_dim();
  const Generator gp(plus_ext.generator);
  const Generator gm(minus_ext.generator);
  for (double t : options.times) {
    const SuperOp prod = compose(evolve(gp, t), evolve(gm, t));
    out.inverse_defect = std::max(out.inverse_defect, distance(prod, SuperOp::identity(d)));
  }
  if (out.inverse_defect > check_tol) {
    out.failure = "not a group on V: extensions of +A and -A are not inverse";
    return out;
  }

  std::vector<SuperOp> runs{plus_ext.generator};
  for (std::size_t s = 0; s < options.starts; ++s) {
    ExtensionOptions ro = opts;
    ro.start = StartMode::random;
    ro.seed = opts.seed + 1 + s;
    GeneratorExtension e = extend_generator(ExtensionProblem(a, ro));
    if (!e.report.converged) {
      out.failure = "randomized generator extension did not converge";
      return out;
    }
    runs.push_back(std::move(e.generator));
  }
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (std::size_t j = i + 1; j < runs.size(); ++j)
      out.uniqueness_spread = std::max(out.uniqueness_spread, distance(runs[i], runs[j]));

  std::mt19937_64 rng(opts.seed + 7919);
  std::normal_distribution<double> g;
  for (double t : options.times) {
    const SuperOp psi = evolve(gp, t);
    for (int k = 0; k < 4; ++k) {
      CMatrix m1(d, d), m2(d, d);
      for (auto& z : m1.data()) z = cplx{g(rng), g(rng)};
      for (auto& z : m2.data()) z = cplx{g(rng), g(rng)};
      const double defect = frobenius_distance(apply(psi, m1 * m2), apply(psi, m1) * apply(psi, m2));
      out.multiplicativity_defect = std::max(out.multiplicativity_defect, defect / (1.0 + (m1 * m2).frobenius_norm()));
    }
  }

  if (out.uniqueness_spread > 10.0 * opts.tol) {
    std::ostringstream os;
    os << "extension is not unique across starts (spread " << out.uniqueness_spread
       << "); the envelope may not be rigid";
    out.failure = os.str();
    return out;
  }
  if (out.multiplicativity_defect > check_tol) {
    out.failure = "extended group is not multiplicative";
    return out;
  }
  out.success = true;
  return out;
}

RigidityReport rigidity_probe(const MatricialSystem& system, std::size_t starts, std::uint64_t seed,
                              double tol) {
  RigidityReport out;
  out.starts = starts;
  const std::size_t d = system.ambient_dim();
  const SuperOp id = SuperOp::identity(d);
  for (std::size_t s = 0; s < starts; ++s) {
    ExtensionOptions o;
    o.tol = tol;
    o.start = StartMode::random;
    o.seed = seed + s;
    MapExtension e = extend_ucp_map(ExtensionProblem(system, MapTarget{system.basis()}, o));
    if (!e.report.converged) continue;
    ++out.converged;
    out.max_distance_to_identity = std::max(out.max_distance_to_identity, distance(e.map, id));
    out.extensions.push_back(std::move(e.map));
  }
  for (std::size_t i = 0; i < out.extensions.size(); ++i)
    for (std::size_t j = i + 1; j < out.extensions.size(); ++j)
      out.max_pairwise_distance =
          std::max(out.max_pairwise_distance, distance(out.extensions[i], out.extensions[j]));
  out.all_identity = out.converged == starts && starts > 0 && out.max_distance_to_identity <= 100.0 * tol;
  return out;
}

DiscreteExtension extend_discrete(const MatricialSystem& system, const MapTarget& phi,
                                  std::size_t horizon, const ExtensionOptions& options) {
  MapExtension e = extend_ucp_map(ExtensionProblem(system, phi, options));
  if (!e.report.converged)
    throw NumericalError("extend_discrete: the map admits no UCP extension within the iteration budget");
  DiscreteExtension out;
  out.report = e.report;
  const CMatrix coords = coordinate_matrix(system, phi.images);
  CMatrix coord_power = CMatrix::identity(coords.rows());
  SuperOp psi_power = SuperOp::identity(system.ambient_dim());
  for (std::size_t k = 0; k <= horizon; ++k) {
    const auto images = subsystem_map_images(system, coord_power);
    out.restriction_errors.push_back(restriction_error(psi_power, system, images));
    out.powers.push_back(psi_power);
    psi_power = compose(e.map, psi_power);
    coord_power = coords * coord_power;
  }
  return out;
}

ValidationReport validate_subsystem_semigroup(const SubsystemGenerator& a, const ValidationOptions& options) {
  ValidationReport rep;
  const auto& sys = a.system();
  const CMatrix id = CMatrix::identity(sys.ambient_dim());
  rep.unital_residual = a.apply(id).frobenius_norm();
  rep.unital_kernel = rep.unital_residual <= options.tol;
  if (!rep.unital_kernel) {
    rep.reason = "A(e) != 0";
    return rep;
  }
  bool all_ok = true;
  auto check = [&](const std::string& kind, double param, const std::vector<CMatrix>& images) {
    ValidationSample s;
    s.kind = kind;
    s.parameter = param;
    s.contractive = contractive_on_system(sys, images, options.tol);
    if (!s.contractive) {
      s.note = "not contractive";
      all_ok = false;
      rep.samples.push_back(std::move(s));
      return;
    }
    ExtensionOptions eo;
    eo.tol = options.tol;
    eo.max_iter = options.max_iter;
    const MapExtension e = extend_ucp_map(ExtensionProblem(sys, MapTarget{images}, eo));
    s.feasible = e.report.converged;
    s.iterations = e.report.iterations;
    s.residual = std::max({e.report.cone_residual, e.report.affine_residual, e.report.restriction_error});
    if (!s.feasible) {
      s.note = "no UCP extension found";
      all_ok = false;
    }
    rep.samples.push_back(std::move(s));
  };
  for (double l : options.lambdas) {
    std::vector<CMatrix> images;
    try {
      images = subsystem_scaled_resolvent(a, l);
    } catch (const NumericalError&) {
      ValidationSample s;
      s.kind = "lambda";
      s.parameter = l;
      s.note = "lambda in the spectrum of A";
      rep.samples.push_back(std::move(s));
      all_ok = false;
      continue;
    }
    check("lambda", l, images);
  }
  for (double t : options.times) check("t", t, subsystem_evolve(a, t));
  rep.valid = all_ok;
  if (!all_ok) {
    for (const auto& s : rep.samples)
      if (!s.note.empty()) {
        std::ostringstream os;
        os << s.note << " at " << s.kind << " = " << s.parameter;
        rep.reason = os.str();
        break;
      }
  }
  return rep;
}

}  // namespace ucpext
