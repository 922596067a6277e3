#include "tcmv/optimizer.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace tcmv {

void SearchConfig::validate() const {
  if (lattice_per_axis < 1) throw std::invalid_argument("lattice_per_axis must be >= 1");
  if (!(step_init > 0.0)) throw std::invalid_argument("step_init must be positive");
  if (!(step_shrink > 0.0 && step_shrink < 1.0))
    throw std::invalid_argument("step_shrink must lie in (0, 1)");
  if (!(step_tol > 0.0)) throw std::invalid_argument("step_tol must be positive");
  if (max_evals < 1) throw std::invalid_argument("max_evals must be >= 1");
}

namespace {

// Side-specific feasible region. The plus branch searches the cone itself; the
// minus branch searches its lineality space (see cone.hpp).
struct Region {
  const ConeConstraint* cone = nullptr;  // nullptr: all of R^n
  Side side = Side::plus;
  Eigen::MatrixXd lineality;  // projector, minus side only

  bool active() const { return cone != nullptr && !cone->unconstrained(); }

  Eigen::VectorXd repair(const Eigen::VectorXd& u) const {
    if (!active()) return u;
    if (side == Side::plus) return cone->project(u);
    return lineality * u;
  }
};

struct Searcher {
  const StageContext& ctx;
  Side side;
  double gamma;
  const NextCoeffs& next;
  const Region& region;
  long evals = 0;
  long budget = 0;

  double eval(const Eigen::VectorXd& K) {
    ++evals;
    return eval_stage_objective(ctx, side, gamma, next, K);
  }

  bool exhausted() const { return evals >= budget; }
};

// Compass search with step halving from one seed. The poll is the full set of
// 2n coordinate moves; the best strictly improving one wins. Trial points are
// repaired into the region before evaluation.
struct LocalResult {
  Eigen::VectorXd K;
  double value = 0.0;
  bool converged = false;
};

LocalResult compass_from(Searcher& s, const Region& region, Eigen::VectorXd K, double f0,
                         const SearchConfig& cfg) {
  const int n = static_cast<int>(K.size());
  double step = cfg.step_init;
  double f = f0;

  while (step >= cfg.step_tol && !s.exhausted()) {
    bool improved = false;
    Eigen::VectorXd best_trial;
    double best_value = f;
    for (int j = 0; j < n && !s.exhausted(); ++j) {
      for (const double sign : {+1.0, -1.0}) {
        Eigen::VectorXd trial = K;
        trial[j] += sign * step;
        trial = region.repair(trial);
        if ((trial - K).lpNorm<Eigen::Infinity>() == 0.0) continue;  // repaired back onto K
        const double ft = s.eval(trial);
        if (ft < best_value) {
          best_value = ft;
          best_trial = std::move(trial);
          improved = true;
        }
        if (s.exhausted()) break;
      }
    }
    if (improved) {
      K = std::move(best_trial);
      f = best_value;
    } else {
      step *= cfg.step_shrink;
    }
  }

  LocalResult out;
  out.K = std::move(K);
  out.value = f;
  out.converged = step < cfg.step_tol;
  return out;
}

// Coordinate parabola refinement for the smooth basin around a compass
// minimizer; keeps the point feasible and never accepts a worse value.
void polish(Searcher& s, const Region& region, Eigen::VectorXd& K, double& f,
            const SearchConfig& cfg) {
  const int n = static_cast<int>(K.size());
  double h = 1e-4;
  for (int round = 0; round < cfg.polish_rounds && !s.exhausted(); ++round) {
    bool moved = false;
    for (int j = 0; j < n && !s.exhausted(); ++j) {
      Eigen::VectorXd lo = K, hi = K;
      lo[j] -= h;
      hi[j] += h;
      lo = region.repair(lo);
      hi = region.repair(hi);
      if ((lo - K).lpNorm<Eigen::Infinity>() == 0.0 || (hi - K).lpNorm<Eigen::Infinity>() == 0.0)
        continue;
      const double fl = s.eval(lo);
      const double fh = s.eval(hi);
      const double denom = fl - 2.0 * f + fh;
      if (denom <= 0.0) continue;  // no convex curvature signal along this axis
      const double shift = 0.5 * h * (fl - fh) / denom;
      if (!std::isfinite(shift) || std::abs(shift) > 4.0 * h) continue;
      Eigen::VectorXd trial = K;
      trial[j] += shift;
      trial = region.repair(trial);
      const double ft = s.eval(trial);
      if (ft < f) {
        K = std::move(trial);
        f = ft;
        moved = true;
      }
    }
    if (!moved) h *= 0.1;
    if (h < 1e-8) break;
  }
}

std::string axis_label(int idx, const Eigen::VectorXd& point) {
  std::ostringstream os;
  os << "lattice[" << idx << "]";
  (void)point;
  return os.str();
}

StageSolveResult solve_stage_impl(const StageContext& ctx, Side side, double gamma,
                                  const NextCoeffs& next, const SearchConfig& cfg,
                                  const Region& region, const Eigen::VectorXd* warm_start) {
  cfg.validate();
  const int n = static_cast<int>(ctx.excess->cols());
  const PeriodMoments& pm = *ctx.moments;

  // Seed 1: minimizer of the stage objective when all downstream coefficients
  // vanish (exact at the last stage, a good guess elsewhere).
  const double side_sign = side == Side::plus ? 1.0 : -1.0;
  Eigen::VectorXd analytic =
      side_sign * (gamma / 2.0) * pm.cov.ldlt().solve(pm.mean) / ctx.rho_next;

  std::vector<std::pair<std::string, Eigen::VectorXd>> seeds;
  seeds.emplace_back("analytic", analytic);
  if (warm_start != nullptr) seeds.emplace_back("warm_start", *warm_start);
  seeds.emplace_back("origin", Eigen::VectorXd::Zero(n));

  const double box = 4.0 * analytic.norm() + 1.0;
  const int per_axis = cfg.lattice_per_axis;
  long lattice_count = 1;
  for (int j = 0; j < n && lattice_count <= 1024; ++j) lattice_count *= per_axis;
  if (lattice_count <= 1024) {
    std::vector<long> idx(n, 0);
    for (long c = 0; c < lattice_count; ++c) {
      Eigen::VectorXd point(n);
      long rem = c;
      for (int j = 0; j < n; ++j) {
        idx[j] = rem % per_axis;
        rem /= per_axis;
        point[j] = per_axis == 1 ? 0.0 : -box + 2.0 * box * idx[j] / (per_axis - 1);
      }
      seeds.emplace_back(axis_label(static_cast<int>(c), point), std::move(point));
    }
  } else {
    // High dimensions: axis-aligned seeds only.
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd point = Eigen::VectorXd::Zero(n);
      point[j] = box;
      seeds.emplace_back(axis_label(2 * j, point), point);
      point[j] = -box;
      seeds.emplace_back(axis_label(2 * j + 1, point), point);
    }
  }

  // Repair seeds into the region, then drop exact duplicates (keeps the first
  // occurrence, so seed precedence is stable).
  std::vector<std::pair<std::string, Eigen::VectorXd>> unique_seeds;
  for (auto& [label, point] : seeds) {
    Eigen::VectorXd repaired = region.repair(point);
    const bool duplicate =
        std::any_of(unique_seeds.begin(), unique_seeds.end(), [&](const auto& other) {
          return (other.second - repaired).template lpNorm<Eigen::Infinity>() <= 1e-14;
        });
    if (!duplicate) unique_seeds.emplace_back(label, std::move(repaired));
  }

  Searcher searcher{ctx, side, gamma, next, region};
  searcher.budget = cfg.max_evals;
  const long per_seed = std::max<long>(1, cfg.max_evals / static_cast<long>(unique_seeds.size()));

  StageSolveResult result;
  result.seed_labels.reserve(unique_seeds.size());
  result.seed_objectives.reserve(unique_seeds.size());
  bool have_winner = false;
  bool winner_converged = false;

  for (const auto& [label, seed_point] : unique_seeds) {
    const double f_seed = searcher.eval(seed_point);
    result.seed_labels.push_back(label);
    result.seed_objectives.push_back(f_seed);

    const long seed_budget = std::min(searcher.evals + per_seed, cfg.max_evals);
    searcher.budget = seed_budget;
    LocalResult local = compass_from(searcher, region, seed_point, f_seed, cfg);
    if (!have_winner || local.value < result.objective) {
      result.K = local.K;
      result.objective = local.value;
      result.winner_seed = label;
      winner_converged = local.converged;
      have_winner = true;
    }
  }

  // Final polish of the overall winner with the remaining budget.
  searcher.budget = cfg.max_evals;
  polish(searcher, region, result.K, result.objective, cfg);

  result.evaluations = searcher.evals;
  result.converged = winner_converged;
  return result;
}

}  // namespace

StageSolveResult solve_stage_unconstrained(const StageContext& ctx, Side side, double gamma,
                                           const NextCoeffs& next, const SearchConfig& cfg,
                                           const Eigen::VectorXd* warm_start) {
  Region region;
  return solve_stage_impl(ctx, side, gamma, next, cfg, region, warm_start);
}

StageSolveResult solve_stage_cone(const StageContext& ctx, Side side, double gamma,
                                  const NextCoeffs& next, const ConeConstraint& cone,
                                  const SearchConfig& cfg, const Eigen::VectorXd* warm_start) {
  Region region;
  region.cone = &cone;
  region.side = side;
  if (side == Side::minus && !cone.unconstrained())
    region.lineality = cone.lineality_projector(static_cast<int>(ctx.excess->cols()));
  return solve_stage_impl(ctx, side, gamma, next, cfg, region, warm_start);
}

SolveOutput backward_solve(const MarketSpec& spec, const RiskAversionSpec& risk,
                           const std::optional<ConeConstraint>& cone, const ScenarioSet& sc,
                           const SearchConfig& cfg) {
  spec.validate();
  risk.validate(spec.horizon);
  cfg.validate();
  if (sc.horizon() != spec.horizon || sc.assets() != spec.assets)
    throw std::invalid_argument("scenario set does not match the market spec");
  if (cone && !cone->unconstrained() && cone->A.cols() != spec.assets)
    throw std::invalid_argument("cone constraint column count does not match asset count");

  const int T = spec.horizon;
  const DiscountCurve curve = discount_curve(spec.riskfree);

  SolveOutput out;
  out.coeffs = CoefficientTable::zeros(T);
  out.policy.horizon = T;
  out.policy.assets = spec.assets;
  out.policy.target = risk.target;
  out.policy.riskfree = spec.riskfree;
  out.policy.curve = curve;
  out.policy.K_plus.resize(T);
  out.policy.K_minus.resize(T);
  out.policy.constrained = cone.has_value() && !cone->unconstrained();
  if (out.policy.constrained) out.policy.cone = cone;

  const Eigen::VectorXd* warm_plus = nullptr;
  const Eigen::VectorXd* warm_minus = nullptr;

  for (int t = T - 1; t >= 0; --t) {
    const StageContext ctx = StageContext::at(sc, spec.riskfree, curve, t);
    const NextCoeffs next = NextCoeffs::at(out.coeffs, t + 1);

    StageSolveResult plus, minus;
    if (out.policy.constrained) {
      plus = solve_stage_cone(ctx, Side::plus, risk.gamma_plus[t], next, *cone, cfg, warm_plus);
      minus = solve_stage_cone(ctx, Side::minus, risk.gamma_minus[t], next, *cone, cfg, warm_minus);
    } else {
      plus = solve_stage_unconstrained(ctx, Side::plus, risk.gamma_plus[t], next, cfg, warm_plus);
      minus =
          solve_stage_unconstrained(ctx, Side::minus, risk.gamma_minus[t], next, cfg, warm_minus);
    }

    out.policy.K_plus[t] = plus.K;
    out.policy.K_minus[t] = minus.K;
    update_coefficients(t, plus.K, minus.K, out.coeffs, sc, spec.riskfree, curve);

    const double margin_plus = out.coeffs.b_plus[t] - out.coeffs.a_plus[t] * out.coeffs.a_plus[t];
    const double margin_minus =
        out.coeffs.b_minus[t] - out.coeffs.a_minus[t] * out.coeffs.a_minus[t];
    for (const auto* r : {&plus, &minus}) {
      StageDiagnostics d;
      d.t = t;
      d.side = r == &plus ? Side::plus : Side::minus;
      d.evaluations = r->evaluations;
      d.converged = r->converged;
      d.winner_seed = r->winner_seed;
      d.objective = r->objective;
      d.validity_margin = r == &plus ? margin_plus : margin_minus;
      out.diagnostics.push_back(std::move(d));
    }

    if (margin_plus < -1e-8)
      throw SolveError("validity check b - a^2 failed at t=" + std::to_string(t) + " side=plus");
    if (margin_minus < -1e-8)
      throw SolveError("validity check b - a^2 failed at t=" + std::to_string(t) + " side=minus");

    warm_plus = &out.policy.K_plus[t];
    warm_minus = &out.policy.K_minus[t];
  }

  return out;
}

}  // namespace tcmv
