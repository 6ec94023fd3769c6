#include "equilib/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace equilib {

namespace {

// Stage problem sharing the limit problem's matrix/g/field, with sigma
// masked to the stage index set (and optionally scaled).
Problem stage_problem(const Problem& base, const std::vector<int>& stage,
                      const Eigen::VectorXd& sigma_full, double scale) {
  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(base.size());
  for (int i : stage) {
    if (i < 0 || i >= base.size()) throw std::invalid_argument("stage index out of range");
    sigma[i] = scale * sigma_full[i];
  }
  return make_problem(base.matrix, base.g, base.field, DiscreteMeasure(std::move(sigma)));
}

bool stage_feasible(const Problem& base, const std::vector<int>& stage,
                    const Eigen::VectorXd& sigma_full, double scale) {
  double reachable = 0.0;
  for (int i : stage)
    if (base.f[i] < kInf) reachable += base.g[i] * scale * sigma_full[i];
  return reachable >= base.normalization * (1.0 - 1e-12);
}

Solution solve_stage(const Problem& p, const SolverOptions& opts,
                     const std::optional<DiscreteMeasure>& warm) {
  const Solution sol = solve(p, opts, warm);
  if (!sol.converged)
    throw std::runtime_error("stage solve did not converge (gap " + std::to_string(sol.gap) +
                             ")");
  return sol;
}

}  // namespace

FamilyRun run_decreasing_family(const Problem& p_limit, const SubsetFamily& family,
                                const std::vector<DiscreteMeasure>& sigma_schedule,
                                const SolverOptions& opts) {
  const size_t k = family.stages.size();
  if (k == 0) throw std::invalid_argument("family has no stages");
  if (sigma_schedule.size() != k)
    throw std::invalid_argument("sigma schedule length does not match stage count");

  // Stages must decrease and end at (a superset of nothing less than) the
  // limit support; the sigma schedule must decrease componentwise to the
  // limit sigma.
  for (size_t s = 0; s + 1 < k; ++s) {
    std::set<int> next(family.stages[s + 1].begin(), family.stages[s + 1].end());
    for (int i : next)
      if (!std::count(family.stages[s].begin(), family.stages[s].end(), i))
        throw std::invalid_argument("family stages must decrease");
  }
  for (size_t s = 0; s < k; ++s) {
    if (sigma_schedule[s].size() != p_limit.size())
      throw std::invalid_argument("sigma schedule entry size mismatch");
    const Eigen::VectorXd& cur = sigma_schedule[s].weights;
    if (s + 1 < k) {
      const Eigen::VectorXd& nxt = sigma_schedule[s + 1].weights;
      if (((cur - nxt).minCoeff()) < -1e-12)
        throw std::invalid_argument("sigma schedule must decrease componentwise");
    }
  }
  {
    // Every stage must dominate the limit problem (its feasible set contains
    // the limit's), otherwise "decrease to the limit" is violated outright.
    const Eigen::VectorXd& last = sigma_schedule.back().weights;
    std::set<int> final_stage(family.stages.back().begin(), family.stages.back().end());
    for (Eigen::Index i = 0; i < p_limit.size(); ++i) {
      const double masked = final_stage.count(static_cast<int>(i)) ? last[i] : 0.0;
      if (masked < p_limit.sigma.weights[i] - 1e-12)
        throw std::invalid_argument("sigma schedule drops below the limit sigma");
    }
  }

  FamilyRun run;
  const Solution limit_sol = solve_stage(p_limit, opts, std::nullopt);
  run.limit_value = limit_sol.value;
  run.limit_lambda = limit_sol.lambda;

  std::optional<DiscreteMeasure> warm;
  double prev_value = -kInf;
  for (size_t s = 0; s < k; ++s) {
    if (!stage_feasible(p_limit, family.stages[s], sigma_schedule[s].weights, 1.0))
      throw std::invalid_argument("infeasible stage " + std::to_string(s) +
                                  " in decreasing family");
    const Problem ps = stage_problem(p_limit, family.stages[s], sigma_schedule[s].weights, 1.0);
    const Solution sol = solve_stage(ps, opts, warm);
    warm = sol.lambda;

    StageResult res;
    res.id = "stage" + std::to_string(s);
    res.value = sol.value;
    res.lambda = sol.lambda;
    res.gap = sol.gap;
    run.stages.push_back(res);
    run.distances.push_back(strong_distance(*p_limit.matrix, sol.lambda, run.limit_lambda));

    if (s > 0) {
      // A-posteriori bound: the distance between consecutive equilibria is
      // controlled by the increase of the minimal values.
      const double d = strong_distance(*p_limit.matrix, sol.lambda, run.stages[s - 1].lambda);
      if (d * d > sol.value - prev_value + 1e-8) run.convex_bound_ok = false;
    }
    prev_value = sol.value;
  }

  run.monotone = true;
  for (size_t s = 0; s + 1 < k; ++s)
    if (run.stages[s + 1].value < run.stages[s].value - 1e-9) run.monotone = false;
  run.final_value_diff = std::abs(run.stages.back().value - run.limit_value);
  run.final_distance = run.distances.back();
  return run;
}

FamilyRun run_compact_exhaustion(const Problem& p, const SubsetFamily& family,
                                 const std::vector<double>& beta_schedule,
                                 const SolverOptions& opts) {
  const size_t k = family.stages.size();
  if (k == 0) throw std::invalid_argument("family has no stages");
  if (beta_schedule.size() != k)
    throw std::invalid_argument("beta schedule length does not match stage count");
  for (size_t s = 0; s < k; ++s) {
    if (beta_schedule[s] < 1.0 - 1e-12)
      throw std::invalid_argument("beta entries must be >= 1");
    if (s + 1 < k && beta_schedule[s + 1] > beta_schedule[s] + 1e-12)
      throw std::invalid_argument("beta schedule must decrease");
  }
  if (std::abs(beta_schedule.back() - 1.0) > 1e-6)
    throw std::invalid_argument("beta schedule must end at 1");
  for (size_t s = 0; s + 1 < k; ++s) {
    std::set<int> cur(family.stages[s].begin(), family.stages[s].end());
    for (int i : cur)
      if (!std::count(family.stages[s + 1].begin(), family.stages[s + 1].end(), i))
        throw std::invalid_argument("family stages must increase");
  }
  if (static_cast<Eigen::Index>(family.stages.back().size()) != p.size())
    throw std::invalid_argument("exhaustion must end at the full index set");

  FamilyRun run;
  const Solution limit_sol = solve_stage(p, opts, std::nullopt);
  run.limit_value = limit_sol.value;
  run.limit_lambda = limit_sol.lambda;

  std::optional<DiscreteMeasure> warm;
  for (size_t s = 0; s < k; ++s) {
    StageResult res;
    res.id = "stage" + std::to_string(s);
    // Early stages may carry too little sigma-mass; the beta device exists
    // to restore feasibility, so an infeasible stage is flagged and skipped.
    if (!stage_feasible(p, family.stages[s], p.sigma.weights, beta_schedule[s])) {
      res.feasible = false;
      res.skipped = true;
      res.lambda = DiscreteMeasure::zeros(p.size());
      run.stages.push_back(res);
      run.distances.push_back(kInf);
      continue;
    }
    const Problem ps = stage_problem(p, family.stages[s], p.sigma.weights, beta_schedule[s]);
    const Solution sol = solve_stage(ps, opts, warm);
    warm = sol.lambda;
    res.value = sol.value;
    res.lambda = sol.lambda;
    res.gap = sol.gap;
    run.stages.push_back(res);
    run.distances.push_back(strong_distance(*p.matrix, sol.lambda, run.limit_lambda));
  }

  run.monotone = true;  // values decrease toward the limit as stages grow
  double prev = kInf;
  for (size_t s = 0; s < k; ++s) {
    if (run.stages[s].skipped) continue;
    if (run.stages[s].value > prev + 1e-9) run.monotone = false;
    prev = run.stages[s].value;
  }
  run.final_value_diff = std::abs(run.stages.back().value - run.limit_value);
  run.final_distance = run.distances.back();
  return run;
}

}  // namespace equilib
