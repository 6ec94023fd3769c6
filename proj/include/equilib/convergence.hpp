#pragma once

#include <string>
#include <vector>

#include "equilib/solver.hpp"

namespace equilib {

struct StageResult {
  std::string id;
  double value = 0.0;
  DiscreteMeasure lambda;
  double gap = 0.0;
  bool feasible = true;
  bool skipped = false;
};

/// One run along a finite chain of stage problems, together with the
/// directly solved limit problem it is compared against.
struct FamilyRun {
  std::vector<StageResult> stages;
  double limit_value = 0.0;
  DiscreteMeasure limit_lambda;
  std::vector<double> distances;  // strong distance of each stage to the limit
  bool monotone = false;          // stage values nondecreasing along the chain
  bool convex_bound_ok = true;    // |l_d - l_s|^2 <= G_d - G_s on consecutive pairs
  double final_value_diff = 0.0;  // |last stage value - limit value|
  double final_distance = 0.0;    // distances.back() over non-skipped stages
};

/// Solves the chain of shrinking problems (stage sets decrease, sigma
/// schedule decreases componentwise to the limit sigma) and records the
/// monotonicity and a-posteriori distance bounds along the way. Stage k
/// uses sigma_schedule[k] masked to family.stages[k]. The last stage must
/// coincide with the limit problem. Infeasible stages are an error here.
FamilyRun run_decreasing_family(const Problem& p_limit, const SubsetFamily& family,
                                const std::vector<DiscreteMeasure>& sigma_schedule,
                                const SolverOptions& opts = {});

/// Solves the chain of growing problems (stage sets increase to the full
/// index set) with constraint beta_schedule[k] * sigma masked to the stage.
/// beta entries are >= 1 and decrease to 1, so the last stage is the full
/// problem. Infeasible early stages are flagged and skipped.
FamilyRun run_compact_exhaustion(const Problem& p, const SubsetFamily& family,
                                 const std::vector<double>& beta_schedule,
                                 const SolverOptions& opts = {});

}  // namespace equilib
