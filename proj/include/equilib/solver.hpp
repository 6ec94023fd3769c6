#pragma once

#include <optional>

#include "equilib/energy.hpp"

namespace equilib {

enum class StepRule { ExactLineSearch, FixedDecay };
enum class Algorithm { ConditionalGradient, ProjectedGradient };

struct SolverOptions {
  long max_iters = 100000;
  double gap_tol = 1e-9;  // absolute tolerance on the certificate gap
  StepRule step_rule = StepRule::ExactLineSearch;
  Algorithm algorithm = Algorithm::ConditionalGradient;
  bool check_descent = false;  // assert monotone descent per iteration
};

struct Solution {
  DiscreteMeasure lambda;
  double value = 0.0;  // weighted energy at lambda
  double gap = 0.0;    // certificate gap at lambda
  long iterations = 0;
  double ell = -kInf;  // max of W/g over the support of lambda
  double L = kInf;     // min of W/g over the residual support
  bool converged = false;
};

/// A feasible measure with finite weighted energy: sigma-mass accumulated
/// greedily over finite-f indices in increasing f/g order until the
/// g-budget 1 is met, fractional at the last index.
DiscreteMeasure feasible_point(const Problem& p);

/// Minimizer of <c, nu> over the feasible polytope (nu = 0 where c = +inf):
/// indices sorted by c/g ascending (ties by index), each filled to sigma
/// until g-mass 1 is reached, fractional last index.
DiscreteMeasure lp_oracle(const Eigen::VectorXd& c, const Problem& p);

/// Optimality certificate <W, lam> - min_nu <W, nu> with W the weighted
/// potential of lam; zero exactly at the equilibrium measure and an upper
/// bound on the suboptimality of lam.
double certificate_gap(const Problem& p, const DiscreteMeasure& lam);

/// Euclidean projection onto {0 <= nu <= sigma, <g,nu> = 1} via bisection
/// on the hyperplane multiplier.
DiscreteMeasure project_box_hyperplane(const Eigen::VectorXd& v, const Problem& p);

/// Solves the constrained minimal weighted-energy problem.
///
/// ConditionalGradient iterates oracle steps with exact line search,
/// augmented with away steps on the minimal face of the iterate so the
/// certificate gap reaches tight absolute tolerances. ProjectedGradient
/// uses spectral (Barzilai-Borwein) steps with a nonmonotone safeguard.
/// Both stop when the certificate gap is <= gap_tol; on max_iters the best
/// iterate is returned with converged = false.
Solution solve(const Problem& p, const SolverOptions& opts = {},
               const std::optional<DiscreteMeasure>& start = std::nullopt);

}  // namespace equilib
