#include "equilib/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "equilib/solver.hpp"

namespace equilib {

double default_eps_supp(const Problem& p) {
  const double scale = p.sigma.weights.size() ? p.sigma.weights.maxCoeff() : 0.0;
  return 1e-8 * std::max(scale, 1e-300);
}

double default_eps_ineq(const Eigen::VectorXd& weighted_pot) {
  double scale = 0.0;
  for (Eigen::Index i = 0; i < weighted_pot.size(); ++i)
    if (std::isfinite(weighted_pot[i])) scale = std::max(scale, std::abs(weighted_pot[i]));
  return 1e-6 * std::max(scale, 1e-300);
}

SupportSets supports(const Problem& p, const DiscreteMeasure& lam, double eps_supp) {
  validate_measure(lam);
  if (lam.size() != p.size()) throw std::invalid_argument("measure size mismatch");
  if (!(eps_supp > 0.0)) throw std::invalid_argument("eps_supp must be positive");
  SupportSets out;
  out.eps_supp = eps_supp;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam.weights[i] > eps_supp) out.s_lambda.push_back(static_cast<int>(i));
    if (p.sigma.weights[i] - lam.weights[i] > eps_supp)
      out.s_residual.push_back(static_cast<int>(i));
  }
  return out;
}

EllL ell_L(const Problem& p, const DiscreteMeasure& lam, double eps_supp) {
  const SupportSets sets = supports(p, lam, eps_supp);
  const Eigen::VectorXd W = weighted_potential(p, lam);
  EllL out;
  out.s_lambda_empty = sets.s_lambda.empty();
  out.s_residual_empty = sets.s_residual.empty();
  for (int i : sets.s_lambda) out.ell = std::max(out.ell, W[i] / p.g[i]);
  for (int i : sets.s_residual) out.L = std::min(out.L, W[i] / p.g[i]);
  return out;
}

VariationalReport check_variational(const Problem& p, const DiscreteMeasure& lam,
                                    double w, double eps_ineq, double eps_supp) {
  if (!(eps_ineq > 0.0)) throw std::invalid_argument("eps_ineq must be positive");
  const SupportSets sets = supports(p, lam, eps_supp);
  const Eigen::VectorXd W = weighted_potential(p, lam);

  VariationalReport report;
  const EllL extremes = ell_L(p, lam, eps_supp);
  report.ell = extremes.ell;
  report.L = extremes.L;
  report.w = w;
  report.eps_ineq = eps_ineq;
  report.eps_supp = eps_supp;

  for (int i : sets.s_residual) {
    const double margin = W[i] - w * p.g[i];  // want >= 0 up to eps
    if (margin < -eps_ineq) report.ineq1_violations.push_back({i, margin});
  }
  for (int i : sets.s_lambda) {
    const double margin = w * p.g[i] - W[i];  // want >= 0 up to eps
    if (margin < -eps_ineq) report.ineq2_violations.push_back({i, margin});
  }
  auto worst_first = [](const Violation& a, const Violation& b) {
    if (a.margin != b.margin) return a.margin < b.margin;
    return a.index < b.index;
  };
  std::sort(report.ineq1_violations.begin(), report.ineq1_violations.end(), worst_first);
  std::sort(report.ineq2_violations.begin(), report.ineq2_violations.end(), worst_first);
  report.passed = report.ineq1_violations.empty() && report.ineq2_violations.empty();
  return report;
}

std::pair<std::vector<int>, std::vector<int>> violation_sets(const Problem& p,
                                                             const DiscreteMeasure& lam,
                                                             double w) {
  validate_measure(lam);
  if (lam.size() != p.size()) throw std::invalid_argument("measure size mismatch");
  const Eigen::VectorXd W = weighted_potential(p, lam);
  std::vector<int> above, below;
  for (Eigen::Index i = 0; i < W.size(); ++i) {
    const double ratio = W[i] / p.g[i];
    if (ratio > w) above.push_back(static_cast<int>(i));
    else if (ratio < w) below.push_back(static_cast<int>(i));
  }
  return {above, below};
}

CapacitaryResult capacitary_distribution(const KernelMatrix& m,
                                         const std::vector<int>& subset) {
  if (subset.empty()) throw std::invalid_argument("degenerate (empty) subset");
  for (int i : subset)
    if (i < 0 || i >= m.size()) throw std::invalid_argument("subset index out of range");

  const auto n = static_cast<Eigen::Index>(subset.size());
  auto sub = std::make_shared<KernelMatrix>();
  sub->spec = m.spec;
  sub->cloud = std::make_shared<PointCloud>(subcloud(*m.cloud, subset));
  sub->entries.resize(n, n);
  sub->diag_h.resize(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    sub->diag_h[a] = m.diag_h[subset[a]];
    for (Eigen::Index b = 0; b < n; ++b) sub->entries(a, b) = m.entries(subset[a], subset[b]);
  }

  // Unconstrained-from-above minimization of |nu|^2 over unit-mass measures
  // on the subset: the upper bound is a large uniform surrogate cap.
  const double surrogate = 1e6 / static_cast<double>(n);
  Problem p = make_problem(sub, Eigen::VectorXd::Ones(n), FieldSpec::zero(n),
                           DiscreteMeasure(Eigen::VectorXd::Constant(n, surrogate)));
  SolverOptions opts;
  opts.gap_tol = 1e-12;
  const Solution sol = solve(p, opts);
  if (!sol.converged)
    throw std::runtime_error("capacitary minimization did not converge (gap " +
                             std::to_string(sol.gap) + ")");

  const double e = sol.value;  // minimal energy of a unit measure on the subset
  if (!(e > 0.0)) throw std::runtime_error("nonpositive minimal energy; matrix not PD?");

  CapacitaryResult out;
  out.gap = sol.gap;
  out.capacity = sol.lambda.total_mass() / e;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(m.size());
  for (Eigen::Index a = 0; a < n; ++a) theta[subset[a]] = sol.lambda.weights[a] / e;
  out.theta = DiscreteMeasure(std::move(theta));
  return out;
}

double capacity(const KernelMatrix& m, const std::vector<int>& subset) {
  if (subset.empty()) return 0.0;
  return capacitary_distribution(m, subset).capacity;
}

}  // namespace equilib
