#pragma once

#include <vector>

#include "equilib/energy.hpp"

namespace equilib {

/// Thresholded supports of lambda and of the residual sigma - lambda.
struct SupportSets {
  std::vector<int> s_lambda;    // lambda[i] > eps_supp
  std::vector<int> s_residual;  // sigma[i] - lambda[i] > eps_supp
  double eps_supp = 0.0;
};

struct EllL {
  double ell = -kInf;
  double L = kInf;
  bool s_lambda_empty = false;
  bool s_residual_empty = false;
};

struct Violation {
  int index = 0;
  double margin = 0.0;  // negative = violated by |margin|
};

/// Outcome of checking the two variational inequalities at level w:
/// W >= w g on the residual support and W <= w g on the support, each up
/// to eps_ineq. Violators are sorted worst-first.
struct VariationalReport {
  double ell = -kInf;
  double L = kInf;
  double w = 0.0;
  double eps_ineq = 0.0;
  double eps_supp = 0.0;
  std::vector<Violation> ineq1_violations;  // residual support, W - w g < -eps
  std::vector<Violation> ineq2_violations;  // support, w g - W < -eps
  bool passed = false;
};

struct CapacitaryResult {
  DiscreteMeasure theta;   // full-length weights, zero off the subset
  double capacity = 0.0;   // theta(X) = |theta|^2
  double gap = 0.0;        // solver certificate of the underlying minimization
};

/// Scale-aware default thresholds, recorded in every report.
double default_eps_supp(const Problem& p);
double default_eps_ineq(const Eigen::VectorXd& weighted_pot);

SupportSets supports(const Problem& p, const DiscreteMeasure& lam, double eps_supp);

/// Extremes of W/g over the two supports; empty sets yield -inf / +inf
/// with a warning flag rather than an error.
EllL ell_L(const Problem& p, const DiscreteMeasure& lam, double eps_supp);

VariationalReport check_variational(const Problem& p, const DiscreteMeasure& lam,
                                    double w, double eps_ineq, double eps_supp);

/// Strict-inequality index sets E+(w) = {W/g > w} and E-(w) = {W/g < w}
/// over the whole cloud.
std::pair<std::vector<int>, std::vector<int>> violation_sets(const Problem& p,
                                                             const DiscreteMeasure& lam,
                                                             double w);

/// Capacitary distribution of a subset: the minimal-energy unit measure on
/// the subset rescaled so that theta(X) = |theta|^2 = C and the potential of
/// theta is >= 1 on the subset (up to solver tolerance).
CapacitaryResult capacitary_distribution(const KernelMatrix& m,
                                         const std::vector<int>& subset);

/// The capacity C of a subset; 0 for the empty set by convention.
double capacity(const KernelMatrix& m, const std::vector<int>& subset);

}  // namespace equilib
