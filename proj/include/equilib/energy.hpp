#pragma once

#include <limits>
#include <memory>

#include <Eigen/Core>

#include "equilib/kernels.hpp"

namespace equilib {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Nonnegative weight vector aligned to a point cloud. Models every measure
/// of the problem: candidates nu, constraints sigma, equilibrium lambda,
/// capacitary theta. The trace on an index set is weight masking.
struct DiscreteMeasure {
  Eigen::VectorXd weights;

  DiscreteMeasure() = default;
  explicit DiscreteMeasure(Eigen::VectorXd w) : weights(std::move(w)) {}
  static DiscreteMeasure zeros(Eigen::Index n) {
    return DiscreteMeasure(Eigen::VectorXd::Zero(n));
  }

  Eigen::Index size() const { return weights.size(); }
  double total_mass() const { return weights.sum(); }

  /// Weights zeroed outside `indices`.
  DiscreteMeasure trace(const std::vector<int>& indices) const;
};

/// Throws std::invalid_argument if any weight is negative or non-finite.
void validate_measure(const DiscreteMeasure& nu);

enum class FieldCase { CaseI, CaseII };

/// External field. Case I is an explicit value vector (entries > -inf,
/// +inf allowed); Case II is the potential of the signed charge
/// zeta_plus - zeta_minus.
struct FieldSpec {
  FieldCase kind = FieldCase::CaseI;
  Eigen::VectorXd values;       // Case I
  DiscreteMeasure zeta_plus;    // Case II
  DiscreteMeasure zeta_minus;   // Case II

  static FieldSpec case_i(Eigen::VectorXd values);
  static FieldSpec case_ii(DiscreteMeasure plus, DiscreteMeasure minus);
  static FieldSpec zero(Eigen::Index n) {
    return case_i(Eigen::VectorXd::Zero(n));
  }
};

/// One instance of the constrained minimal weighted-energy problem:
/// minimize <nu,M nu> + 2<f,nu> over {0 <= nu <= sigma, <g,nu> = 1}.
struct Problem {
  std::shared_ptr<const KernelMatrix> matrix;
  Eigen::VectorXd g;       // positive weight in the normalization <g,nu> = 1
  Eigen::VectorXd f;       // resolved field values (+inf allowed)
  FieldSpec field;
  DiscreteMeasure sigma;   // upper constraint
  double normalization = 1.0;

  Eigen::VectorXd sigma_eff;  // sigma with f = +inf indices zeroed
  bool feasible = false;      // <g, sigma_eff> >= 1
  bool strictly_feasible = false;  // <g, sigma_eff> > 1

  Eigen::Index size() const { return g.size(); }
};

/// Builds and validates a Problem; resolves Case II fields against the
/// kernel matrix. Throws std::invalid_argument when the feasible set is
/// empty or inputs are inconsistent.
Problem make_problem(std::shared_ptr<const KernelMatrix> matrix, Eigen::VectorXd g,
                     FieldSpec field, DiscreteMeasure sigma);

/// Energy <nu, M nu>.
double energy(const KernelMatrix& m, const DiscreteMeasure& nu);

/// Mutual energy <nu, M mu>; symmetric and bilinear.
double mutual_energy(const KernelMatrix& m, const DiscreteMeasure& nu,
                     const DiscreteMeasure& mu);

/// Potential (M nu) at every cloud point.
Eigen::VectorXd potential(const KernelMatrix& m, const DiscreteMeasure& nu);

/// Field values at every cloud point: Case I passes the given vector
/// through, Case II evaluates M (zeta_plus - zeta_minus).
Eigen::VectorXd resolve_field(const KernelMatrix& m, const FieldSpec& field);

/// Weighted potential (M nu) + f, entrywise (finite + inf = inf).
Eigen::VectorXd weighted_potential(const Problem& p, const DiscreteMeasure& nu);

/// Weighted energy <nu,M nu> + 2<f,nu>; +inf when nu places mass on an
/// f = +inf index.
double weighted_energy(const Problem& p, const DiscreteMeasure& nu);

/// Energy-norm distance sqrt(<nu-mu, M (nu-mu)>). Tiny negative radicands
/// (rounding) are clamped to zero; radicands below -1e-12 signal a broken
/// positive definiteness invariant and throw.
double strong_distance(const KernelMatrix& m, const DiscreteMeasure& nu,
                       const DiscreteMeasure& mu);

}  // namespace equilib
