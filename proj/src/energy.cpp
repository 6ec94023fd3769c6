#include "equilib/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace equilib {

namespace {

void require_aligned(const KernelMatrix& m, const DiscreteMeasure& nu) {
  if (nu.size() != m.size())
    throw std::invalid_argument("measure size does not match kernel matrix");
}

}  // namespace

DiscreteMeasure DiscreteMeasure::trace(const std::vector<int>& indices) const {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(weights.size());
  for (int i : indices) {
    if (i < 0 || i >= weights.size()) throw std::invalid_argument("trace index out of range");
    w[i] = weights[i];
  }
  return DiscreteMeasure(std::move(w));
}

void validate_measure(const DiscreteMeasure& nu) {
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    const double w = nu.weights[i];
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("measure weight " + std::to_string(i) +
                                  " is negative or non-finite");
  }
}

FieldSpec FieldSpec::case_i(Eigen::VectorXd values) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i]) || values[i] == -kInf)
      throw std::invalid_argument("Case I field values must be > -inf");
  }
  FieldSpec f;
  f.kind = FieldCase::CaseI;
  f.values = std::move(values);
  return f;
}

FieldSpec FieldSpec::case_ii(DiscreteMeasure plus, DiscreteMeasure minus) {
  validate_measure(plus);
  validate_measure(minus);
  if (plus.size() != minus.size())
    throw std::invalid_argument("Case II parts must have equal size");
  FieldSpec f;
  f.kind = FieldCase::CaseII;
  f.zeta_plus = std::move(plus);
  f.zeta_minus = std::move(minus);
  return f;
}

double energy(const KernelMatrix& m, const DiscreteMeasure& nu) {
  require_aligned(m, nu);
  return nu.weights.dot(m.entries * nu.weights);
}

double mutual_energy(const KernelMatrix& m, const DiscreteMeasure& nu,
                     const DiscreteMeasure& mu) {
  require_aligned(m, nu);
  require_aligned(m, mu);
  return nu.weights.dot(m.entries * mu.weights);
}

Eigen::VectorXd potential(const KernelMatrix& m, const DiscreteMeasure& nu) {
  require_aligned(m, nu);
  return m.entries * nu.weights;
}

Eigen::VectorXd resolve_field(const KernelMatrix& m, const FieldSpec& field) {
  if (field.kind == FieldCase::CaseI) {
    if (field.values.size() != m.size())
      throw std::invalid_argument("field value vector does not match matrix size");
    return field.values;
  }
  require_aligned(m, field.zeta_plus);
  require_aligned(m, field.zeta_minus);
  const double e_plus = energy(m, field.zeta_plus);
  const double e_minus = energy(m, field.zeta_minus);
  if (!std::isfinite(e_plus) || !std::isfinite(e_minus))
    throw std::invalid_argument("Case II charge has non-finite energy");
  return m.entries * (field.zeta_plus.weights - field.zeta_minus.weights);
}

Problem make_problem(std::shared_ptr<const KernelMatrix> matrix, Eigen::VectorXd g,
                     FieldSpec field, DiscreteMeasure sigma) {
  if (!matrix) throw std::invalid_argument("null kernel matrix");
  const Eigen::Index n = matrix->size();
  if (g.size() != n) throw std::invalid_argument("g vector does not match matrix size");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(g[i] > 0.0) || !std::isfinite(g[i]))
      throw std::invalid_argument("g must be positive and finite everywhere");
  validate_measure(sigma);
  if (sigma.size() != n) throw std::invalid_argument("sigma does not match matrix size");

  Problem p;
  p.matrix = std::move(matrix);
  p.g = std::move(g);
  p.f = resolve_field(*p.matrix, field);
  p.field = std::move(field);
  p.sigma = std::move(sigma);

  p.sigma_eff = p.sigma.weights;
  for (Eigen::Index i = 0; i < n; ++i)
    if (p.f[i] == kInf) p.sigma_eff[i] = 0.0;  // no mass where the field is infinite

  const double reachable = p.g.dot(p.sigma_eff);
  p.feasible = reachable >= p.normalization * (1.0 - 1e-12);
  p.strictly_feasible = reachable > p.normalization * (1.0 + 1e-12);
  if (!p.feasible)
    throw std::invalid_argument("infeasible problem: sigma carries g-mass " +
                                std::to_string(reachable) + " < 1 on finite-field indices");
  return p;
}

Eigen::VectorXd weighted_potential(const Problem& p, const DiscreteMeasure& nu) {
  require_aligned(*p.matrix, nu);
  Eigen::VectorXd w = p.matrix->entries * nu.weights;
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] += p.f[i];  // finite + inf = inf
  return w;
}

double weighted_energy(const Problem& p, const DiscreteMeasure& nu) {
  require_aligned(*p.matrix, nu);
  double field_term = 0.0;
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    if (nu.weights[i] == 0.0) continue;
    if (p.f[i] == kInf) return kInf;
    field_term += p.f[i] * nu.weights[i];
  }
  return nu.weights.dot(p.matrix->entries * nu.weights) + 2.0 * field_term;
}

double strong_distance(const KernelMatrix& m, const DiscreteMeasure& nu,
                       const DiscreteMeasure& mu) {
  require_aligned(m, nu);
  require_aligned(m, mu);
  const Eigen::VectorXd d = nu.weights - mu.weights;
  const double sq = d.dot(m.entries * d);
  if (sq < -1e-12)
    throw std::runtime_error("strong_distance radicand " + std::to_string(sq) +
                             " below -1e-12: positive definiteness is broken");
  return std::sqrt(std::max(sq, 0.0));
}

}  // namespace equilib
