#include "equilib/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "equilib/verifier.hpp"

namespace equilib {

namespace {

// <a,b> skipping +inf entries of a that are matched by zero weight in b.
double pair_finite(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (b[i] == 0.0) continue;
    s += a[i] * b[i];
  }
  return s;
}

// Greedy continuous-knapsack fill: minimize <c,nu> over the feasible
// polytope. Indices with c = +inf never receive mass.
Eigen::VectorXd knapsack_min(const Eigen::VectorXd& c, const Eigen::VectorXd& g,
                             const Eigen::VectorXd& cap, double budget) {
  const Eigen::Index n = c.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ra = c[a] / g[a];
    const double rb = c[b] / g[b];
    if (ra != rb) return ra < rb;
    return a < b;
  });
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(n);
  double remaining = budget;
  for (int i : order) {
    if (remaining <= 0.0) break;
    if (c[i] == kInf) continue;
    const double take = std::min(cap[i], remaining / g[i]);
    if (take <= 0.0) continue;
    nu[i] = take;
    remaining -= take * g[i];
  }
  if (remaining > 1e-9 * std::max(1.0, budget))
    throw std::invalid_argument("infeasible linear subproblem: caps cannot reach the g-budget");
  return nu;
}

struct AwayStep {
  Eigen::VectorXd vertex;  // maximizer of <W,.> over the minimal face
  double gap = 0.0;        // <W, vertex - nu>
  double h_max = 0.0;      // largest feasible step along nu - vertex
};

// Away vertex on the minimal face containing nu: coordinates at their
// bounds stay fixed, free coordinates carry the remaining budget to the
// most expensive ratios first.
AwayStep away_vertex(const Eigen::VectorXd& W, const Eigen::VectorXd& g,
                     const Eigen::VectorXd& cap, const Eigen::VectorXd& nu) {
  const Eigen::Index n = nu.size();
  AwayStep out;
  out.vertex = nu;
  std::vector<int> free;
  double budget = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (nu[i] > 0.0 && nu[i] < cap[i] && std::isfinite(W[i])) {
      free.push_back(static_cast<int>(i));
      budget += g[i] * nu[i];
      out.vertex[i] = 0.0;
    }
  }
  std::sort(free.begin(), free.end(), [&](int a, int b) {
    const double ra = W[a] / g[a];
    const double rb = W[b] / g[b];
    if (ra != rb) return ra > rb;
    return a < b;
  });
  for (int i : free) {
    if (budget <= 0.0) break;
    const double take = std::min(cap[i], budget / g[i]);
    out.vertex[i] = take;
    budget -= take * g[i];
  }
  double gap = 0.0;
  double h_max = kInf;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = nu[i] - out.vertex[i];
    if (d != 0.0) gap -= W[i] * d;  // <W, a - nu>
    if (d > 0.0) h_max = std::min(h_max, (cap[i] - nu[i]) / d);
    else if (d < 0.0) h_max = std::min(h_max, nu[i] / (-d));
  }
  out.gap = gap;
  out.h_max = std::isfinite(h_max) ? h_max : 0.0;
  return out;
}

void snap_to_bounds(Eigen::VectorXd& nu, const Eigen::VectorXd& cap) {
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    if (nu[i] < 1e-14 * std::max(1.0, cap[i])) nu[i] = 0.0;
    else if (cap[i] - nu[i] < 1e-14 * cap[i]) nu[i] = cap[i];
    nu[i] = std::clamp(nu[i], 0.0, cap[i]);
  }
}

void rescale_mass(Eigen::VectorXd& nu, const Eigen::VectorXd& g,
                  const Eigen::VectorXd& cap) {
  const double mass = g.dot(nu);
  if (mass > 0.0 && std::abs(mass - 1.0) > 1e-15) {
    nu *= 1.0 / mass;
    for (Eigen::Index i = 0; i < nu.size(); ++i) nu[i] = std::min(nu[i], cap[i]);
  }
}

Solution finish(const Problem& p, Eigen::VectorXd nu, long iters, double gap_tol) {
  Solution sol;
  rescale_mass(nu, p.g, p.sigma_eff);
  sol.lambda = DiscreteMeasure(std::move(nu));
  sol.value = weighted_energy(p, sol.lambda);
  sol.gap = certificate_gap(p, sol.lambda);
  sol.iterations = iters;
  sol.converged = sol.gap <= gap_tol;
  const EllL extremes = ell_L(p, sol.lambda, default_eps_supp(p));
  sol.ell = extremes.ell;
  sol.L = extremes.L;
  return sol;
}

Solution solve_conditional_gradient(const Problem& p, const SolverOptions& opts,
                                    Eigen::VectorXd nu) {
  const Eigen::VectorXd& cap = p.sigma_eff;
  const Eigen::MatrixXd& M = p.matrix->entries;
  Eigen::VectorXd Mnu = M * nu;
  double prev_value = kInf;

  for (long it = 0; it < opts.max_iters; ++it) {
    Eigen::VectorXd W = Mnu + p.f;  // +inf where f is +inf
    Eigen::VectorXd s = knapsack_min(W, p.g, cap, p.normalization);
    double gap = pair_finite(W, nu) - pair_finite(W, s);
    if (gap <= opts.gap_tol) {
      // Confirm against a fresh product; incremental Mnu accumulates drift.
      Mnu = M * nu;
      W = Mnu + p.f;
      s = knapsack_min(W, p.g, cap, p.normalization);
      gap = pair_finite(W, nu) - pair_finite(W, s);
      if (gap <= opts.gap_tol) return finish(p, std::move(nu), it, opts.gap_tol);
    }

    Eigen::VectorXd d;
    double h_max = 1.0;
    if (opts.step_rule == StepRule::ExactLineSearch) {
      const AwayStep away = away_vertex(W, p.g, cap, nu);
      if (away.gap > gap && away.h_max > 0.0) {
        d = nu - away.vertex;
        h_max = away.h_max;
      } else {
        d = s - nu;
      }
    } else {
      d = s - nu;
    }

    const Eigen::VectorXd Md = M * d;
    double h;
    if (opts.step_rule == StepRule::FixedDecay) {
      h = std::min(2.0 / (static_cast<double>(it) + 2.0), h_max);
    } else {
      const double dMd = d.dot(Md);
      double lin = 0.0;  // <W, d>, finite because d = 0 wherever f = +inf
      for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d[i] != 0.0) lin += W[i] * d[i];
      if (dMd <= 0.0) h = h_max;
      else h = std::clamp(-lin / dMd, 0.0, h_max);
    }
    if (h <= 0.0) return finish(p, std::move(nu), it, opts.gap_tol);

    nu += h * d;
    Mnu += h * Md;
    snap_to_bounds(nu, cap);

    if ((it + 1) % 512 == 0) {
      rescale_mass(nu, p.g, cap);
      Mnu = M * nu;  // refresh accumulated drift
    }
    if (opts.check_descent) {
      const double value = nu.dot(Mnu) + 2.0 * pair_finite(p.f, nu);
      if (value > prev_value + 1e-9 * std::max(1.0, std::abs(prev_value)))
        throw std::runtime_error("descent violated: " + std::to_string(value) + " after " +
                                 std::to_string(prev_value));
      prev_value = value;
    }
  }
  return finish(p, std::move(nu), opts.max_iters, opts.gap_tol);
}

Solution solve_projected_gradient(const Problem& p, const SolverOptions& opts,
                                  Eigen::VectorXd nu) {
  const Eigen::VectorXd& cap = p.sigma_eff;
  const Eigen::MatrixXd& M = p.matrix->entries;
  Eigen::VectorXd f0 = p.f;
  for (Eigen::Index i = 0; i < f0.size(); ++i)
    if (!std::isfinite(f0[i])) f0[i] = 0.0;  // those coordinates are capped at 0

  Eigen::VectorXd Mnu = M * nu;
  auto objective = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& Mx) {
    return x.dot(Mx) + 2.0 * f0.dot(x);
  };

  // Gershgorin bound on the largest eigenvalue seeds the step size.
  double row_sum = 0.0;
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    row_sum = std::max(row_sum, M.row(i).cwiseAbs().sum());
  double tau = 1.0 / std::max(row_sum, 1e-300);
  const bool fixed = opts.step_rule == StepRule::FixedDecay;

  std::vector<double> recent;  // nonmonotone reference window
  recent.push_back(objective(nu, Mnu));

  for (long it = 0; it < opts.max_iters; ++it) {
    const Eigen::VectorXd W = Mnu + p.f;
    const Eigen::VectorXd s = knapsack_min(W, p.g, cap, p.normalization);
    const double gap = pair_finite(W, nu) - pair_finite(W, s);
    if (gap <= opts.gap_tol) return finish(p, std::move(nu), it, opts.gap_tol);

    const Eigen::VectorXd grad = 2.0 * (Mnu + f0);
    Eigen::VectorXd trial = project_box_hyperplane(nu - tau * grad, p).weights;
    Eigen::VectorXd Mtrial = M * trial;

    if (!fixed) {
      const double ref = *std::max_element(recent.begin(), recent.end());
      int backtracks = 0;
      while (objective(trial, Mtrial) > ref + 1e-14 * std::max(1.0, std::abs(ref)) &&
             backtracks < 60) {
        tau *= 0.5;
        trial = project_box_hyperplane(nu - tau * grad, p).weights;
        Mtrial = M * trial;
        ++backtracks;
      }
    }

    const Eigen::VectorXd dx = trial - nu;
    const Eigen::VectorXd dgrad = 2.0 * (Mtrial - Mnu);
    nu = std::move(trial);
    Mnu = std::move(Mtrial);

    recent.push_back(objective(nu, Mnu));
    if (recent.size() > 10) recent.erase(recent.begin());

    if (!fixed) {
      const double num = dx.squaredNorm();
      const double den = dx.dot(dgrad);
      if (den > 0.0 && num > 0.0) tau = std::clamp(num / den, 1e-12, 1e12);
      else tau *= 2.0;
    }
    if (opts.check_descent && fixed && recent.size() >= 2 &&
        recent.back() > recent[recent.size() - 2] + 1e-9)
      throw std::runtime_error("descent violated in projected gradient");
  }
  return finish(p, std::move(nu), opts.max_iters, opts.gap_tol);
}

}  // namespace

DiscreteMeasure feasible_point(const Problem& p) {
  return DiscreteMeasure(knapsack_min(p.f, p.g, p.sigma_eff, p.normalization));
}

DiscreteMeasure lp_oracle(const Eigen::VectorXd& c, const Problem& p) {
  if (c.size() != p.size()) throw std::invalid_argument("cost vector size mismatch");
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (std::isnan(c[i]) || c[i] == -kInf)
      throw std::invalid_argument("oracle cost entries must be > -inf");
  return DiscreteMeasure(knapsack_min(c, p.g, p.sigma_eff, p.normalization));
}

double certificate_gap(const Problem& p, const DiscreteMeasure& lam) {
  validate_measure(lam);
  if (lam.size() != p.size()) throw std::invalid_argument("measure size mismatch");
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (p.f[i] == kInf && lam.weights[i] > 0.0)
      throw std::invalid_argument("measure places mass on an infinite-field index");
  const Eigen::VectorXd W = weighted_potential(p, lam);
  const DiscreteMeasure s = lp_oracle(W, p);
  return pair_finite(W, lam.weights) - pair_finite(W, s.weights);
}

DiscreteMeasure project_box_hyperplane(const Eigen::VectorXd& v, const Problem& p) {
  if (v.size() != p.size()) throw std::invalid_argument("vector size mismatch");
  const Eigen::VectorXd& cap = p.sigma_eff;
  auto clipped_mass = [&](double t) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      m += p.g[i] * std::clamp(v[i] - t * p.g[i], 0.0, cap[i]);
    return m;
  };
  // <g, nu(t)> is nonincreasing in t; bracket then bisect. The bracket
  // expansion is capped: with <g,sigma> barely 1 the limit mass may sit a
  // few ulps under the target, in which case the extreme t is the answer.
  double lo = 0.0, hi = 0.0;
  double span = 1.0;
  for (int k = 0; k < 120 && clipped_mass(lo) < p.normalization * (1.0 - 1e-12); ++k) {
    lo -= span;
    span *= 2.0;
  }
  span = 1.0;
  for (int k = 0; k < 120 && clipped_mass(hi) > p.normalization; ++k) {
    hi += span;
    span *= 2.0;
  }
  for (int round = 0; round < 200; ++round) {
    const double mid = 0.5 * (lo + hi);
    const double m = clipped_mass(mid);
    if (std::abs(m - p.normalization) <= 1e-12) { lo = hi = mid; break; }
    if (m > p.normalization) lo = mid;
    else hi = mid;
  }
  const double t = 0.5 * (lo + hi);
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out[i] = std::clamp(v[i] - t * p.g[i], 0.0, cap[i]);
  return DiscreteMeasure(std::move(out));
}

Solution solve(const Problem& p, const SolverOptions& opts,
               const std::optional<DiscreteMeasure>& start) {
  if (opts.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(opts.gap_tol > 0.0)) throw std::invalid_argument("gap_tol must be positive");

  Eigen::VectorXd nu;
  if (start.has_value()) {
    validate_measure(*start);
    if (start->size() != p.size()) throw std::invalid_argument("start size mismatch");
    nu = project_box_hyperplane(start->weights, p).weights;
  } else {
    nu = feasible_point(p).weights;
  }
  if (opts.algorithm == Algorithm::ProjectedGradient)
    return solve_projected_gradient(p, opts, std::move(nu));
  return solve_conditional_gradient(p, opts, std::move(nu));
}

}  // namespace equilib
