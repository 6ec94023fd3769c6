#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "equilib/solver.hpp"
#include "support/oracles.hpp"

using namespace equilib;

namespace {

std::shared_ptr<KernelMatrix> synthetic(const Eigen::MatrixXd& entries) {
  auto m = std::make_shared<KernelMatrix>();
  m->spec = KernelSpec::riesz(2.0, 3);
  m->cloud = std::make_shared<PointCloud>(
      make_interval(0.0, 1.0, static_cast<int>(entries.rows()), 3));
  m->entries = entries;
  m->diag_h = Eigen::VectorXd::Ones(entries.rows());
  return m;
}

Problem from_instance(const testsupport::Instance& inst) {
  return make_problem(synthetic(inst.M), inst.g, FieldSpec::case_i(inst.f),
                      DiscreteMeasure(inst.sigma));
}

Eigen::VectorXd vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("feasible point greedy fill") {
  {
    auto m = synthetic((Eigen::MatrixXd(2, 2) << 2, 1, 1, 2).finished());
    Problem p = make_problem(m, vec({1, 1}), FieldSpec::zero(2), DiscreteMeasure(vec({1, 1})));
    const DiscreteMeasure nu = feasible_point(p);
    CHECK(std::abs(p.g.dot(nu.weights) - 1.0) <= 1e-12);
    CHECK((nu.weights.array() >= 0.0).all());
    CHECK((nu.weights.array() <= p.sigma.weights.array() + 1e-15).all());
  }
  {
    auto m = synthetic((Eigen::MatrixXd(2, 2) << 2, 1, 1, 2).finished());
    Problem p =
        make_problem(m, vec({1, 1}), FieldSpec::zero(2), DiscreteMeasure(vec({0.4, 1})));
    const DiscreteMeasure nu = feasible_point(p);
    CHECK(nu.weights[0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(nu.weights[1] == doctest::Approx(0.6).epsilon(1e-15));
  }
  {
    auto m = synthetic((Eigen::MatrixXd(2, 2) << 2, 1, 1, 2).finished());
    Problem p = make_problem(m, vec({1, 1}), FieldSpec::case_i(vec({kInf, 0})),
                             DiscreteMeasure(vec({1, 1})));
    const DiscreteMeasure nu = feasible_point(p);
    CHECK(nu.weights[0] == 0.0);
    CHECK(nu.weights[1] == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("lp oracle vertices") {
  auto m3 = synthetic(Eigen::MatrixXd::Identity(3, 3));
  Problem p3 = make_problem(m3, vec({1, 1, 1}), FieldSpec::zero(3),
                            DiscreteMeasure(vec({1, 1, 1})));
  const DiscreteMeasure a = lp_oracle(vec({3, 1, 2}), p3);
  CHECK(a.weights[0] == 0.0);
  CHECK(a.weights[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a.weights[2] == 0.0);

  auto m2 = synthetic(Eigen::MatrixXd::Identity(2, 2));
  Problem p2 =
      make_problem(m2, vec({1, 1}), FieldSpec::zero(2), DiscreteMeasure(vec({0.4, 1})));
  const DiscreteMeasure b = lp_oracle(vec({1, 2}), p2);
  CHECK(b.weights[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(b.weights[1] == doctest::Approx(0.6).epsilon(1e-15));

  Problem p2b =
      make_problem(m2, vec({2, 1}), FieldSpec::zero(2), DiscreteMeasure(vec({1, 1})));
  const DiscreteMeasure c = lp_oracle(vec({2, 2}), p2b);
  CHECK(c.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.weights[1] == 0.0);

  CHECK_THROWS_AS(lp_oracle(vec({-kInf, 0}), p2), std::invalid_argument);
}

TEST_CASE("certificate gap on the two point toy") {
  auto m = synthetic((Eigen::MatrixXd(2, 2) << 2, 1, 1, 2).finished());
  Problem p = make_problem(m, vec({1, 1}), FieldSpec::zero(2), DiscreteMeasure(vec({1, 1})));
  const DiscreteMeasure lam(vec({1, 0}));
  const double gap = certificate_gap(p, lam);
  CHECK(gap == doctest::Approx(1.0).epsilon(1e-14));  // <W,lam> = 2, min = 1
  CHECK(certificate_gap(p, lam) == gap);              // idempotent evaluation

  const Eigen::VectorXd W = weighted_potential(p, lam);
  const DiscreteMeasure vertex = lp_oracle(W, p);
  CHECK(vertex.weights[1] == doctest::Approx(1.0));
}

TEST_CASE("solve symmetric two point problem") {
  auto m = synthetic((Eigen::MatrixXd(2, 2) << 2, 1, 1, 2).finished());
  Problem p = make_problem(m, vec({1, 1}), FieldSpec::zero(2), DiscreteMeasure(vec({1, 1})));
  const Solution sol = solve(p);
  CHECK(sol.converged);
  CHECK(sol.lambda.weights[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.lambda.weights[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.value == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(sol.gap <= 1e-9);
  CHECK(std::abs(p.g.dot(sol.lambda.weights) - 1.0) <= 1e-10);
}

TEST_CASE("solve puts all mass on the cheap point") {
  auto m = synthetic((Eigen::MatrixXd(2, 2) << 1, 0, 0, 4).finished());
  Problem p = make_problem(m, vec({1, 1}), FieldSpec::case_i(vec({0, 10})),
                           DiscreteMeasure(vec({1, 1})));
  const Solution sol = solve(p);
  CHECK(sol.converged);
  CHECK(sol.lambda.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.lambda.weights[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-12));
  const Eigen::VectorXd W = weighted_potential(p, sol.lambda);
  CHECK(W[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(W[1] == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(sol.gap <= 1e-12);
  CHECK(sol.ell == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.L == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("two sphere configuration concentrates on the outer sphere") {
  auto outer = make_sphere(3, 1.0, 160, "outer");
  auto inner = make_sphere(3, 0.5, 80, "inner");
  auto cloud = std::make_shared<PointCloud>(union_clouds(outer, inner));
  auto m = std::make_shared<KernelMatrix>(assemble(KernelSpec::riesz(2.5, 3), cloud));
  Eigen::VectorXd sigma(cloud->size());
  for (int i = 0; i < 160; ++i) sigma[i] = 1.0 / 160;
  for (int i = 160; i < 240; ++i) sigma[i] = 0.5 / 80;
  Problem p = make_problem(m, Eigen::VectorXd::Ones(240), FieldSpec::zero(240),
                           DiscreteMeasure(sigma));
  SolverOptions opts;
  opts.gap_tol = 1e-12;
  const Solution sol = solve(p, opts);
  REQUIRE(sol.converged);
  for (int i = 0; i < 160; ++i)
    CHECK(std::abs(sol.lambda.weights[i] - sigma[i]) < 1e-6);
  for (int i = 160; i < 240; ++i) CHECK(sol.lambda.weights[i] < 1e-8);
  CHECK(sol.L > sol.ell);
}

TEST_CASE("projection onto the feasible polytope") {
  auto m = synthetic(Eigen::MatrixXd::Identity(2, 2));
  Problem p = make_problem(m, vec({1, 1}), FieldSpec::zero(2), DiscreteMeasure(vec({1, 1})));
  const DiscreteMeasure keep = project_box_hyperplane(vec({0.25, 0.75}), p);
  CHECK(keep.weights[0] == doctest::Approx(0.25).epsilon(1e-11));
  CHECK(keep.weights[1] == doctest::Approx(0.75).epsilon(1e-11));

  const DiscreteMeasure split = project_box_hyperplane(vec({1, 1}), p);
  CHECK(split.weights[0] == doctest::Approx(0.5).epsilon(1e-11));
  CHECK(split.weights[1] == doctest::Approx(0.5).epsilon(1e-11));

  Problem capped =
      make_problem(m, vec({1, 1}), FieldSpec::zero(2), DiscreteMeasure(vec({0.6, 1})));
  const DiscreteMeasure clip = project_box_hyperplane(vec({2, 0}), capped);
  CHECK(clip.weights[0] == doctest::Approx(0.6).epsilon(1e-11));
  CHECK(clip.weights[1] == doctest::Approx(0.4).epsilon(1e-11));
}

TEST_CASE("monotone descent under exact line search") {
  std::mt19937 rng(101);
  const testsupport::Instance inst = testsupport::random_instance(6, rng);
  Problem p = from_instance(inst);
  SolverOptions opts;
  opts.check_descent = true;
  opts.gap_tol = 1e-12;
  const Solution sol = solve(p, opts);  // throws if descent is violated
  CHECK(sol.converged);
}

TEST_CASE("gap bounds suboptimality") {
  std::mt19937 rng(102);
  for (int t = 0; t < 10; ++t) {
    const testsupport::Instance inst = testsupport::random_instance(5, rng);
    Problem p = from_instance(inst);
    SolverOptions opts;
    opts.gap_tol = 1e-12;
    const Solution best = solve(p, opts);
    // Any feasible measure scores at least the optimum, and the certificate
    // gap dominates the suboptimality.
    const DiscreteMeasure probe = project_box_hyperplane(
        best.lambda.weights + 0.05 * Eigen::VectorXd::Random(p.size()), p);
    CHECK(weighted_energy(p, probe) >= best.value - 1e-10);
    const double gap = certificate_gap(p, probe);
    CHECK(weighted_energy(p, probe) - best.value <= gap + 1e-10);
  }
}

TEST_CASE("uniqueness surrogate via two starts") {
  std::mt19937 rng(103);
  for (int t = 0; t < 10; ++t) {
    const testsupport::Instance inst = testsupport::random_instance(6, rng);
    Problem p = from_instance(inst);
    SolverOptions opts;
    opts.gap_tol = 1e-13;
    const Solution a = solve(p, opts);
    const Solution b = solve(p, opts, DiscreteMeasure(testsupport::greedy_feasible(inst)));
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(strong_distance(*p.matrix, a.lambda, b.lambda) <= 1e-6);
  }
}

TEST_CASE("oracle equivalence against grid search with refinement") {
  std::mt19937 rng(104);
  for (int n = 2; n <= 3; ++n) {
    for (int t = 0; t < 3; ++t) {
      const testsupport::Instance inst = testsupport::random_instance(n, rng);
      Problem p = from_instance(inst);
      SolverOptions opts;
      opts.gap_tol = 1e-13;
      const Solution sol = solve(p, opts);
      const Eigen::VectorXd seed = testsupport::grid_search(inst, 1e-3);
      const Eigen::VectorXd refined = testsupport::compass_minimize(inst, seed, 1e-10);
      const double oracle_value = testsupport::objective(inst, refined);
      CHECK(std::abs(sol.value - oracle_value) <= 1e-8);
    }
  }
}

TEST_CASE("case II solved value respects the representation bound") {
  std::mt19937 rng(105);
  auto cloud = std::make_shared<PointCloud>(make_sphere(3, 1.0, 30));
  auto m = std::make_shared<KernelMatrix>(assemble(KernelSpec::riesz(2.0, 3), cloud));
  std::uniform_real_distribution<double> u(0.0, 0.5);
  Eigen::VectorXd plus(30), minus(30);
  for (int i = 0; i < 30; ++i) {
    plus[i] = u(rng);
    minus[i] = u(rng);
  }
  Problem p = make_problem(
      m, Eigen::VectorXd::Ones(30),
      FieldSpec::case_ii(DiscreteMeasure(plus), DiscreteMeasure(minus)),
      DiscreteMeasure(Eigen::VectorXd::Constant(30, 0.2)));
  const Solution sol = solve(p);
  const Eigen::VectorXd zeta = plus - minus;
  CHECK(sol.value > -zeta.dot(m->entries * zeta) - 1e-9);
}

TEST_CASE("max_iters returns best effort with converged false") {
  std::mt19937 rng(106);
  const testsupport::Instance inst = testsupport::random_instance(7, rng);
  Problem p = from_instance(inst);
  SolverOptions opts;
  opts.max_iters = 1;
  opts.gap_tol = 1e-16;
  const Solution sol = solve(p, opts);
  CHECK_FALSE(sol.converged);
  CHECK(sol.gap > 0.0);
  CHECK(std::abs(p.g.dot(sol.lambda.weights) - 1.0) <= 1e-10);
}

TEST_CASE("projected gradient agrees with conditional gradient") {
  std::mt19937 rng(107);
  for (int t = 0; t < 6; ++t) {
    const testsupport::Instance inst = testsupport::random_instance(6, rng);
    Problem p = from_instance(inst);
    SolverOptions cg;
    cg.gap_tol = 1e-12;
    SolverOptions pg = cg;
    pg.algorithm = Algorithm::ProjectedGradient;
    const Solution a = solve(p, cg);
    const Solution b = solve(p, pg);
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(std::abs(a.value - b.value) <= 1e-8);
    CHECK(strong_distance(*p.matrix, a.lambda, b.lambda) <= 1e-5);
  }
}

TEST_CASE("fixed decay step rule still descends to coarse tolerance") {
  std::mt19937 rng(108);
  const testsupport::Instance inst = testsupport::random_instance(4, rng);
  Problem p = from_instance(inst);
  SolverOptions opts;
  opts.step_rule = StepRule::FixedDecay;
  opts.gap_tol = 1e-4;
  opts.max_iters = 200000;
  const Solution sol = solve(p, opts);
  CHECK(sol.converged);
}
