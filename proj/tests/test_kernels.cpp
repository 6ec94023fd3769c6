#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "equilib/kernels.hpp"

using namespace equilib;

namespace {

Eigen::VectorXd vec2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

Eigen::VectorXd vec3(double x, double y, double z) {
  Eigen::VectorXd v(3);
  v << x, y, z;
  return v;
}

}  // namespace

TEST_CASE("riesz values") {
  const KernelSpec spec = KernelSpec::riesz(2.0, 3);
  CHECK(kernel_value(spec, vec3(0, 0, 0), vec3(2, 0, 0)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(kernel_value(spec, vec3(1, 0, 0), vec3(1, 0, 0)) == kInf);
  CHECK_THROWS_AS(KernelSpec::riesz(3.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::riesz(0.0, 3), std::invalid_argument);
}

TEST_CASE("log disk values and admissibility") {
  const KernelSpec spec = KernelSpec::log_disk();
  CHECK(std::abs(kernel_value(spec, vec2(-0.5, 0), vec2(0.5, 0))) < 1e-15);  // -log 1
  CHECK_THROWS_AS(kernel_value(spec, vec2(1.5, 0), vec2(0, 0)), std::invalid_argument);
}

TEST_CASE("green ball closed forms") {
  const KernelSpec disk = KernelSpec::green_ball(1.0, 2);
  // y at the center: g = log(R/|x|).
  CHECK(kernel_value(disk, vec2(0.5, 0), vec2(0, 0)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));

  const KernelSpec ball = KernelSpec::green_ball(1.0, 3);
  // Newtonian case at the center: |x|^-1 - R^-1.
  CHECK(kernel_value(ball, vec3(0.5, 0, 0), vec3(0, 0, 0)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(kernel_value(ball, vec3(1.5, 0, 0), vec3(0, 0, 0)), std::invalid_argument);
}

TEST_CASE("green ball symmetry and positivity") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  const KernelSpec disk = KernelSpec::green_ball(1.0, 2);
  const KernelSpec ball = KernelSpec::green_ball(1.2, 3);
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd x2 = vec2(u(rng), u(rng)), y2 = vec2(u(rng), u(rng));
    if ((x2 - y2).norm() < 1e-6) continue;
    const double a = kernel_value(disk, x2, y2), b = kernel_value(disk, y2, x2);
    CHECK(std::abs(a - b) < 1e-12);
    CHECK(a > 0.0);
    const Eigen::VectorXd x3 = vec3(u(rng), u(rng), u(rng)), y3 = vec3(u(rng), u(rng), u(rng));
    if ((x3 - y3).norm() < 1e-6) continue;
    const double c = kernel_value(ball, x3, y3), d = kernel_value(ball, y3, x3);
    CHECK(std::abs(c - d) < 1e-12);
    CHECK(c > 0.0);
  }
}

TEST_CASE("riesz homogeneity under scaling") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const KernelSpec spec = KernelSpec::riesz(2.5, 3);
  for (double s : {0.5, 2.0}) {
    for (int t = 0; t < 20; ++t) {
      const Eigen::VectorXd x = vec3(u(rng), u(rng), u(rng));
      const Eigen::VectorXd y = vec3(u(rng), u(rng), u(rng));
      if ((x - y).norm() < 1e-3) continue;
      const double base = kernel_value(spec, x, y);
      const double scaled = kernel_value(spec, (s * x).eval(), (s * y).eval());
      CHECK(scaled == doctest::Approx(std::pow(s, spec.alpha - 3) * base).epsilon(1e-12));
    }
  }
}

TEST_CASE("two point assembly with half nearest-neighbor diagonal") {
  auto cloud = std::make_shared<PointCloud>(make_interval(0.0, 2.0, 2, 3));
  const KernelMatrix m = assemble(KernelSpec::riesz(2.0, 3), cloud);
  CHECK(m.entries(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.entries(1, 0) == m.entries(0, 1));
  CHECK(m.diag_h[0] == doctest::Approx(1.0));  // half of distance 2
  CHECK(m.entries(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.entries(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("assembled matrices are exactly symmetric") {
  auto cloud = std::make_shared<PointCloud>(make_sphere(3, 1.0, 100));
  const KernelMatrix m = assemble(KernelSpec::riesz(2.5, 3), cloud);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    for (Eigen::Index j = 0; j < i; ++j) CHECK(m.entries(i, j) == m.entries(j, i));
}

TEST_CASE("log kernel on a circle scaled into the disk is PD") {
  auto circle = std::make_shared<PointCloud>(make_sphere(2, 0.8, 200));
  const KernelMatrix m = assemble(KernelSpec::log_disk(), circle);
  const PdReport pd = check_pd(m);
  CHECK(pd.positive_definite);
  CHECK(pd.min_pivot > 0.0);
}

TEST_CASE("riesz on a 500 point sphere is PD") {
  auto cloud = std::make_shared<PointCloud>(make_sphere(3, 1.0, 500));
  const KernelMatrix m = assemble(KernelSpec::riesz(2.5, 3), cloud);
  CHECK(check_pd(m).positive_definite);
}

TEST_CASE("check_pd on synthetic matrices") {
  Eigen::MatrixXd one(1, 1);
  one << 1.0;
  CHECK(check_pd(one).positive_definite);
  CHECK(check_pd(one).min_pivot == doctest::Approx(1.0));

  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  const PdReport r = check_pd(bad);
  CHECK_FALSE(r.positive_definite);
  CHECK(r.min_pivot < 0.0);
  CHECK(r.pivot_index == 1);
}

TEST_CASE("quadratic form positivity on random directions") {
  auto cloud = std::make_shared<PointCloud>(make_sphere(3, 1.0, 120));
  const KernelMatrix m = assemble(KernelSpec::riesz(2.0, 3), cloud);
  std::mt19937 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd v(m.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
    if (v.norm() == 0.0) continue;
    CHECK(v.dot(m.entries * v) > 0.0);
  }
}

TEST_CASE("assembly rejects inadmissible clouds") {
  auto outside = std::make_shared<PointCloud>(make_sphere(2, 1.5, 16));
  CHECK_THROWS_AS(assemble(KernelSpec::log_disk(), outside), std::invalid_argument);
  auto wrong_dim = std::make_shared<PointCloud>(make_sphere(2, 0.5, 16));
  CHECK_THROWS_AS(assemble(KernelSpec::riesz(2.5, 3), wrong_dim), std::invalid_argument);
}
