#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "equilib/geometry.hpp"
#include "equilib/io.hpp"

using namespace equilib;

TEST_CASE("sphere dim 2 equally spaced angles") {
  const PointCloud c = make_sphere(2, 1.0, 4);
  REQUIRE(c.size() == 4);
  const double pts[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(c.points(i, 0) - pts[i][0]) < 1e-15);
    CHECK(std::abs(c.points(i, 1) - pts[i][1]) < 1e-15);
  }
}

TEST_CASE("sphere dim 3 lies on the sphere") {
  const PointCloud c = make_sphere(3, 1.0, 100);
  for (Eigen::Index i = 0; i < c.size(); ++i)
    CHECK(std::abs(c.points.row(i).norm() - 1.0) < 1e-12);
  const PointCloud half = make_sphere(3, 0.5, 100);
  for (Eigen::Index i = 0; i < half.size(); ++i)
    CHECK(std::abs(half.points.row(i).norm() - 0.5) < 1e-12);
}

TEST_CASE("sphere scaling homogeneity of nearest-neighbor distance") {
  const PointCloud unit = make_sphere(3, 1.0, 100);
  const PointCloud half = make_sphere(3, 0.5, 100);
  const Eigen::VectorXd d1 = nearest_neighbor_distances(unit);
  const Eigen::VectorXd d2 = nearest_neighbor_distances(half);
  for (Eigen::Index i = 0; i < d1.size(); ++i)
    CHECK(std::abs(d2[i] - 0.5 * d1[i]) < 1e-12);
}

TEST_CASE("sphere construction is deterministic") {
  const PointCloud a = make_sphere(3, 1.0, 257);
  const PointCloud b = make_sphere(3, 1.0, 257);
  CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK(min_pairwise_distance(a) > 0.0);
}

TEST_CASE("sphere rejects bad arguments") {
  CHECK_THROWS_AS(make_sphere(4, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(make_sphere(3, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_sphere(3, -1.0, 10), std::invalid_argument);
}

TEST_CASE("interval layouts") {
  const PointCloud a = make_interval(-1.0, 1.0, 3, 2);
  REQUIRE(a.size() == 3);
  CHECK(a.points(0, 0) == -1.0);
  CHECK(a.points(1, 0) == 0.0);
  CHECK(a.points(2, 0) == 1.0);
  CHECK(a.points(1, 1) == 0.0);

  const PointCloud b = make_interval(0.0, 1.0, 2, 3);
  REQUIRE(b.size() == 2);
  CHECK(b.points(0, 0) == 0.0);
  CHECK(b.points(1, 0) == 1.0);
  CHECK(b.points.col(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(b.points.col(2).cwiseAbs().maxCoeff() == 0.0);

  const PointCloud c = make_interval(-1.0, 1.0, 101, 2);
  for (Eigen::Index i = 1; i < c.size(); ++i)
    CHECK(std::abs(c.points(i, 0) - c.points(i - 1, 0) - 0.02) < 1e-14);

  CHECK_THROWS_AS(make_interval(1.0, 1.0, 5, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_interval(2.0, 1.0, 5, 2), std::invalid_argument);
}

TEST_CASE("union concatenates and preserves labels") {
  const PointCloud a = make_sphere(2, 1.0, 4, "a");
  const PointCloud b = make_sphere(2, 2.0, 8, "b");
  const PointCloud u = union_clouds(a, b);
  REQUIRE(u.size() == 12);
  for (int i = 0; i < 4; ++i) CHECK(u.region[i] == "a");
  for (int i = 4; i < 12; ++i) CHECK(u.region[i] == "b");
  CHECK((u.points.topRows(4) - a.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK(min_pairwise_distance(u) > 0.0);

  PointCloud empty;
  empty.dim = 2;
  empty.points.resize(0, 2);
  const PointCloud same = union_clouds(a, empty);
  CHECK(same.size() == a.size());
  CHECK((same.points - a.points).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("union rejects mismatches and duplicates") {
  const PointCloud a = make_sphere(2, 1.0, 4);
  const PointCloud b = make_sphere(3, 1.0, 8);
  CHECK_THROWS_AS(union_clouds(a, b), std::invalid_argument);
  CHECK_THROWS_AS(union_clouds(a, a), std::invalid_argument);
}

TEST_CASE("nested exhaustion stage sizes and nesting") {
  auto cloud = std::make_shared<PointCloud>(make_interval(0.0, 1.0, 10, 2));
  const SubsetFamily fam = nested_exhaustion(cloud, {0.5, 1.0});
  REQUIRE(fam.stages.size() == 2);
  CHECK(fam.stages[0].size() == 5);
  CHECK(fam.stages[1].size() == 10);

  auto big = std::make_shared<PointCloud>(make_interval(0.0, 1.0, 100, 2));
  const SubsetFamily fam3 = nested_exhaustion(big, {0.25, 0.5, 1.0});
  CHECK(fam3.stages[0].size() == 25);
  CHECK(fam3.stages[1].size() == 50);
  CHECK(fam3.stages[2].size() == 100);
  for (size_t s = 0; s + 1 < fam3.stages.size(); ++s)
    for (size_t k = 0; k < fam3.stages[s].size(); ++k)
      CHECK(fam3.stages[s][k] == fam3.stages[s + 1][k]);  // prefix nesting

  CHECK_THROWS_AS(nested_exhaustion(cloud, {}), std::invalid_argument);
  CHECK_THROWS_AS(nested_exhaustion(cloud, {0.5, 0.4, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(nested_exhaustion(cloud, {0.5, 0.9}), std::invalid_argument);
}

TEST_CASE("exhaustion order sorts by region then construction order") {
  const PointCloud u = union_clouds(make_sphere(2, 1.0, 4, "zzz"), make_sphere(2, 2.0, 4, "aaa"));
  const SubsetFamily fam = nested_exhaustion(std::make_shared<PointCloud>(u), {0.5, 1.0});
  // "aaa" points (indices 4..7) come first.
  for (int i = 0; i < 4; ++i) CHECK(fam.stages[0][i] == 4 + i);
}

TEST_CASE("cloud CSV round trip") {
  const PointCloud c = union_clouds(make_sphere(3, 1.0, 16, "outer"),
                                    make_sphere(3, 0.5, 8, "inner"));
  const PointCloud back = cloud_from_csv(cloud_to_csv(c));
  REQUIRE(back.size() == c.size());
  CHECK((back.points - c.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.region == c.region);
}
