#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace equilib {

/// A finite point-cloud discretization of a closed conductor in R^n.
///
/// Points are rows of `points`; `region[i]` names the geometric component
/// the i-th point belongs to (e.g. "outer", "inner"). Clouds are immutable
/// after construction and safe to share across threads.
struct PointCloud {
  int dim = 0;
  Eigen::MatrixXd points;            // N x dim
  std::vector<std::string> region;   // size N

  Eigen::Index size() const { return points.rows(); }
  Eigen::VectorXd point(Eigen::Index i) const { return points.row(i).transpose(); }
};

/// An ordered chain of index sets over a base cloud. Used both for
/// decreasing families (stages shrink) and exhaustions (stages grow).
struct SubsetFamily {
  std::shared_ptr<const PointCloud> base;
  std::vector<std::vector<int>> stages;
};

/// Checks the PointCloud invariants (coordinate sizes, distinct points)
/// and throws std::invalid_argument on violation.
void validate_cloud(const PointCloud& cloud);

/// Minimum pairwise distance; requires at least two points.
double min_pairwise_distance(const PointCloud& cloud);

/// Per-point distance to the nearest other point.
Eigen::VectorXd nearest_neighbor_distances(const PointCloud& cloud);

/// Deterministic sampling of the sphere |x| = radius with `count` points.
/// dim 2: equally spaced angles; dim 3: equal-area spiral layout.
PointCloud make_sphere(int dim, double radius, int count,
                       const std::string& label = "sphere");

/// `count` uniformly spaced points on the segment [a,b] embedded on the
/// first coordinate axis of R^dim, endpoints included.
PointCloud make_interval(double a, double b, int count, int dim,
                         const std::string& label = "interval");

/// Concatenation of two clouds of equal dimension. Index order is a's
/// points then b's; region labels are preserved. Coincident points across
/// the inputs are a hard error.
PointCloud union_clouds(const PointCloud& a, const PointCloud& b);

/// Restriction of a cloud to a subset of its indices (order preserved).
PointCloud subcloud(const PointCloud& cloud, const std::vector<int>& indices);

/// Increasing chain of index prefixes under a deterministic order (region
/// label, then construction order). fractions must be strictly increasing
/// with last element 1, so the final stage is the full index set.
SubsetFamily nested_exhaustion(std::shared_ptr<const PointCloud> cloud,
                               const std::vector<double>& fractions);

/// Indices of all points whose region label equals `label`.
std::vector<int> region_indices(const PointCloud& cloud, const std::string& label);

}  // namespace equilib
