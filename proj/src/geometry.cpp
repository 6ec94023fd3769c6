#include "equilib/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace equilib {

void validate_cloud(const PointCloud& cloud) {
  if (cloud.dim <= 0) throw std::invalid_argument("cloud dimension must be positive");
  if (cloud.points.cols() != cloud.dim)
    throw std::invalid_argument("coordinate width does not match cloud dimension");
  if (static_cast<Eigen::Index>(cloud.region.size()) != cloud.points.rows())
    throw std::invalid_argument("region labels do not match point count");
  const Eigen::Index n = cloud.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!cloud.points.row(i).allFinite())
      throw std::invalid_argument("non-finite coordinate in point cloud");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if ((cloud.points.row(i) - cloud.points.row(j)).norm() <= 0.0)
        throw std::invalid_argument("coincident points in cloud at indices " +
                                    std::to_string(i) + "," + std::to_string(j));
    }
  }
}

double min_pairwise_distance(const PointCloud& cloud) {
  const Eigen::Index n = cloud.size();
  if (n < 2) throw std::invalid_argument("need at least two points");
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      best = std::min(best, (cloud.points.row(i) - cloud.points.row(j)).norm());
  return best;
}

Eigen::VectorXd nearest_neighbor_distances(const PointCloud& cloud) {
  const Eigen::Index n = cloud.size();
  if (n < 2) throw std::invalid_argument("need at least two points");
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      best = std::min(best, (cloud.points.row(i) - cloud.points.row(j)).norm());
    }
    out[i] = best;
  }
  return out;
}

PointCloud make_sphere(int dim, double radius, int count, const std::string& label) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("make_sphere supports dim 2 and 3");
  if (radius <= 0.0) throw std::invalid_argument("radius must be positive");
  if (count < 4) throw std::invalid_argument("make_sphere needs count >= 4");

  PointCloud cloud;
  cloud.dim = dim;
  cloud.points.resize(count, dim);
  cloud.region.assign(count, label);

  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double th = 2.0 * std::numbers::pi * k / count;
      cloud.points(k, 0) = radius * std::cos(th);
      cloud.points(k, 1) = radius * std::sin(th);
    }
  } else {
    // Equal-area spiral: latitudes at offset midpoints, golden-angle swirl.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double th = golden * k;
      cloud.points(k, 0) = radius * r * std::cos(th);
      cloud.points(k, 1) = radius * r * std::sin(th);
      cloud.points(k, 2) = radius * z;
    }
  }
  if (min_pairwise_distance(cloud) <= 0.0)
    throw std::invalid_argument("sphere sampling produced coincident points");
  return cloud;
}

PointCloud make_interval(double a, double b, int count, int dim, const std::string& label) {
  if (!(a < b)) throw std::invalid_argument("make_interval requires a < b");
  if (count < 2) throw std::invalid_argument("make_interval needs count >= 2");
  if (dim < 1) throw std::invalid_argument("dimension must be positive");

  PointCloud cloud;
  cloud.dim = dim;
  cloud.points = Eigen::MatrixXd::Zero(count, dim);
  cloud.region.assign(count, label);
  for (int k = 0; k < count; ++k)
    cloud.points(k, 0) = a + (b - a) * static_cast<double>(k) / (count - 1);
  return cloud;
}

PointCloud union_clouds(const PointCloud& a, const PointCloud& b) {
  if (a.dim != b.dim) throw std::invalid_argument("union of clouds with different dimensions");
  PointCloud out;
  out.dim = a.dim;
  out.points.resize(a.size() + b.size(), a.dim);
  out.points.topRows(a.size()) = a.points;
  out.points.bottomRows(b.size()) = b.points;
  out.region = a.region;
  out.region.insert(out.region.end(), b.region.begin(), b.region.end());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j)
      if ((a.points.row(i) - b.points.row(j)).norm() <= 0.0)
        throw std::invalid_argument("union would create coincident points");
  return out;
}

PointCloud subcloud(const PointCloud& cloud, const std::vector<int>& indices) {
  PointCloud out;
  out.dim = cloud.dim;
  out.points.resize(static_cast<Eigen::Index>(indices.size()), cloud.dim);
  out.region.reserve(indices.size());
  Eigen::Index row = 0;
  for (int idx : indices) {
    if (idx < 0 || idx >= cloud.size()) throw std::invalid_argument("subcloud index out of range");
    out.points.row(row++) = cloud.points.row(idx);
    out.region.push_back(cloud.region[idx]);
  }
  return out;
}

SubsetFamily nested_exhaustion(std::shared_ptr<const PointCloud> cloud,
                               const std::vector<double>& fractions) {
  if (!cloud) throw std::invalid_argument("null cloud");
  if (fractions.empty()) throw std::invalid_argument("empty fraction list");
  for (size_t k = 0; k < fractions.size(); ++k) {
    if (fractions[k] <= 0.0 || fractions[k] > 1.0)
      throw std::invalid_argument("fractions must lie in (0,1]");
    if (k > 0 && fractions[k] <= fractions[k - 1])
      throw std::invalid_argument("fractions must be strictly increasing");
  }
  if (fractions.back() != 1.0)
    throw std::invalid_argument("last fraction must equal 1");

  const Eigen::Index n = cloud->size();
  // Deterministic space-filling order: region label, then construction order.
  std::vector<int> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return cloud->region[a] < cloud->region[b]; });

  SubsetFamily family;
  family.base = cloud;
  for (double frac : fractions) {
    const auto take = static_cast<size_t>(std::ceil(frac * static_cast<double>(n)));
    family.stages.emplace_back(order.begin(), order.begin() + std::min<size_t>(take, n));
  }
  return family;
}

std::vector<int> region_indices(const PointCloud& cloud, const std::string& label) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < cloud.size(); ++i)
    if (cloud.region[i] == label) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace equilib
