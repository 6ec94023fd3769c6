#include "equilib/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include <Eigen/Cholesky>

namespace equilib {

namespace {

constexpr double kInfV = std::numeric_limits<double>::infinity();

int thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("EQUILIB_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(hw);
}

double riesz_at(double dist, double alpha, int dim) {
  if (dist == 0.0) return kInfV;
  return std::pow(dist, alpha - dim);
}

// Kelvin reflection |y*| = R^2/|y|; the |x - y*| |y| / R product stays
// finite as y -> 0, where it equals R.
double reflected_product(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double R) {
  const double ny = y.norm();
  if (ny == 0.0) return R;
  const Eigen::VectorXd ystar = (R * R / (ny * ny)) * y;
  return (x - ystar).norm() * ny / R;
}

}  // namespace

KernelSpec KernelSpec::riesz(double alpha, int dim) {
  KernelSpec s;
  s.kind = KernelKind::Riesz;
  s.alpha = alpha;
  s.dim = dim;
  validate_spec(s);
  return s;
}

KernelSpec KernelSpec::log_disk() {
  KernelSpec s;
  s.kind = KernelKind::LogDisk;
  s.dim = 2;
  return s;
}

KernelSpec KernelSpec::green_ball(double radius, int dim) {
  KernelSpec s;
  s.kind = KernelKind::GreenBall;
  s.radius = radius;
  s.dim = dim;
  validate_spec(s);
  return s;
}

std::string KernelSpec::describe() const {
  switch (kind) {
    case KernelKind::Riesz:
      return "riesz(alpha=" + std::to_string(alpha) + ", dim=" + std::to_string(dim) + ")";
    case KernelKind::LogDisk:
      return "log_disk";
    case KernelKind::GreenBall:
      return "green_ball(radius=" + std::to_string(radius) + ", dim=" + std::to_string(dim) + ")";
  }
  return "?";
}

void validate_spec(const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelKind::Riesz:
      if (spec.dim < 1) throw std::invalid_argument("riesz kernel needs dim >= 1");
      if (!(spec.alpha > 0.0 && spec.alpha < spec.dim))
        throw std::invalid_argument("riesz kernel needs 0 < alpha < dim");
      break;
    case KernelKind::LogDisk:
      if (spec.dim != 2) throw std::invalid_argument("log kernel is restricted to dim 2");
      break;
    case KernelKind::GreenBall:
      if (spec.dim < 2) throw std::invalid_argument("green kernel needs dim >= 2");
      if (!(spec.radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
      break;
  }
}

bool admissible(const KernelSpec& spec, const Eigen::VectorXd& x) {
  if (x.size() != spec.dim) return false;
  switch (spec.kind) {
    case KernelKind::Riesz:
      return true;
    case KernelKind::LogDisk:
      return x.norm() < 1.0;
    case KernelKind::GreenBall:
      return x.norm() < spec.radius;
  }
  return false;
}

double kernel_value(const KernelSpec& spec, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y) {
  validate_spec(spec);
  if (!admissible(spec, x) || !admissible(spec, y))
    throw std::invalid_argument("evaluation point outside the kernel's admissible region");
  const double dist = (x - y).norm();
  switch (spec.kind) {
    case KernelKind::Riesz:
      return riesz_at(dist, spec.alpha, spec.dim);
    case KernelKind::LogDisk:
      return dist == 0.0 ? kInfV : -std::log(dist);
    case KernelKind::GreenBall: {
      if (dist == 0.0) return kInfV;
      const double num = reflected_product(x, y, spec.radius);
      if (spec.dim == 2) return std::log(num / dist);
      return std::pow(dist, 2.0 - spec.dim) - std::pow(num, 2.0 - spec.dim);
    }
  }
  throw std::logic_error("unreachable kernel kind");
}

double kernel_self_value(const KernelSpec& spec, const Eigen::VectorXd& x, double h) {
  validate_spec(spec);
  if (!admissible(spec, x))
    throw std::invalid_argument("evaluation point outside the kernel's admissible region");
  if (!(h > 0.0)) throw std::invalid_argument("self-distance must be positive");
  switch (spec.kind) {
    case KernelKind::Riesz:
      return riesz_at(h, spec.alpha, spec.dim);
    case KernelKind::LogDisk:
      return -std::log(h);
    case KernelKind::GreenBall: {
      const double num = reflected_product(x, x, spec.radius);
      if (spec.dim == 2) return std::log(num / h);
      return std::pow(h, 2.0 - spec.dim) - std::pow(num, 2.0 - spec.dim);
    }
  }
  throw std::logic_error("unreachable kernel kind");
}

KernelMatrix assemble(const KernelSpec& spec, std::shared_ptr<const PointCloud> cloud) {
  validate_spec(spec);
  if (!cloud) throw std::invalid_argument("null cloud");
  if (cloud->dim != spec.dim)
    throw std::invalid_argument("kernel dimension does not match cloud dimension");
  const Eigen::Index n = cloud->size();
  if (n == 0) throw std::invalid_argument("empty cloud");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!admissible(spec, cloud->point(i)))
      throw std::invalid_argument("cloud point " + std::to_string(i) +
                                  " outside the kernel's admissible region");

  KernelMatrix m;
  m.spec = spec;
  m.cloud = cloud;
  m.entries.resize(n, n);
  m.diag_h.resize(n);

  std::atomic<bool> coincident{false};
  const int workers = std::min<int>(thread_budget(), static_cast<int>(n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (Eigen::Index i = w; i < n; i += workers) {
        const Eigen::VectorXd xi = cloud->point(i);
        double nn = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
          if (j == i) continue;
          const Eigen::VectorXd xj = cloud->point(j);
          const double dist = (xi - xj).norm();
          if (dist <= 0.0) {
            coincident = true;
            return;
          }
          nn = std::min(nn, dist);
          m.entries(i, j) = kernel_value(spec, xi, xj);
        }
        const double h = (n == 1) ? 1.0 : 0.5 * nn;
        m.diag_h[i] = h;
        m.entries(i, i) = kernel_self_value(spec, xi, h);
      }
    });
  }
  for (auto& t : pool) t.join();
  if (coincident) throw std::invalid_argument("coincident points make the kernel matrix singular");

  // Exact symmetry: both (i,j) and (j,i) were computed from the same norm,
  // but enforce bit equality by mirroring the lower triangle.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) m.entries(j, i) = m.entries(i, j);

  if (!m.entries.allFinite())
    throw std::invalid_argument("kernel matrix has non-finite entries");

  const PdReport pd = check_pd(m.entries);
  if (!pd.positive_definite)
    throw std::runtime_error("assembled kernel matrix is not positive definite (pivot " +
                             std::to_string(pd.min_pivot) + " at index " +
                             std::to_string(pd.pivot_index) + "); refine the cloud");
  return m;
}

PdReport check_pd(const Eigen::MatrixXd& m) {
  PdReport report;
  if (m.rows() != m.cols() || m.rows() == 0) return report;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    const auto d = llt.matrixLLT().diagonal();
    Eigen::Index at = 0;
    const double l = d.minCoeff(&at);
    report.positive_definite = l > 0.0 && std::isfinite(l);
    report.min_pivot = l * l;
    report.pivot_index = at;
    if (report.positive_definite) return report;
  }
  // Locate the failing pivot with an unblocked factorization.
  Eigen::MatrixXd a = m;
  const Eigen::Index n = a.rows();
  double min_pivot = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) {
    double pivot = a(k, k);
    for (Eigen::Index i = 0; i < k; ++i) pivot -= a(k, i) * a(k, i);
    min_pivot = std::min(min_pivot, pivot);
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      report.positive_definite = false;
      report.min_pivot = pivot;
      report.pivot_index = k;
      return report;
    }
    const double l = std::sqrt(pivot);
    a(k, k) = l;
    for (Eigen::Index j = k + 1; j < n; ++j) {
      double v = a(j, k);
      for (Eigen::Index i = 0; i < k; ++i) v -= a(j, i) * a(k, i);
      a(j, k) = v / l;
    }
  }
  report.positive_definite = true;
  report.min_pivot = min_pivot;
  report.pivot_index = -1;
  return report;
}

PdReport check_pd(const KernelMatrix& m) { return check_pd(m.entries); }

}  // namespace equilib
