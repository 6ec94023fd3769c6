#pragma once

#include <memory>
#include <string>

#include <Eigen/Core>

#include "equilib/geometry.hpp"

namespace equilib {

enum class KernelKind { Riesz, LogDisk, GreenBall };

/// Choice of interaction kernel on R^dim.
///
/// Riesz:     |x-y|^(alpha-dim), 0 < alpha < dim.
/// LogDisk:   -log|x-y|, dim 2, points restricted to the open unit disk.
/// GreenBall: Green function of the ball |x| < radius (log form for dim 2,
///            Kelvin-reflection Newtonian form for dim >= 3).
struct KernelSpec {
  KernelKind kind = KernelKind::Riesz;
  int dim = 3;
  double alpha = 2.0;   // Riesz only
  double radius = 1.0;  // GreenBall only

  static KernelSpec riesz(double alpha, int dim);
  static KernelSpec log_disk();
  static KernelSpec green_ball(double radius, int dim);

  std::string describe() const;
};

/// Throws std::invalid_argument if the spec parameters are out of range.
void validate_spec(const KernelSpec& spec);

/// True iff x is a legal evaluation point for the kernel.
bool admissible(const KernelSpec& spec, const Eigen::VectorXd& x);

/// Kernel value at a pair of admissible points. Returns +infinity on the
/// diagonal of singular kernels.
double kernel_value(const KernelSpec& spec, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y);

/// Kernel value "at self-distance h": the singular pair distance |x-y| in
/// the closed form is replaced by h while the smooth part is evaluated at
/// y = x. Used for the diagonal regularization of assembled matrices.
double kernel_self_value(const KernelSpec& spec, const Eigen::VectorXd& x, double h);

/// Dense symmetric kernel matrix on a cloud.
///
/// Off-diagonal entries are exact kernel values; the diagonal carries the
/// kernel at the effective self-distance h_i = half the nearest-neighbor
/// distance of point i (recorded in diag_h). Assembly fails hard if the
/// result is not positive definite.
struct KernelMatrix {
  KernelSpec spec;
  std::shared_ptr<const PointCloud> cloud;
  Eigen::MatrixXd entries;
  Eigen::VectorXd diag_h;

  Eigen::Index size() const { return entries.rows(); }
};

struct PdReport {
  bool positive_definite = false;
  double min_pivot = 0.0;  // smallest Cholesky pivot encountered
  Eigen::Index pivot_index = -1;
};

/// Assembles the kernel matrix on a cloud. Parallelizes across rows
/// (thread count capped by the EQUILIB_THREADS environment variable).
KernelMatrix assemble(const KernelSpec& spec, std::shared_ptr<const PointCloud> cloud);

/// Cholesky-based positive definiteness check; never throws.
PdReport check_pd(const Eigen::MatrixXd& m);
PdReport check_pd(const KernelMatrix& m);

}  // namespace equilib
