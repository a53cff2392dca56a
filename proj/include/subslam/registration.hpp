// Prior-seeded rigid registration of two oriented-surface-point clouds
// with a Generalized-ICP plane-to-plane objective. Each surface point is
// given a disk-like covariance (epsilon along its normal, unit across)
// and the Mahalanobis residual sum is minimized by damped Gauss-Newton
// on the se(3) twist of the current estimate.

#pragma once

#include <vector>

#include "subslam/features.hpp"
#include "subslam/pose.hpp"

namespace subslam {

struct RegConfig {
  double epsilon = 1e-3;   // covariance thickness along the normal
  double tol = 1e-4;       // twist-norm convergence threshold
  int max_iters = 50;
  double min_match = 0.3;  // minimum matched fraction for convergence
};

struct RegistrationResult {
  RigidPose transform;          // maps source into the target frame
  double final_error = 0.0;     // mean squared plane-to-plane residual [m^2]
  double matched_fraction = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> error_history;  // accepted error per iteration
};

// Registers source onto target, starting from `prior`; correspondences
// are nearest target surface points within distance r. Throws
// "insufficient features" when either cloud is empty; a low matched
// fraction is reported via converged=false instead.
RegistrationResult register_clouds(const OrientedCloud& source,
                                   const OrientedCloud& target,
                                   const RigidPose& prior, double r,
                                   const RegConfig& cfg = {});

}  // namespace subslam
