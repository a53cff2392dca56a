// Nonlinear least squares over SE(3) node poses with prior and between
// factors, solved by Levenberg-Marquardt on stacked twists. Used by both
// the per-submap frame graph and the global submap graph.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "subslam/pose.hpp"

namespace subslam {

using NodeId = std::int64_t;

struct Factor {
  enum class Kind { kPrior, kBetween };
  Kind kind = Kind::kPrior;
  NodeId i = 0;
  NodeId j = 0;  // unused for priors
  RigidPose measurement;
  Mat6 information = Mat6::Identity();
};

struct SolverConfig {
  double lambda_init = 1e-4;
  double lambda_up = 10.0;
  double lambda_down = 0.5;
  int max_iters = 100;
  double update_tol = 1e-8;
};

struct OptimizeResult {
  std::map<NodeId, RigidPose> poses;
  double final_cost = 0.0;
  int iterations = 0;
};

class FactorGraph {
 public:
  // Throws if the id already exists.
  void add_node(NodeId id, const RigidPose& initial);
  bool has_node(NodeId id) const;
  void set_node_pose(NodeId id, const RigidPose& pose);
  const RigidPose& node_pose(NodeId id) const;
  std::size_t num_nodes() const { return order_.size(); }

  // Information matrices must be symmetric positive definite; violations
  // are rejected at insertion.
  void add_prior(NodeId id, const RigidPose& measurement, const Mat6& information);
  void add_between(NodeId i, NodeId j, const RigidPose& measurement,
                   const Mat6& information);

  const std::vector<Factor>& factors() const { return factors_; }

  double cost() const;

  // Minimizes the factor cost; node poses are updated in place and also
  // returned. Requires at least one prior and every node reachable from a
  // prior through between factors.
  OptimizeResult optimize(const SolverConfig& cfg = {});

  // g2o-style text dump (VERTEX_SE3:QUAT / EDGE_SE3:QUAT lines).
  std::string dump_g2o() const;

 private:
  void validate_information(const Mat6& information) const;
  Vec6 residual(const Factor& f) const;

  std::map<NodeId, RigidPose> poses_;
  std::vector<NodeId> order_;
  std::vector<Factor> factors_;
};

// Diagonal information matrix from translation/rotation sigmas (twist
// order [translation; rotation]).
Mat6 diagonal_information(double sigma_trans, double sigma_rot);

}  // namespace subslam
