#include "subslam/factor_graph.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <cstdio>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace subslam {

void FactorGraph::add_node(NodeId id, const RigidPose& initial) {
  auto [it, inserted] = poses_.emplace(id, initial);
  if (!inserted) throw std::invalid_argument("FactorGraph: duplicate node id");
  order_.push_back(id);
}

bool FactorGraph::has_node(NodeId id) const { return poses_.count(id) > 0; }

void FactorGraph::set_node_pose(NodeId id, const RigidPose& pose) {
  poses_.at(id) = pose;
}

const RigidPose& FactorGraph::node_pose(NodeId id) const { return poses_.at(id); }

void FactorGraph::validate_information(const Mat6& information) const {
  if ((information - information.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("FactorGraph: information matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat6> eig(information);
  if (eig.eigenvalues().minCoeff() <= 0)
    throw std::invalid_argument("FactorGraph: information matrix not positive definite");
}

void FactorGraph::add_prior(NodeId id, const RigidPose& measurement,
                            const Mat6& information) {
  if (!has_node(id)) throw std::invalid_argument("FactorGraph: prior on unknown node");
  validate_information(information);
  factors_.push_back({Factor::Kind::kPrior, id, id, measurement, information});
}

void FactorGraph::add_between(NodeId i, NodeId j, const RigidPose& measurement,
                              const Mat6& information) {
  if (!has_node(i) || !has_node(j))
    throw std::invalid_argument("FactorGraph: between factor on unknown node");
  validate_information(information);
  factors_.push_back({Factor::Kind::kBetween, i, j, measurement, information});
}

Vec6 FactorGraph::residual(const Factor& f) const {
  if (f.kind == Factor::Kind::kPrior) {
    return se3_log(compose(inverse(f.measurement), poses_.at(f.i))).vector();
  }
  const RigidPose rel = compose(inverse(poses_.at(f.i)), poses_.at(f.j));
  return se3_log(compose(inverse(f.measurement), rel)).vector();
}

double FactorGraph::cost() const {
  double c = 0.0;
  for (const auto& f : factors_) {
    const Vec6 r = residual(f);
    c += r.dot(f.information * r);
  }
  return c;
}

OptimizeResult FactorGraph::optimize(const SolverConfig& cfg) {
  bool has_prior = false;
  for (const auto& f : factors_)
    if (f.kind == Factor::Kind::kPrior) has_prior = true;
  if (!has_prior) throw std::invalid_argument("FactorGraph: no prior factor");

  // Every node must be reachable from a prior through between factors.
  std::set<NodeId> reached;
  std::queue<NodeId> frontier;
  for (const auto& f : factors_)
    if (f.kind == Factor::Kind::kPrior && reached.insert(f.i).second)
      frontier.push(f.i);
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop();
    for (const auto& f : factors_) {
      if (f.kind != Factor::Kind::kBetween) continue;
      if (f.i == v && reached.insert(f.j).second) frontier.push(f.j);
      if (f.j == v && reached.insert(f.i).second) frontier.push(f.i);
    }
  }
  for (NodeId id : order_) {
    if (!reached.count(id))
      throw std::invalid_argument("FactorGraph: unconstrained node " + std::to_string(id));
  }

  std::unordered_map<NodeId, int> col;
  col.reserve(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i)
    col[order_[i]] = static_cast<int>(6 * i);
  const int dim = static_cast<int>(6 * order_.size());

  OptimizeResult out;
  double cur_cost = cost();
  double lambda = cfg.lambda_init;
  int iters = 0;

  std::vector<Eigen::Triplet<double>> trips;
  while (iters < cfg.max_iters) {
    ++iters;
    trips.clear();
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);

    auto add_block = [&](int r0, int c0, const Mat6& B) {
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
          if (B(a, b) != 0.0) trips.emplace_back(r0 + a, c0 + b, B(a, b));
    };

    for (const auto& f : factors_) {
      const Vec6 r = residual(f);
      const Twist rt = Twist::from_vector(r);
      if (f.kind == Factor::Kind::kPrior) {
        // Right-multiplied update x <- x * exp(d): dr/dd = Jr^{-1}(r).
        const Mat6 Ji = se3_right_jacobian_inv(rt);
        const int ci = col[f.i];
        const Mat6 JtW = Ji.transpose() * f.information;
        add_block(ci, ci, JtW * Ji);
        grad.segment<6>(ci) += JtW * r;
        diag.segment<6>(ci) += (JtW * Ji).diagonal();
      } else {
        const Mat6 Jj = se3_right_jacobian_inv(rt);
        const Mat6 Jli = se3_left_jacobian_inv(rt);
        const Mat6 Ji = -Jli * se3_adjoint(inverse(f.measurement));
        const int ci = col[f.i];
        const int cj = col[f.j];
        add_block(ci, ci, Ji.transpose() * f.information * Ji);
        add_block(cj, cj, Jj.transpose() * f.information * Jj);
        add_block(ci, cj, Ji.transpose() * f.information * Jj);
        add_block(cj, ci, Jj.transpose() * f.information * Ji);
        grad.segment<6>(ci) += Ji.transpose() * f.information * r;
        grad.segment<6>(cj) += Jj.transpose() * f.information * r;
        diag.segment<6>(ci) += (Ji.transpose() * f.information * Ji).diagonal();
        diag.segment<6>(cj) += (Jj.transpose() * f.information * Jj).diagonal();
      }
    }

    // LM damping on the diagonal of H.
    for (int k = 0; k < dim; ++k)
      trips.emplace_back(k, k, lambda * std::max(diag[k], 1e-12));

    Eigen::SparseMatrix<double> H(dim, dim);
    H.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(H);
    if (solver.info() != Eigen::Success) {
      lambda *= cfg.lambda_up;
      continue;
    }
    const Eigen::VectorXd delta = solver.solve(-grad);

    // Trial update.
    std::map<NodeId, RigidPose> backup = poses_;
    for (NodeId id : order_) {
      const Vec6 d = delta.segment<6>(col[id]);
      poses_[id] = compose(poses_[id], se3_exp(Twist::from_vector(d)));
    }
    const double new_cost = cost();
    if (new_cost <= cur_cost) {
      cur_cost = new_cost;
      lambda *= cfg.lambda_down;
      if (delta.norm() < cfg.update_tol) break;
    } else {
      poses_ = std::move(backup);
      lambda *= cfg.lambda_up;
    }
  }

  out.poses = poses_;
  out.final_cost = cur_cost;
  out.iterations = iters;
  return out;
}

std::string FactorGraph::dump_g2o() const {
  std::string s;
  char line[256];
  for (NodeId id : order_) {
    const RigidPose& p = poses_.at(id);
    const auto q = to_quaternion(p.rotation);
    std::snprintf(line, sizeof(line),
                  "VERTEX_SE3:QUAT %lld %.9g %.9g %.9g %.9g %.9g %.9g %.9g\n",
                  static_cast<long long>(id), p.translation.x(), p.translation.y(),
                  p.translation.z(), q.x(), q.y(), q.z(), q.w());
    s += line;
  }
  for (const auto& f : factors_) {
    if (f.kind != Factor::Kind::kBetween) continue;
    const auto q = to_quaternion(f.measurement.rotation);
    std::snprintf(line, sizeof(line),
                  "EDGE_SE3:QUAT %lld %lld %.9g %.9g %.9g %.9g %.9g %.9g %.9g",
                  static_cast<long long>(f.i), static_cast<long long>(f.j),
                  f.measurement.translation.x(), f.measurement.translation.y(),
                  f.measurement.translation.z(), q.x(), q.y(), q.z(), q.w());
    s += line;
    // Upper triangle of the information matrix, row-major.
    for (int a = 0; a < 6; ++a)
      for (int b = a; b < 6; ++b) {
        std::snprintf(line, sizeof(line), " %.9g", f.information(a, b));
        s += line;
      }
    s += "\n";
  }
  return s;
}

Mat6 diagonal_information(double sigma_trans, double sigma_rot) {
  Vec6 d;
  const double wt = 1.0 / (sigma_trans * sigma_trans);
  const double wr = 1.0 / (sigma_rot * sigma_rot);
  d << wt, wt, wt, wr, wr, wr;
  return d.asDiagonal();
}

}  // namespace subslam
