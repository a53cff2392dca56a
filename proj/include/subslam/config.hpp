#pragma once

#include <string>
#include <vector>

namespace subslam {

// One `key = value` entry of a plain-text config; '#' starts a comment,
// keys may repeat (scenario files use that for waypoints/primitives).
struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<KeyValue> parse_key_value_file(const std::string& path);
std::vector<KeyValue> parse_key_value_text(const std::string& text,
                                           const std::string& origin);

// Every tunable of the pipeline. Angles are degrees in the file and kept
// as degrees here; call sites convert.
struct PipelineConfig {
  // feature / overlap grid resolution
  double r = 0.5;

  // registration
  double reg_epsilon = 1e-3;
  double reg_tol = 1e-4;
  int reg_max_iters = 50;
  double reg_min_match = 0.3;

  // frontend
  double overlap_thresh = 0.3;
  bool frontend_reopt_per_frame = true;

  // factor information
  double prior_sigma_trans = 1e-3;
  double prior_sigma_rot_deg = 0.06;
  double sigma_trans_floor = 0.02;
  double sigma_rot_deg = 0.5;
  double odom_sigma_trans = 0.05;
  double odom_sigma_rot_deg = 1.0;

  // graph solver
  double solver_lambda_init = 1e-4;
  int solver_max_iters = 100;
  double solver_update_tol = 1e-8;

  // tsdf
  double voxel_size = 0.1;
  double truncation_voxels = 3.0;
  double obs_weight = 1.0;
  bool tsdf_nearest_interp = false;

  // backend
  double lc_overlap_thresh = 0.5;
  double lc_error_floor = 1e-4;
  double lc_error_median_factor = 4.0;
  double reprocess_trans_thresh = 0.01;
  double reprocess_rot_thresh_deg = 0.1;
  bool lc_query_new = true;

  double truncation() const { return voxel_size * truncation_voxels; }

  // Unknown keys are rejected with their line number.
  static PipelineConfig load(const std::string& path);
  void apply(const std::vector<KeyValue>& entries);

  // Fully resolved snapshot, parseable by load().
  std::string serialize() const;
};

}  // namespace subslam
