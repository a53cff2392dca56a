// Deterministic synthetic data: fan-FOV range-sensor raycasting over
// analytic scenes, drift-injected odometry, and full dataset generation
// from plain-text scenario files.

#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "subslam/cloud.hpp"
#include "subslam/scene.hpp"
#include "subslam/trajectory.hpp"

namespace subslam {

struct SensorModel {
  double h_fov_deg = 90.0;
  double v_fov_deg = 40.0;
  int h_beams = 128;
  int v_beams = 48;
  double max_range = 15.0;
  double range_noise_sigma = 0.02;
  double dropout_prob = 0.0;
  double multipath_prob = 0.0;
};

struct DriftModel {
  double yaw_rate_bias_deg_s = 0.0;
  double velocity_scale_error = 0.0;
  double trans_noise_sigma = 0.0;    // meters per step
  double rot_noise_sigma_deg = 0.0;  // degrees per step
  std::uint64_t seed = 0;

  bool is_zero() const {
    return yaw_rate_bias_deg_s == 0.0 && velocity_scale_error == 0.0 &&
           trans_noise_sigma == 0.0 && rot_noise_sigma_deg == 0.0;
  }
};

// Casts the sensor's beam grid from `sensor_pose` (world), keeping first
// hits within max_range; Gaussian range noise, beam dropout and
// double-range multipath ghosts are applied from the given stream. Points
// come back in the sensor frame.
PointCloud render_frame(const Scene& scene, const RigidPose& sensor_pose,
                        const SensorModel& model, std::mt19937_64& rng);

// Integrates the true relative motions corrupted by the drift model; the
// first pose is preserved and a zero model reproduces the input exactly.
Trajectory simulate_odometry(const Trajectory& true_traj, const DriftModel& drift);

// Parsed scenario file: scene, trajectory, sensor, drift, bookkeeping.
struct ScenarioSpec {
  std::string name = "unnamed";
  std::uint64_t seed = 0;
  int frames = 0;
  double rate_hz = 6.0;
  SensorModel sensor;
  DriftModel drift;
  RigidPose mount;  // vehicle -> sensor
  double speed_mps = 0.3;
  double turn_rate_dps = 20.0;
  struct Waypoint {
    Vec3 position;
    double yaw_deg;
  };
  std::vector<Waypoint> waypoints;
  Scene scene;

  static ScenarioSpec load(const std::string& path);
};

// Vehicle poses sampled at the frame rate along the waypoint path
// (constant speed, yaw interpolated, in-place turns at the turn rate).
Trajectory waypoint_trajectory(const ScenarioSpec& spec);

// Writes frames/NNNNNN.ply, odom.tum, gt.tum, gt_mesh.ply and
// manifest.txt under out_dir. Trajectory files hold sensor poses.
void generate_dataset(const ScenarioSpec& spec, const std::string& out_dir);

// Derives the per-frame rng stream from the dataset seed.
std::mt19937_64 frame_rng(std::uint64_t seed, std::int64_t frame_index);

}  // namespace subslam
