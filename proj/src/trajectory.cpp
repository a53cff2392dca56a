#include "subslam/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace subslam {

void write_tum(const std::string& path, const Trajectory& traj) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_tum: cannot open " + path);
  char line[256];
  for (const auto& tp : traj) {
    const auto q = to_quaternion(tp.pose.rotation);
    std::snprintf(line, sizeof(line), "%.9g %.9g %.9g %.9g %.9g %.9g %.9g %.9g\n",
                  tp.t, tp.pose.translation.x(), tp.pose.translation.y(),
                  tp.pose.translation.z(), q.x(), q.y(), q.z(), q.w());
    f << line;
  }
  if (!f) throw std::runtime_error("write_tum: write failed for " + path);
}

Trajectory read_tum(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_tum: cannot open " + path);
  Trajectory traj;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double t, tx, ty, tz, qx, qy, qz, qw;
    if (!(ss >> t >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
      throw std::runtime_error("read_tum: bad line " + std::to_string(lineno) +
                               " in " + path);
    TimedPose tp;
    tp.t = t;
    tp.pose.translation = Vec3(tx, ty, tz);
    tp.pose.rotation = from_quaternion(Eigen::Quaterniond(qw, qx, qy, qz));
    if (!tp.pose.is_valid())
      throw std::runtime_error("read_tum: invalid pose at line " +
                               std::to_string(lineno) + " in " + path);
    traj.push_back(tp);
  }
  return traj;
}

std::vector<std::pair<int, int>> associate(const Trajectory& a, const Trajectory& b,
                                           double gate) {
  std::vector<std::pair<int, int>> pairs;
  if (a.empty() || b.empty()) return pairs;
  std::size_t j = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    while (j + 1 < b.size() &&
           std::abs(b[j + 1].t - a[i].t) <= std::abs(b[j].t - a[i].t))
      ++j;
    if (std::abs(b[j].t - a[i].t) <= gate)
      pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  return pairs;
}

}  // namespace subslam
