#include "subslam/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace subslam {

std::vector<KeyValue> parse_key_value_text(const std::string& text,
                                           const std::string& origin) {
  std::vector<KeyValue> out;
  std::istringstream stream(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(stream, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    KeyValue kv;
    kv.key = trim(line.substr(0, eq));
    kv.value = trim(line.substr(eq + 1));
    kv.line = lineno;
    if (kv.key.empty() || kv.value.empty())
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": empty key or value");
    out.push_back(std::move(kv));
  }
  return out;
}

std::vector<KeyValue> parse_key_value_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_key_value_text(buf.str(), path);
}

namespace {

double to_double(const KeyValue& kv) {
  std::size_t used = 0;
  const double v = std::stod(kv.value, &used);
  if (used != kv.value.size())
    throw std::runtime_error("line " + std::to_string(kv.line) +
                             ": bad numeric value '" + kv.value + "'");
  return v;
}

int to_int(const KeyValue& kv) {
  std::size_t used = 0;
  const int v = std::stoi(kv.value, &used);
  if (used != kv.value.size())
    throw std::runtime_error("line " + std::to_string(kv.line) +
                             ": bad integer value '" + kv.value + "'");
  return v;
}

bool to_bool(const KeyValue& kv) {
  if (kv.value == "true" || kv.value == "1") return true;
  if (kv.value == "false" || kv.value == "0") return false;
  throw std::runtime_error("line " + std::to_string(kv.line) +
                           ": bad boolean value '" + kv.value + "'");
}

}  // namespace

void PipelineConfig::apply(const std::vector<KeyValue>& entries) {
  const std::map<std::string, std::function<void(const KeyValue&)>> setters = {
      {"r", [&](const KeyValue& kv) { r = to_double(kv); }},
      {"reg.epsilon", [&](const KeyValue& kv) { reg_epsilon = to_double(kv); }},
      {"reg.tol", [&](const KeyValue& kv) { reg_tol = to_double(kv); }},
      {"reg.max_iters", [&](const KeyValue& kv) { reg_max_iters = to_int(kv); }},
      {"reg.min_match", [&](const KeyValue& kv) { reg_min_match = to_double(kv); }},
      {"frontend.overlap_thresh",
       [&](const KeyValue& kv) { overlap_thresh = to_double(kv); }},
      {"frontend.reopt_per_frame",
       [&](const KeyValue& kv) { frontend_reopt_per_frame = to_bool(kv); }},
      {"graph.prior_sigma_trans",
       [&](const KeyValue& kv) { prior_sigma_trans = to_double(kv); }},
      {"graph.prior_sigma_rot_deg",
       [&](const KeyValue& kv) { prior_sigma_rot_deg = to_double(kv); }},
      {"graph.sigma_trans_floor",
       [&](const KeyValue& kv) { sigma_trans_floor = to_double(kv); }},
      {"graph.sigma_rot_deg",
       [&](const KeyValue& kv) { sigma_rot_deg = to_double(kv); }},
      {"graph.odom_sigma_trans",
       [&](const KeyValue& kv) { odom_sigma_trans = to_double(kv); }},
      {"graph.odom_sigma_rot_deg",
       [&](const KeyValue& kv) { odom_sigma_rot_deg = to_double(kv); }},
      {"solver.lambda_init",
       [&](const KeyValue& kv) { solver_lambda_init = to_double(kv); }},
      {"solver.max_iters",
       [&](const KeyValue& kv) { solver_max_iters = to_int(kv); }},
      {"solver.update_tol",
       [&](const KeyValue& kv) { solver_update_tol = to_double(kv); }},
      {"tsdf.voxel_size", [&](const KeyValue& kv) { voxel_size = to_double(kv); }},
      {"tsdf.truncation_voxels",
       [&](const KeyValue& kv) { truncation_voxels = to_double(kv); }},
      {"tsdf.obs_weight", [&](const KeyValue& kv) { obs_weight = to_double(kv); }},
      {"tsdf.nearest_interp",
       [&](const KeyValue& kv) { tsdf_nearest_interp = to_bool(kv); }},
      {"backend.lc_overlap_thresh",
       [&](const KeyValue& kv) { lc_overlap_thresh = to_double(kv); }},
      {"backend.lc_error_floor",
       [&](const KeyValue& kv) { lc_error_floor = to_double(kv); }},
      {"backend.lc_error_median_factor",
       [&](const KeyValue& kv) { lc_error_median_factor = to_double(kv); }},
      {"backend.reprocess_trans_thresh",
       [&](const KeyValue& kv) { reprocess_trans_thresh = to_double(kv); }},
      {"backend.reprocess_rot_thresh_deg",
       [&](const KeyValue& kv) { reprocess_rot_thresh_deg = to_double(kv); }},
      {"backend.lc_query_new",
       [&](const KeyValue& kv) { lc_query_new = to_bool(kv); }},
  };
  for (const auto& kv : entries) {
    auto it = setters.find(kv.key);
    if (it == setters.end())
      throw std::runtime_error("line " + std::to_string(kv.line) +
                               ": unknown config key '" + kv.key + "'");
    it->second(kv);
  }
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  PipelineConfig cfg;
  cfg.apply(parse_key_value_file(path));
  return cfg;
}

std::string PipelineConfig::serialize() const {
  char buf[4096];
  std::snprintf(
      buf, sizeof(buf),
      "r = %.9g\n"
      "reg.epsilon = %.9g\n"
      "reg.tol = %.9g\n"
      "reg.max_iters = %d\n"
      "reg.min_match = %.9g\n"
      "frontend.overlap_thresh = %.9g\n"
      "frontend.reopt_per_frame = %s\n"
      "graph.prior_sigma_trans = %.9g\n"
      "graph.prior_sigma_rot_deg = %.9g\n"
      "graph.sigma_trans_floor = %.9g\n"
      "graph.sigma_rot_deg = %.9g\n"
      "graph.odom_sigma_trans = %.9g\n"
      "graph.odom_sigma_rot_deg = %.9g\n"
      "solver.lambda_init = %.9g\n"
      "solver.max_iters = %d\n"
      "solver.update_tol = %.9g\n"
      "tsdf.voxel_size = %.9g\n"
      "tsdf.truncation_voxels = %.9g\n"
      "tsdf.obs_weight = %.9g\n"
      "tsdf.nearest_interp = %s\n"
      "backend.lc_overlap_thresh = %.9g\n"
      "backend.lc_error_floor = %.9g\n"
      "backend.lc_error_median_factor = %.9g\n"
      "backend.reprocess_trans_thresh = %.9g\n"
      "backend.reprocess_rot_thresh_deg = %.9g\n"
      "backend.lc_query_new = %s\n",
      r, reg_epsilon, reg_tol, reg_max_iters, reg_min_match, overlap_thresh,
      frontend_reopt_per_frame ? "true" : "false", prior_sigma_trans,
      prior_sigma_rot_deg, sigma_trans_floor, sigma_rot_deg, odom_sigma_trans,
      odom_sigma_rot_deg, solver_lambda_init, solver_max_iters, solver_update_tol,
      voxel_size, truncation_voxels, obs_weight,
      tsdf_nearest_interp ? "true" : "false", lc_overlap_thresh, lc_error_floor,
      lc_error_median_factor, reprocess_trans_thresh, reprocess_rot_thresh_deg,
      lc_query_new ? "true" : "false");
  return buf;
}

}  // namespace subslam
