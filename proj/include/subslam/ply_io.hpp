// Minimal PLY reader/writer for the xyz clouds and triangle meshes this
// pipeline exchanges: ascii or binary_little_endian, float or double
// coordinates, faces as uchar-counted index lists.

#pragma once

#include <string>

#include "subslam/cloud.hpp"
#include "subslam/mesh.hpp"

namespace subslam {

void write_cloud_ply(const std::string& path, const PointCloud& cloud,
                     bool binary = true);
PointCloud read_cloud_ply(const std::string& path);

void write_mesh_ply(const std::string& path, const TriangleMesh& mesh,
                    bool binary = true);
TriangleMesh read_mesh_ply(const std::string& path);

}  // namespace subslam
