#include "subslam/ply_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace subslam {

namespace {

struct PlyHeader {
  bool binary = false;
  long vertex_count = 0;
  long face_count = 0;
  bool double_precision = false;
  std::size_t data_start = 0;
};

PlyHeader parse_header(std::ifstream& f, const std::string& path) {
  PlyHeader h;
  std::string line;
  if (!std::getline(f, line) || (line != "ply" && line != "ply\r"))
    throw std::runtime_error("ply: missing magic in " + path);

  enum class Section { kNone, kVertex, kFace } section = Section::kNone;
  int vertex_props = 0;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "comment" || tok.empty()) continue;
    if (tok == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt == "ascii")
        h.binary = false;
      else if (fmt == "binary_little_endian")
        h.binary = true;
      else
        throw std::runtime_error("ply: unsupported format '" + fmt + "' in " + path);
    } else if (tok == "element") {
      std::string name;
      long count = 0;
      ss >> name >> count;
      if (name == "vertex") {
        section = Section::kVertex;
        h.vertex_count = count;
      } else if (name == "face") {
        section = Section::kFace;
        h.face_count = count;
      } else {
        throw std::runtime_error("ply: unsupported element '" + name + "' in " + path);
      }
    } else if (tok == "property") {
      std::string type;
      ss >> type;
      if (section == Section::kVertex) {
        std::string axis;
        ss >> axis;
        if (type == "list" || (axis != "x" && axis != "y" && axis != "z"))
          throw std::runtime_error("ply: unsupported vertex layout in " + path);
        if (type == "double")
          h.double_precision = true;
        else if (type != "float" && type != "float32")
          throw std::runtime_error("ply: unsupported vertex type '" + type + "' in " +
                                   path);
        ++vertex_props;
      } else if (section == Section::kFace) {
        if (type != "list")
          throw std::runtime_error("ply: unsupported face property in " + path);
      }
    } else if (tok == "end_header") {
      if (vertex_props != 3)
        throw std::runtime_error("ply: expected exactly x y z vertex properties in " +
                                 path);
      h.data_start = static_cast<std::size_t>(f.tellg());
      return h;
    } else {
      throw std::runtime_error("ply: unexpected header token '" + tok + "' in " + path);
    }
  }
  throw std::runtime_error("ply: truncated header in " + path);
}

std::vector<Vec3> read_vertices(std::ifstream& f, const PlyHeader& h,
                                const std::string& path) {
  std::vector<Vec3> verts;
  verts.reserve(h.vertex_count);
  if (h.binary) {
    const int stride = h.double_precision ? 8 : 4;
    std::vector<char> buf(3 * stride);
    for (long i = 0; i < h.vertex_count; ++i) {
      f.read(buf.data(), buf.size());
      if (!f) throw std::runtime_error("ply: truncated vertex data in " + path);
      Vec3 v;
      for (int a = 0; a < 3; ++a) {
        if (h.double_precision) {
          double x;
          std::memcpy(&x, buf.data() + a * 8, 8);
          v[a] = x;
        } else {
          float x;
          std::memcpy(&x, buf.data() + a * 4, 4);
          v[a] = x;
        }
      }
      verts.push_back(v);
    }
  } else {
    for (long i = 0; i < h.vertex_count; ++i) {
      double x, y, z;
      if (!(f >> x >> y >> z))
        throw std::runtime_error("ply: truncated vertex data in " + path);
      verts.push_back(Vec3(x, y, z));
    }
  }
  return verts;
}

}  // namespace

void write_cloud_ply(const std::string& path, const PointCloud& cloud, bool binary) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("ply: cannot open " + path);
  f << "ply\nformat " << (binary ? "binary_little_endian" : "ascii")
    << " 1.0\nelement vertex " << cloud.size()
    << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
  if (binary) {
    for (const auto& p : cloud.points()) {
      const float v[3] = {static_cast<float>(p.x()), static_cast<float>(p.y()),
                          static_cast<float>(p.z())};
      f.write(reinterpret_cast<const char*>(v), sizeof(v));
    }
  } else {
    char line[128];
    for (const auto& p : cloud.points()) {
      std::snprintf(line, sizeof(line), "%.9g %.9g %.9g\n",
                    static_cast<double>(static_cast<float>(p.x())),
                    static_cast<double>(static_cast<float>(p.y())),
                    static_cast<double>(static_cast<float>(p.z())));
      f << line;
    }
  }
  if (!f) throw std::runtime_error("ply: write failed for " + path);
}

PointCloud read_cloud_ply(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("ply: cannot open " + path);
  const PlyHeader h = parse_header(f, path);
  std::vector<Vec3> verts = read_vertices(f, h, path);
  return PointCloud(std::move(verts));
}

void write_mesh_ply(const std::string& path, const TriangleMesh& mesh, bool binary) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("ply: cannot open " + path);
  f << "ply\nformat " << (binary ? "binary_little_endian" : "ascii")
    << " 1.0\nelement vertex " << mesh.vertices.size()
    << "\nproperty float x\nproperty float y\nproperty float z\nelement face "
    << mesh.triangles.size()
    << "\nproperty list uchar int vertex_indices\nend_header\n";
  if (binary) {
    for (const auto& p : mesh.vertices) {
      const float v[3] = {static_cast<float>(p.x()), static_cast<float>(p.y()),
                          static_cast<float>(p.z())};
      f.write(reinterpret_cast<const char*>(v), sizeof(v));
    }
    for (const auto& t : mesh.triangles) {
      const unsigned char n = 3;
      f.write(reinterpret_cast<const char*>(&n), 1);
      const std::int32_t idx[3] = {t[0], t[1], t[2]};
      f.write(reinterpret_cast<const char*>(idx), sizeof(idx));
    }
  } else {
    char line[160];
    for (const auto& p : mesh.vertices) {
      std::snprintf(line, sizeof(line), "%.9g %.9g %.9g\n",
                    static_cast<double>(static_cast<float>(p.x())),
                    static_cast<double>(static_cast<float>(p.y())),
                    static_cast<double>(static_cast<float>(p.z())));
      f << line;
    }
    for (const auto& t : mesh.triangles)
      f << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  }
  if (!f) throw std::runtime_error("ply: write failed for " + path);
}

TriangleMesh read_mesh_ply(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("ply: cannot open " + path);
  const PlyHeader h = parse_header(f, path);
  TriangleMesh mesh;
  mesh.vertices = read_vertices(f, h, path);
  mesh.triangles.reserve(h.face_count);
  for (long i = 0; i < h.face_count; ++i) {
    int count = 0;
    std::array<int, 3> tri{};
    if (h.binary) {
      unsigned char n;
      f.read(reinterpret_cast<char*>(&n), 1);
      count = n;
      if (count == 3) {
        std::int32_t idx[3];
        f.read(reinterpret_cast<char*>(idx), sizeof(idx));
        tri = {idx[0], idx[1], idx[2]};
      }
    } else {
      f >> count;
      if (count == 3) f >> tri[0] >> tri[1] >> tri[2];
    }
    if (!f) throw std::runtime_error("ply: truncated face data in " + path);
    if (count != 3)
      throw std::runtime_error("ply: only triangle faces supported in " + path);
    for (int k : tri)
      if (k < 0 || k >= static_cast<int>(mesh.vertices.size()))
        throw std::runtime_error("ply: face index out of range in " + path);
    mesh.triangles.push_back(tri);
  }
  return mesh;
}

}  // namespace subslam
