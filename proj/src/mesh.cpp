#include "mcg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mcg {

Aabb TriMesh::bounds() const {
  Aabb b;
  if (vertices.empty()) return b;
  b.min = b.max = vertices[0];
  for (const Vec3& v : vertices) {
    b.min = b.min.cwiseMin(v);
    b.max = b.max.cwiseMax(v);
  }
  return b;
}

TriMesh load_mesh_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mesh_off: cannot open " + path);
  auto next_line = [&](std::string& line) {
    while (std::getline(in, line)) {
      auto h = line.find('#');
      if (h != std::string::npos) line.erase(h);
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
  };
  std::string line;
  if (!next_line(line) || line.substr(0, 3) != "OFF") {
    throw std::runtime_error("load_mesh_off: not an OFF file: " + path);
  }
  std::size_t nv = 0, nf = 0, ne = 0;
  {
    // Counts may follow "OFF" on the same line.
    std::istringstream hs(line.substr(3));
    if (!(hs >> nv >> nf >> ne)) {
      if (!next_line(line)) throw std::runtime_error("load_mesh_off: truncated header");
      std::istringstream cs(line);
      if (!(cs >> nv >> nf >> ne)) {
        throw std::runtime_error("load_mesh_off: bad counts line");
      }
    }
  }
  TriMesh mesh;
  mesh.vertices.reserve(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    if (!next_line(line)) throw std::runtime_error("load_mesh_off: truncated vertices");
    std::istringstream vs(line);
    double x, y, z;
    if (!(vs >> x >> y >> z)) throw std::runtime_error("load_mesh_off: bad vertex");
    mesh.vertices.emplace_back(x, y, z);
  }
  for (std::size_t i = 0; i < nf; ++i) {
    if (!next_line(line)) throw std::runtime_error("load_mesh_off: truncated faces");
    std::istringstream fs(line);
    std::size_t k;
    if (!(fs >> k) || k < 3) throw std::runtime_error("load_mesh_off: bad face");
    std::vector<int> idx(k);
    for (auto& v : idx) {
      if (!(fs >> v) || v < 0 || static_cast<std::size_t>(v) >= nv) {
        throw std::runtime_error("load_mesh_off: face index out of range");
      }
    }
    for (std::size_t j = 1; j + 1 < k; ++j) {  // fan triangulation
      mesh.triangles.emplace_back(idx[0], idx[j], idx[j + 1]);
    }
  }
  return mesh;
}

void save_mesh_off(const TriMesh& mesh, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("save_mesh_off: cannot open " + path);
  std::fprintf(f, "OFF\n%zu %zu 0\n", mesh.vertices.size(), mesh.triangles.size());
  for (const Vec3& v : mesh.vertices) {
    std::fprintf(f, "%.9g %.9g %.9g\n", v.x(), v.y(), v.z());
  }
  for (const auto& t : mesh.triangles) {
    std::fprintf(f, "3 %d %d %d\n", t.x(), t.y(), t.z());
  }
  std::fclose(f);
}

double ray_triangle(const Vec3& o, const Vec3& dir, const Vec3& v0,
                    const Vec3& v1, const Vec3& v2) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Vec3 e1 = v1 - v0;
  const Vec3 e2 = v2 - v0;
  const Vec3 p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-14) return inf;  // parallel
  const double inv = 1.0 / det;
  const Vec3 s = o - v0;
  const double u = s.dot(p) * inv;
  if (u < -1e-12 || u > 1.0 + 1e-12) return inf;
  const Vec3 q = s.cross(e1);
  const double v = dir.dot(q) * inv;
  if (v < -1e-12 || u + v > 1.0 + 1e-12) return inf;
  const double t = e2.dot(q) * inv;
  return t > 1e-12 ? t : inf;
}

Bvh::Bvh(TriMesh mesh) : mesh_(std::move(mesh)) {
  std::vector<Vec3> centroids(mesh_.triangles.size());
  tri_order_.resize(mesh_.triangles.size());
  for (std::size_t i = 0; i < mesh_.triangles.size(); ++i) {
    const auto& t = mesh_.triangles[i];
    centroids[i] = (mesh_.vertices[t.x()] + mesh_.vertices[t.y()] +
                    mesh_.vertices[t.z()]) /
                   3.0;
    tri_order_[i] = static_cast<std::int32_t>(i);
  }
  if (!mesh_.triangles.empty()) {
    nodes_.reserve(2 * mesh_.triangles.size());
    build(tri_order_, 0, tri_order_.size(), centroids);
  }
}

std::int32_t Bvh::build(std::vector<std::int32_t>& tris, std::size_t lo,
                        std::size_t hi, const std::vector<Vec3>& centroids) {
  Node node;
  node.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  node.hi = -node.lo;
  for (std::size_t i = lo; i < hi; ++i) {
    const auto& t = mesh_.triangles[tris[i]];
    for (int v : {t.x(), t.y(), t.z()}) {
      node.lo = node.lo.cwiseMin(mesh_.vertices[v]);
      node.hi = node.hi.cwiseMax(mesh_.vertices[v]);
    }
  }
  auto self = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (hi - lo <= 4) {
    nodes_[self].left = static_cast<std::int32_t>(lo);
    nodes_[self].count = static_cast<std::int32_t>(hi - lo);
    return self;
  }
  Vec3 ext = node.hi - node.lo;
  int axis = 0;
  if (ext.y() > ext.x()) axis = 1;
  if (ext.z() > ext[axis]) axis = 2;
  std::size_t mid = (lo + hi) / 2;
  std::nth_element(tris.begin() + lo, tris.begin() + mid, tris.begin() + hi,
                   [&](std::int32_t a, std::int32_t b) {
                     return centroids[a][axis] < centroids[b][axis];
                   });
  std::int32_t l = build(tris, lo, mid, centroids);
  std::int32_t r = build(tris, mid, hi, centroids);
  nodes_[self].left = l;
  nodes_[self].right = r;
  return self;
}

double Bvh::raycast(const Vec3& o, const Vec3& dir, double t_max) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (nodes_.empty()) return inf;
  const Vec3 inv_dir = dir.cwiseInverse();
  double best = t_max;
  bool hit = false;
  std::int32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    // Slab test against [0, best].
    double t0 = 0.0, t1 = best;
    bool miss = false;
    for (int i = 0; i < 3; ++i) {
      double ta = (n.lo[i] - o[i]) * inv_dir[i];
      double tb = (n.hi[i] - o[i]) * inv_dir[i];
      if (std::isnan(ta) || std::isnan(tb)) continue;  // inside a flat slab
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) {
        miss = true;
        break;
      }
    }
    if (miss) continue;
    if (n.count > 0) {
      for (std::int32_t i = 0; i < n.count; ++i) {
        const auto& t = mesh_.triangles[tri_order_[n.left + i]];
        double d = ray_triangle(o, dir, mesh_.vertices[t.x()],
                                mesh_.vertices[t.y()], mesh_.vertices[t.z()]);
        if (d < best) {
          best = d;
          hit = true;
        }
      }
    } else {
      stack[top++] = n.left;
      stack[top++] = n.right;
    }
  }
  return hit ? best : inf;
}

}  // namespace mcg
