#include "mcg/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mcg {

double tetra_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return std::abs((b - a).cross(c - a).dot(d - a)) / 6.0;
}

namespace {

struct Face {
  int v[3];
  Vec3 n;  // outward unit-ish normal (not normalized)
  double offset;
  bool alive = true;
};

double face_dist(const Face& f, const Vec3& p) { return f.n.dot(p) - f.offset; }

}  // namespace

double convex_hull_volume(const std::vector<Vec3>& input, double eps) {
  // Dedupe.
  std::vector<Vec3> pts;
  for (const auto& p : input) {
    bool dup = false;
    for (const auto& q : pts) {
      if ((p - q).norm() <= eps) {
        dup = true;
        break;
      }
    }
    if (!dup) pts.push_back(p);
  }
  const std::size_t n = pts.size();
  if (n < 4) return 0.0;

  // Initial simplex: farthest pair, then farthest from the line, then from
  // the plane.
  std::size_t i0 = 0, i1 = 1;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = (pts[i] - pts[j]).squaredNorm();
      if (d > best) {
        best = d;
        i0 = i;
        i1 = j;
      }
    }
  }
  Vec3 axis = pts[i1] - pts[i0];
  best = -1.0;
  std::size_t i2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = axis.cross(pts[i] - pts[i0]).squaredNorm();
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  Vec3 pn = axis.cross(pts[i2] - pts[i0]);
  if (pn.norm() <= eps) return 0.0;  // collinear
  best = -1.0;
  std::size_t i3 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = std::abs(pn.dot(pts[i] - pts[i0]));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }
  if (std::abs(pn.normalized().dot(pts[i3] - pts[i0])) <= eps) return 0.0;

  Vec3 interior = 0.25 * (pts[i0] + pts[i1] + pts[i2] + pts[i3]);
  std::vector<Face> faces;
  auto add_face = [&](int a, int b, int c) {
    Face f;
    f.v[0] = a;
    f.v[1] = b;
    f.v[2] = c;
    f.n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    f.offset = f.n.dot(pts[a]);
    if (face_dist(f, interior) > 0.0) {  // flip outward
      std::swap(f.v[1], f.v[2]);
      f.n = -f.n;
      f.offset = f.n.dot(pts[f.v[0]]);
    }
    faces.push_back(f);
  };
  int s0 = static_cast<int>(i0), s1 = static_cast<int>(i1);
  int s2 = static_cast<int>(i2), s3 = static_cast<int>(i3);
  add_face(s0, s1, s2);
  add_face(s0, s1, s3);
  add_face(s0, s2, s3);
  add_face(s1, s2, s3);

  // Incremental insertion of every remaining point.
  for (std::size_t p = 0; p < n; ++p) {
    if (static_cast<int>(p) == s0 || static_cast<int>(p) == s1 ||
        static_cast<int>(p) == s2 || static_cast<int>(p) == s3) {
      continue;
    }
    // Visible faces (relative tolerance on the unnormalized plane equation).
    std::vector<std::size_t> visible;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!faces[f].alive) continue;
      if (face_dist(faces[f], pts[p]) > eps * faces[f].n.norm()) {
        visible.push_back(f);
      }
    }
    if (visible.empty()) continue;
    // Horizon = edges used exactly once among visible faces.
    std::map<std::pair<int, int>, std::pair<int, int>> edges;  // sorted -> oriented
    for (std::size_t f : visible) {
      for (int e = 0; e < 3; ++e) {
        int a = faces[f].v[e], b = faces[f].v[(e + 1) % 3];
        auto key = std::minmax(a, b);
        auto it = edges.find(key);
        if (it == edges.end()) {
          edges[key] = {a, b};
        } else {
          it->second = {-1, -1};  // interior edge, seen twice
        }
      }
      faces[f].alive = false;
    }
    for (const auto& [key, oriented] : edges) {
      if (oriented.first < 0) continue;
      add_face(oriented.first, oriented.second, static_cast<int>(p));
    }
  }

  double vol = 0.0;
  for (const auto& f : faces) {
    if (!f.alive) continue;
    vol += (pts[f.v[1]] - pts[f.v[0]])
               .cross(pts[f.v[2]] - pts[f.v[0]])
               .dot(pts[f.v[0]] - interior);
  }
  return std::abs(vol) / 6.0;
}

namespace {

// Inward-facing half-space normals of a tetrahedron.
struct TetraPlanes {
  Vec3 n[4];
  double d[4];
};

TetraPlanes tetra_planes(const std::array<Vec3, 4>& t) {
  TetraPlanes p;
  static const int face[4][4] = {
      {0, 1, 2, 3}, {0, 1, 3, 2}, {0, 2, 3, 1}, {1, 2, 3, 0}};
  for (int i = 0; i < 4; ++i) {
    const Vec3& a = t[face[i][0]];
    const Vec3& b = t[face[i][1]];
    const Vec3& c = t[face[i][2]];
    const Vec3& opp = t[face[i][3]];
    Vec3 n = (b - a).cross(c - a);
    double d = n.dot(a);
    if (n.dot(opp) < d) {  // make the opposite vertex the positive side
      n = -n;
      d = -d;
    }
    p.n[i] = n;
    p.d[i] = d;
  }
  return p;
}

}  // namespace

bool tetra_contains(const std::array<Vec3, 4>& t, const Vec3& p, double eps) {
  TetraPlanes pl = tetra_planes(t);
  for (int i = 0; i < 4; ++i) {
    if (pl.n[i].dot(p) - pl.d[i] < -eps * pl.n[i].norm()) return false;
  }
  return true;
}

std::vector<Vec3> tetra_intersection_points(const std::array<Vec3, 4>& a,
                                            const std::array<Vec3, 4>& b,
                                            double eps) {
  std::vector<Vec3> out;
  for (const auto& v : a) {
    if (tetra_contains(b, v, eps)) out.push_back(v);
  }
  for (const auto& v : b) {
    if (tetra_contains(a, v, eps)) out.push_back(v);
  }
  static const int edge[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  auto clip_edges = [&](const std::array<Vec3, 4>& from,
                        const std::array<Vec3, 4>& against) {
    TetraPlanes pl = tetra_planes(against);
    for (const auto& e : edge) {
      const Vec3& p = from[e[0]];
      Vec3 d = from[e[1]] - p;
      double t0 = 0.0, t1 = 1.0;
      bool ok = true;
      for (int i = 0; i < 4 && ok; ++i) {
        double dp = pl.n[i].dot(p) - pl.d[i];
        double dd = pl.n[i].dot(d);
        if (std::abs(dd) < 1e-300) {
          if (dp < -eps * pl.n[i].norm()) ok = false;
        } else {
          double t = -dp / dd;
          if (dd > 0.0) {
            t0 = std::max(t0, t);
          } else {
            t1 = std::min(t1, t);
          }
          if (t0 > t1) ok = false;
        }
      }
      if (ok) {
        out.push_back(p + t0 * d);
        out.push_back(p + t1 * d);
      }
    }
  };
  clip_edges(a, b);
  clip_edges(b, a);
  return out;
}

}  // namespace mcg
