#include "mcg/cave.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>

#include "mcg/edt.hpp"

namespace mcg {

double Environment::raycast(const Vec3& o, const Vec3& dir, double t_max) const {
  if (!has_voxels) return raycast_mesh(o, dir, t_max);
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Vec3 lo = voxel_origin;
  const Vec3 hi = voxel_origin + voxel_res * Vec3(vx, vy, vz);

  // Clip to the voxel domain.
  double t0 = 0.0, t1 = t_max;
  for (int i = 0; i < 3; ++i) {
    if (dir[i] == 0.0) {
      if (o[i] < lo[i] || o[i] > hi[i]) return inf;
    } else {
      double ta = (lo[i] - o[i]) / dir[i];
      double tb = (hi[i] - o[i]) / dir[i];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return inf;
    }
  }

  Vec3 p0 = o + t0 * dir;
  int idx[3], dims[3] = {vx, vy, vz};
  double t_maxs[3], t_delta[3];
  for (int i = 0; i < 3; ++i) {
    int c = static_cast<int>(std::floor((p0[i] - voxel_origin[i]) / voxel_res));
    idx[i] = std::clamp(c, 0, dims[i] - 1);
    if (dir[i] > 0.0) {
      t_maxs[i] = (voxel_origin[i] + (idx[i] + 1) * voxel_res - o[i]) / dir[i];
      t_delta[i] = voxel_res / dir[i];
    } else if (dir[i] < 0.0) {
      t_maxs[i] = (voxel_origin[i] + idx[i] * voxel_res - o[i]) / dir[i];
      t_delta[i] = -voxel_res / dir[i];
    } else {
      t_maxs[i] = inf;
      t_delta[i] = inf;
    }
  }

  double t = t0;
  while (t <= t1) {
    if (solid_at(idx[0], idx[1], idx[2])) {
      return t <= t_max ? std::max(t, 0.0) : inf;
    }
    double t_next = std::min({t_maxs[0], t_maxs[1], t_maxs[2]});
    if (t_next > t1) return inf;
    t = t_next;
    for (int i = 0; i < 3; ++i) {
      if (t_maxs[i] == t_next) {
        idx[i] += dir[i] > 0.0 ? 1 : -1;
        if (idx[i] < 0 || idx[i] >= dims[i]) return inf;
        t_maxs[i] += t_delta[i];
      }
    }
  }
  return inf;
}

double Environment::raycast_mesh(const Vec3& o, const Vec3& dir, double t_max) const {
  if (!bvh_) throw std::runtime_error("Environment: BVH not built");
  return bvh_->raycast(o, dir, t_max);
}

void Environment::build_bvh() { bvh_ = std::make_shared<Bvh>(mesh); }

namespace {

// Value noise: trilinear interpolation of hashed lattice values.
double lattice_value(std::uint64_t seed, int ix, int iy, int iz) {
  std::uint64_t h = mix_seed(seed, static_cast<std::uint64_t>(ix) * 73856093ull ^
                                       static_cast<std::uint64_t>(iy) * 19349663ull,
                             static_cast<std::uint64_t>(iz) * 83492791ull);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double value_noise(std::uint64_t seed, const Vec3& p, double scale) {
  Vec3 q = p / scale;
  int ix = static_cast<int>(std::floor(q.x()));
  int iy = static_cast<int>(std::floor(q.y()));
  int iz = static_cast<int>(std::floor(q.z()));
  double fx = q.x() - ix, fy = q.y() - iy, fz = q.z() - iz;
  auto fade = [](double t) { return t * t * (3.0 - 2.0 * t); };
  fx = fade(fx);
  fy = fade(fy);
  fz = fade(fz);
  double c[2][2][2];
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int d = 0; d < 2; ++d) {
        c[a][b][d] = lattice_value(seed, ix + a, iy + b, iz + d);
      }
    }
  }
  auto lerp = [](double x, double y, double t) { return x + (y - x) * t; };
  double xy0 = lerp(lerp(c[0][0][0], c[1][0][0], fx), lerp(c[0][1][0], c[1][1][0], fx), fy);
  double xy1 = lerp(lerp(c[0][0][1], c[1][0][1], fx), lerp(c[0][1][1], c[1][1][1], fx), fy);
  return lerp(xy0, xy1, fz);
}

struct Carver {
  Environment& env;
  double res;

  Vec3 center(int x, int y, int z) const {
    return env.voxel_origin + res * Vec3(x + 0.5, y + 0.5, z + 0.5);
  }
  std::size_t lindex(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * env.vy + y) * env.vx + x;
  }
  void carve_ellipsoid(const Vec3& c, const Vec3& radii) {
    int x0 = std::max(0, static_cast<int>(std::floor((c.x() - radii.x() - env.voxel_origin.x()) / res)));
    int x1 = std::min(env.vx - 1, static_cast<int>(std::ceil((c.x() + radii.x() - env.voxel_origin.x()) / res)));
    int y0 = std::max(0, static_cast<int>(std::floor((c.y() - radii.y() - env.voxel_origin.y()) / res)));
    int y1 = std::min(env.vy - 1, static_cast<int>(std::ceil((c.y() + radii.y() - env.voxel_origin.y()) / res)));
    int z0 = std::max(0, static_cast<int>(std::floor((c.z() - radii.z() - env.voxel_origin.z()) / res)));
    int z1 = std::min(env.vz - 1, static_cast<int>(std::ceil((c.z() + radii.z() - env.voxel_origin.z()) / res)));
    for (int z = z0; z <= z1; ++z) {
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          Vec3 d = center(x, y, z) - c;
          double m = d.x() * d.x() / (radii.x() * radii.x()) +
                     d.y() * d.y() / (radii.y() * radii.y()) +
                     d.z() * d.z() / (radii.z() * radii.z());
          if (m <= 1.0) env.solid[lindex(x, y, z)] = 0;
        }
      }
    }
  }
};

}  // namespace

Environment generate_cave(const CaveParams& params) {
  if (params.carve_res <= 0.0 || params.chambers < 1 || params.start_count < 1) {
    throw std::invalid_argument("generate_cave: bad parameters");
  }
  Environment env;
  env.bounds = {Vec3::Zero(), params.size};
  env.has_voxels = true;
  env.voxel_res = params.carve_res;
  env.voxel_origin = Vec3::Zero();
  env.vx = static_cast<int>(std::round(params.size.x() / params.carve_res));
  env.vy = static_cast<int>(std::round(params.size.y() / params.carve_res));
  env.vz = static_cast<int>(std::round(params.size.z() / params.carve_res));
  std::size_t total = static_cast<std::size_t>(env.vx) * env.vy * env.vz;
  env.solid.assign(total, 1);

  const double res = params.carve_res;
  Carver carver{env, res};
  Rng rng(mix_seed(params.seed, 0x63617665ull));  // carve stream

  // Halls: flattened ellipsoids away from the walls.  They have to be roomy:
  // a full-speed forward primitive plus its stopping ramp sweeps
  // 1.5 * v_max * tau = 3.4 m, and the planner treats unseen cells as
  // obstacles, so anything narrower than that is unnavigable at the default
  // speeds.
  const double mxy = 4.2, mz = 1.7;
  std::vector<Vec3> centers;
  for (int i = 0; i < params.chambers; ++i) {
    Vec3 c(rng.uniform(mxy, params.size.x() - mxy),
           rng.uniform(mxy, params.size.y() - mxy),
           rng.uniform(mz, params.size.z() - mz));
    Vec3 radii(rng.uniform(3.2, 5.0), rng.uniform(3.2, 5.0), rng.uniform(1.2, 1.6));
    centers.push_back(c);
    carver.carve_ellipsoid(c, radii);
  }

  // Tunnels: chamber chain plus a few random extra pairs, carved as strings
  // of squashed spheres along a mildly bent polyline.  Kept wide and nearly
  // straight for the same reachability reason as the halls.
  auto tunnel = [&](const Vec3& a, const Vec3& b) {
    double r = rng.uniform(1.4, 1.8);
    std::vector<Vec3> way{a};
    {
      Vec3 m = 0.5 * (a + b);
      m.x() = std::clamp(m.x() + rng.uniform(-0.6, 0.6), mxy, params.size.x() - mxy);
      m.y() = std::clamp(m.y() + rng.uniform(-0.6, 0.6), mxy, params.size.y() - mxy);
      m.z() = std::clamp(m.z() + rng.uniform(-0.25, 0.25), mz, params.size.z() - mz);
      way.push_back(m);
    }
    way.push_back(b);
    for (std::size_t s = 0; s + 1 < way.size(); ++s) {
      Vec3 d = way[s + 1] - way[s];
      int steps = std::max(1, static_cast<int>(std::ceil(d.norm() / (0.5 * res))));
      for (int k = 0; k <= steps; ++k) {
        Vec3 p = way[s] + d * (static_cast<double>(k) / steps);
        carver.carve_ellipsoid(p, Vec3(r, r, 0.8 * r));
      }
    }
  };
  for (std::size_t i = 0; i + 1 < centers.size(); ++i) tunnel(centers[i], centers[i + 1]);
  for (int e = 0; e < params.extra_tunnels && centers.size() >= 2; ++e) {
    std::size_t i = rng.uniform_index(centers.size());
    std::size_t j = rng.uniform_index(centers.size());
    if (i != j) tunnel(centers[i], centers[j]);
  }

  // Roughen the walls: solid cells touching free space get carved where the
  // noise field runs high (collect first so the pass order cannot cascade).
  std::uint64_t noise_seed = mix_seed(params.seed, 0x6e6f6973ull);
  std::vector<std::size_t> to_carve;
  auto solid_idx = [&](int x, int y, int z) {
    return env.solid[carver.lindex(x, y, z)] != 0;
  };
  for (int z = 1; z < env.vz - 1; ++z) {
    for (int y = 1; y < env.vy - 1; ++y) {
      for (int x = 1; x < env.vx - 1; ++x) {
        if (!solid_idx(x, y, z)) continue;
        bool surface = !solid_idx(x - 1, y, z) || !solid_idx(x + 1, y, z) ||
                       !solid_idx(x, y - 1, z) || !solid_idx(x, y + 1, z) ||
                       !solid_idx(x, y, z - 1) || !solid_idx(x, y, z + 1);
        if (!surface) continue;
        if (value_noise(noise_seed, carver.center(x, y, z), 1.5) > 0.68) {
          to_carve.push_back(carver.lindex(x, y, z));
        }
      }
    }
  }
  for (std::size_t i : to_carve) env.solid[i] = 0;

  // Solid boundary shell: the world is closed.
  for (int z = 0; z < env.vz; ++z) {
    for (int y = 0; y < env.vy; ++y) {
      for (int x = 0; x < env.vx; ++x) {
        if (x == 0 || y == 0 || z == 0 || x == env.vx - 1 || y == env.vy - 1 ||
            z == env.vz - 1) {
          env.solid[carver.lindex(x, y, z)] = 1;
        }
      }
    }
  }

  // Keep only the largest connected free component.
  {
    std::vector<std::int32_t> comp(total, -1);
    std::int32_t n_comp = 0;
    std::vector<std::size_t> best_cells, cells;
    for (std::size_t s = 0; s < total; ++s) {
      if (env.solid[s] || comp[s] >= 0) continue;
      cells.clear();
      std::queue<std::size_t> q;
      q.push(s);
      comp[s] = n_comp;
      while (!q.empty()) {
        std::size_t cur = q.front();
        q.pop();
        cells.push_back(cur);
        int x = static_cast<int>(cur % env.vx);
        int y = static_cast<int>((cur / env.vx) % env.vy);
        int z = static_cast<int>(cur / (static_cast<std::size_t>(env.vx) * env.vy));
        const int nb[6][3] = {{x - 1, y, z}, {x + 1, y, z}, {x, y - 1, z},
                              {x, y + 1, z}, {x, y, z - 1}, {x, y, z + 1}};
        for (const auto& n : nb) {
          if (n[0] < 0 || n[0] >= env.vx || n[1] < 0 || n[1] >= env.vy ||
              n[2] < 0 || n[2] >= env.vz) {
            continue;
          }
          std::size_t ni = carver.lindex(n[0], n[1], n[2]);
          if (env.solid[ni] || comp[ni] >= 0) continue;
          comp[ni] = n_comp;
          q.push(ni);
        }
      }
      if (cells.size() > best_cells.size()) best_cells.swap(cells);
      ++n_comp;
    }
    std::vector<std::uint8_t> pruned(total, 1);
    for (std::size_t i : best_cells) pruned[i] = 0;
    env.solid.swap(pruned);
  }

  // Start positions: free voxels with clearance, greedily spread apart.
  {
    std::vector<float> clearance =
        distance_field_m(env.vx, env.vy, env.vz, res, env.solid);
    double need = params.min_start_clearance;
    std::vector<std::size_t> candidates;
    while (true) {
      candidates.clear();
      for (std::size_t i = 0; i < total; ++i) {
        if (!env.solid[i] && clearance[i] >= need) candidates.push_back(i);
      }
      if (candidates.size() >= static_cast<std::size_t>(params.start_count) ||
          need < 0.1) {
        break;
      }
      need *= 0.75;
    }
    if (candidates.empty()) {
      throw std::runtime_error("generate_cave: no viable start positions");
    }
    auto center_of = [&](std::size_t i) {
      int x = static_cast<int>(i % env.vx);
      int y = static_cast<int>((i / env.vx) % env.vy);
      int z = static_cast<int>(i / (static_cast<std::size_t>(env.vx) * env.vy));
      return carver.center(x, y, z);
    };
    std::size_t first = candidates[0];
    for (std::size_t i : candidates) {
      if (clearance[i] > clearance[first]) first = i;
    }
    env.start_positions.push_back(center_of(first));
    while (env.start_positions.size() < static_cast<std::size_t>(params.start_count)) {
      std::size_t best = candidates[0];
      double best_d = -1.0;
      for (std::size_t i : candidates) {
        Vec3 p = center_of(i);
        double d = std::numeric_limits<double>::infinity();
        for (const Vec3& s : env.start_positions) d = std::min(d, (p - s).norm());
        if (d > best_d) {
          best_d = d;
          best = i;
        }
      }
      env.start_positions.push_back(center_of(best));
    }
  }

  // Surface extraction: two triangles per free/solid face.
  {
    std::map<std::int64_t, int> corner_ids;
    auto corner = [&](int x, int y, int z) {
      std::int64_t key = (static_cast<std::int64_t>(x) * (env.vy + 1) + y) *
                             (env.vz + 1) +
                         z;
      auto it = corner_ids.find(key);
      if (it != corner_ids.end()) return it->second;
      int id = static_cast<int>(env.mesh.vertices.size());
      env.mesh.vertices.push_back(env.voxel_origin + res * Vec3(x, y, z));
      corner_ids[key] = id;
      return id;
    };
    auto quad = [&](int a, int b, int c, int d) {
      env.mesh.triangles.emplace_back(a, b, c);
      env.mesh.triangles.emplace_back(a, c, d);
    };
    for (int z = 0; z < env.vz; ++z) {
      for (int y = 0; y < env.vy; ++y) {
        for (int x = 0; x < env.vx; ++x) {
          if (env.solid[carver.lindex(x, y, z)]) continue;
          if (env.solid_at(x - 1, y, z)) {
            quad(corner(x, y, z), corner(x, y + 1, z), corner(x, y + 1, z + 1),
                 corner(x, y, z + 1));
          }
          if (env.solid_at(x + 1, y, z)) {
            quad(corner(x + 1, y, z), corner(x + 1, y + 1, z),
                 corner(x + 1, y + 1, z + 1), corner(x + 1, y, z + 1));
          }
          if (env.solid_at(x, y - 1, z)) {
            quad(corner(x, y, z), corner(x + 1, y, z), corner(x + 1, y, z + 1),
                 corner(x, y, z + 1));
          }
          if (env.solid_at(x, y + 1, z)) {
            quad(corner(x, y + 1, z), corner(x + 1, y + 1, z),
                 corner(x + 1, y + 1, z + 1), corner(x, y + 1, z + 1));
          }
          if (env.solid_at(x, y, z - 1)) {
            quad(corner(x, y, z), corner(x + 1, y, z), corner(x + 1, y + 1, z),
                 corner(x, y + 1, z));
          }
          if (env.solid_at(x, y, z + 1)) {
            quad(corner(x, y, z + 1), corner(x + 1, y, z + 1),
                 corner(x + 1, y + 1, z + 1), corner(x, y + 1, z + 1));
          }
        }
      }
    }
  }

  env.build_bvh();
  return env;
}

Environment environment_from_mesh(TriMesh mesh, std::vector<Vec3> starts) {
  if (starts.empty()) {
    throw std::invalid_argument("environment_from_mesh: need start positions");
  }
  Environment env;
  env.bounds = mesh.bounds();
  env.mesh = std::move(mesh);
  env.start_positions = std::move(starts);
  env.build_bvh();
  return env;
}

}  // namespace mcg
