#include "mcg/grid.hpp"

#include <bit>
#include <cstdio>
#include <stdexcept>

namespace mcg {

LocalGrid::LocalGrid(const Vec3& origin, int nx, int ny, int nz, double res,
                     const InverseSensorModel& ism)
    : origin_(origin), nx_(nx), ny_(ny), nz_(nz), res_(res), ism_(ism) {
  if (nx < 1 || ny < 1 || nz < 1 || res <= 0.0) {
    throw std::invalid_argument("LocalGrid: bad dimensions");
  }
  cells_.assign(static_cast<std::size_t>(nx) * ny * nz, 0.0f);
}

LocalGrid LocalGrid::centered(const Vec3& center, int nx, int ny, int nz,
                              double res, const InverseSensorModel& ism) {
  Vec3 origin;
  int dims[3] = {nx, ny, nz};
  for (int i = 0; i < 3; ++i) {
    // Snap so cell boundaries land on the global res-lattice.
    origin[i] = (std::round(center[i] / res) - dims[i] / 2) * res;
  }
  return LocalGrid(origin, nx, ny, nz, res, ism);
}

LocalGrid LocalGrid::covering(const Aabb& bounds, double res,
                              const InverseSensorModel& ism) {
  Vec3 origin(std::floor(bounds.min.x() / res) * res,
              std::floor(bounds.min.y() / res) * res,
              std::floor(bounds.min.z() / res) * res);
  Vec3 ext = bounds.max - origin;
  return LocalGrid(origin, static_cast<int>(std::ceil(ext.x() / res - 1e-9)),
                   static_cast<int>(std::ceil(ext.y() / res - 1e-9)),
                   static_cast<int>(std::ceil(ext.z() / res - 1e-9)), res, ism);
}

void LocalGrid::add_log_odds(std::uint32_t idx, double delta) {
  double v = static_cast<double>(cells_[idx]) + delta;
  if (v < ism_.clamp_min) v = ism_.clamp_min;
  if (v > ism_.clamp_max) v = ism_.clamp_max;
  cells_[idx] = static_cast<float>(v);
  if (changes_) {
    if (stamp_[idx] != epoch_) {
      stamp_[idx] = epoch_;
      slot_[idx] = static_cast<std::uint32_t>(changes_->size());
      changes_->push_back({idx, cells_[idx]});
    } else {
      (*changes_)[slot_[idx]].log_odds = cells_[idx];
    }
  }
}

void LocalGrid::begin_changeset(Changeset* out) {
  changes_ = out;
  if (stamp_.size() != cells_.size()) {
    stamp_.assign(cells_.size(), 0);
    slot_.assign(cells_.size(), 0);
    epoch_ = 0;
  }
  ++epoch_;
  if (epoch_ == 0) {  // wrapped; restamp
    stamp_.assign(cells_.size(), 0);
    epoch_ = 1;
  }
}

void LocalGrid::end_changeset() { changes_ = nullptr; }

void integrate_observation(LocalGrid& grid, const DepthObservation& obs,
                           double max_range, Changeset* changes) {
  if (obs.dirs.size() != obs.ranges.size()) {
    throw std::invalid_argument("integrate_observation: dirs/ranges mismatch");
  }
  if (changes) grid.begin_changeset(changes);
  const Mat3 R = obs.pose.rotation();
  const Vec3 o = obs.pose.t;
  const double l_hit = grid.ism().l_hit;
  const double l_miss = grid.ism().l_miss;
  for (std::size_t i = 0; i < obs.dirs.size(); ++i) {
    const bool hit = obs.ranges[i] < max_range;
    const double r = hit ? obs.ranges[i] : max_range;
    const Vec3 target = o + R * (obs.dirs[i] * r);
    std::uint32_t end_idx = std::numeric_limits<std::uint32_t>::max();
    if (auto c = grid.cell_of(target)) {
      end_idx = grid.index(c->x(), c->y(), c->z());
    }
    traverse_ray(grid, o, target, [&](int ix, int iy, int iz) {
      std::uint32_t idx = grid.index(ix, iy, iz);
      grid.add_log_odds(idx, hit && idx == end_idx ? l_hit : l_miss);
    });
  }
  if (changes) grid.end_changeset();
}

double entropy_bits(const LocalGrid& grid) {
  double total = 0.0;
  for (float lf : grid.cells()) {
    double l = lf;
    if (std::abs(l) > 60.0) continue;  // saturated: entropy underflows to 0
    double p = 1.0 / (1.0 + std::exp(-l));
    if (p <= 0.0 || p >= 1.0) continue;
    total -= p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p);
  }
  return total;
}

std::vector<std::uint32_t> frontier_cells(const LocalGrid& grid, double delta,
                                          const Aabb* clamp) {
  std::vector<std::uint32_t> out;
  const int nx = grid.nx(), ny = grid.ny(), nz = grid.nz();
  auto unknown = [&](int x, int y, int z) {
    return std::abs(static_cast<double>(grid.at(grid.index(x, y, z)))) <= delta;
  };
  for (int z = 0; z < nz; ++z) {
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        std::uint32_t idx = grid.index(x, y, z);
        if (!(grid.at(idx) < -delta)) continue;  // must be free
        if (clamp && !clamp->contains(grid.center_of(x, y, z))) continue;
        bool frontier = (x > 0 && unknown(x - 1, y, z)) ||
                        (x + 1 < nx && unknown(x + 1, y, z)) ||
                        (y > 0 && unknown(x, y - 1, z)) ||
                        (y + 1 < ny && unknown(x, y + 1, z)) ||
                        (z > 0 && unknown(x, y, z - 1)) ||
                        (z + 1 < nz && unknown(x, y, z + 1));
        if (frontier) out.push_back(idx);
      }
    }
  }
  return out;
}

LocalGrid window_copy(const LocalGrid& src, const Vec3& center, int nx, int ny,
                      int nz, const InverseSensorModel& ism) {
  LocalGrid out = LocalGrid::centered(center, nx, ny, nz, src.resolution(), ism);
  // Lattice-aligned offset between the two origins.
  Eigen::Vector3i off(
      static_cast<int>(std::llround((out.origin().x() - src.origin().x()) / src.resolution())),
      static_cast<int>(std::llround((out.origin().y() - src.origin().y()) / src.resolution())),
      static_cast<int>(std::llround((out.origin().z() - src.origin().z()) / src.resolution())));
  for (int z = 0; z < nz; ++z) {
    int sz = z + off.z();
    if (sz < 0 || sz >= src.nz()) continue;
    for (int y = 0; y < ny; ++y) {
      int sy = y + off.y();
      if (sy < 0 || sy >= src.ny()) continue;
      for (int x = 0; x < nx; ++x) {
        int sx = x + off.x();
        if (sx < 0 || sx >= src.nx()) continue;
        double v = src.at(src.index(sx, sy, sz));
        v = std::clamp(v, ism.clamp_min, ism.clamp_max);
        out.raw(out.index(x, y, z)) = static_cast<float>(v);
      }
    }
  }
  return out;
}

void save_grid(const LocalGrid& grid, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("save_grid: cannot open " + path);
  auto put_u32 = [&](std::uint32_t v) {
    std::uint8_t b[4] = {static_cast<std::uint8_t>(v & 0xff),
                         static_cast<std::uint8_t>((v >> 8) & 0xff),
                         static_cast<std::uint8_t>((v >> 16) & 0xff),
                         static_cast<std::uint8_t>((v >> 24) & 0xff)};
    std::fwrite(b, 1, 4, f);
  };
  auto put_f64 = [&](double v) {
    std::uint64_t u = std::bit_cast<std::uint64_t>(v);
    put_u32(static_cast<std::uint32_t>(u & 0xffffffffu));
    put_u32(static_cast<std::uint32_t>(u >> 32));
  };
  put_u32(0x44495247u);  // "GRID"
  put_u32(1u);
  put_u32(static_cast<std::uint32_t>(grid.nx()));
  put_u32(static_cast<std::uint32_t>(grid.ny()));
  put_u32(static_cast<std::uint32_t>(grid.nz()));
  put_f64(grid.origin().x());
  put_f64(grid.origin().y());
  put_f64(grid.origin().z());
  put_f64(grid.resolution());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    put_u32(std::bit_cast<std::uint32_t>(grid.at(static_cast<std::uint32_t>(i))));
  }
  std::fclose(f);
}

LocalGrid load_grid(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("load_grid: cannot open " + path);
  auto get_u32 = [&]() -> std::uint32_t {
    std::uint8_t b[4];
    if (std::fread(b, 1, 4, f) != 4) {
      std::fclose(f);
      throw std::runtime_error("load_grid: truncated file");
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  };
  auto get_f64 = [&]() {
    std::uint64_t lo = get_u32();
    std::uint64_t hi = get_u32();
    return std::bit_cast<double>(lo | (hi << 32));
  };
  if (get_u32() != 0x44495247u || get_u32() != 1u) {
    std::fclose(f);
    throw std::runtime_error("load_grid: bad header");
  }
  int nx = static_cast<int>(get_u32());
  int ny = static_cast<int>(get_u32());
  int nz = static_cast<int>(get_u32());
  Vec3 origin(get_f64(), get_f64(), get_f64());
  double res = get_f64();
  LocalGrid grid(origin, nx, ny, nz, res, InverseSensorModel::unclamped());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.raw(static_cast<std::uint32_t>(i)) = std::bit_cast<float>(get_u32());
  }
  std::fclose(f);
  return grid;
}

}  // namespace mcg
