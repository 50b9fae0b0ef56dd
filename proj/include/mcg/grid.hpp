#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mcg/geometry.hpp"
#include "mcg/observation.hpp"

namespace mcg {

struct InverseSensorModel {
  double l_hit = std::log(0.7 / 0.3);
  double l_miss = std::log(0.4 / 0.6);
  double clamp_min = -3.5;
  double clamp_max = 3.5;

  static InverseSensorModel unclamped() {
    InverseSensorModel m;
    m.clamp_min = -std::numeric_limits<double>::infinity();
    m.clamp_max = std::numeric_limits<double>::infinity();
    return m;
  }
};

/// One updated cell: linear index plus the log-odds value after the update.
struct ChangedCell {
  std::uint32_t index = 0;
  float log_odds = 0.0f;
};
using Changeset = std::vector<ChangedCell>;

/// Dense log-odds grid with a lattice-snapped origin.  Cells start at the
/// 0 log-odds prior.  Used both for the robot-centered sliding window and for
/// full-extent grids (referee / baseline), which differ only in clamping.
class LocalGrid {
 public:
  LocalGrid() = default;
  LocalGrid(const Vec3& origin, int nx, int ny, int nz, double res,
            const InverseSensorModel& ism);

  /// Grid whose center snaps to the resolution lattice around `center`.
  static LocalGrid centered(const Vec3& center, int nx, int ny, int nz,
                            double res, const InverseSensorModel& ism);
  /// Grid covering `bounds` (origin at bounds.min snapped is not required;
  /// the extent is ceil(extent / res) cells).
  static LocalGrid covering(const Aabb& bounds, double res,
                            const InverseSensorModel& ism);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  std::size_t size() const { return cells_.size(); }
  double resolution() const { return res_; }
  const Vec3& origin() const { return origin_; }
  const InverseSensorModel& ism() const { return ism_; }
  Aabb bounds() const {
    return {origin_, origin_ + Vec3(nx_ * res_, ny_ * res_, nz_ * res_)};
  }

  bool inside(int ix, int iy, int iz) const {
    return ix >= 0 && ix < nx_ && iy >= 0 && iy < ny_ && iz >= 0 && iz < nz_;
  }
  std::uint32_t index(int ix, int iy, int iz) const {
    return static_cast<std::uint32_t>((iz * ny_ + iy) * nx_ + ix);
  }
  Eigen::Vector3i coords(std::uint32_t idx) const {
    int ix = static_cast<int>(idx) % nx_;
    int iy = (static_cast<int>(idx) / nx_) % ny_;
    return {ix, iy, static_cast<int>(idx) / (nx_ * ny_)};
  }
  std::optional<Eigen::Vector3i> cell_of(const Vec3& p) const {
    Eigen::Vector3i c(static_cast<int>(std::floor((p.x() - origin_.x()) / res_)),
                      static_cast<int>(std::floor((p.y() - origin_.y()) / res_)),
                      static_cast<int>(std::floor((p.z() - origin_.z()) / res_)));
    if (!inside(c.x(), c.y(), c.z())) return std::nullopt;
    return c;
  }
  Vec3 center_of(int ix, int iy, int iz) const {
    return origin_ + Vec3((ix + 0.5) * res_, (iy + 0.5) * res_, (iz + 0.5) * res_);
  }

  float at(std::uint32_t idx) const { return cells_[idx]; }
  float& raw(std::uint32_t idx) { return cells_[idx]; }
  const std::vector<float>& cells() const { return cells_; }

  /// Log-odds update with the grid's clamp.  When a changeset is being
  /// recorded the final value for each touched cell is kept (one entry per
  /// cell per observation).
  void add_log_odds(std::uint32_t idx, double delta);

  void begin_changeset(Changeset* out);
  void end_changeset();

  bool operator==(const LocalGrid& o) const {
    return origin_ == o.origin_ && nx_ == o.nx_ && ny_ == o.ny_ &&
           nz_ == o.nz_ && res_ == o.res_ && cells_ == o.cells_;
  }

 private:
  Vec3 origin_ = Vec3::Zero();
  int nx_ = 0, ny_ = 0, nz_ = 0;
  double res_ = 0.1;
  InverseSensorModel ism_;
  std::vector<float> cells_;

  Changeset* changes_ = nullptr;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> slot_;
};

/// Visit every grid cell whose intersection with segment a->b has positive
/// length, in traversal order.  Axes whose boundary is crossed at the same
/// parameter step together, so corner touches do not produce zero-length
/// visits.  Fn receives (ix, iy, iz).
template <typename Fn>
void traverse_ray(const LocalGrid& g, const Vec3& a, const Vec3& b, Fn&& visit) {
  const Vec3 d = b - a;
  const Aabb box = g.bounds();
  double t0 = 0.0, t1 = 1.0;
  for (int i = 0; i < 3; ++i) {
    if (d[i] == 0.0) {
      if (a[i] < box.min[i] || a[i] > box.max[i]) return;
    } else {
      double ta = (box.min[i] - a[i]) / d[i];
      double tb = (box.max[i] - a[i]) / d[i];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
    }
  }
  if (t0 >= t1) return;

  const double res = g.resolution();
  const Vec3 p0 = a + t0 * d;
  int idx[3];
  int dims[3] = {g.nx(), g.ny(), g.nz()};
  double t_max[3], t_delta[3];
  for (int i = 0; i < 3; ++i) {
    int c = static_cast<int>(std::floor((p0[i] - g.origin()[i]) / res));
    idx[i] = std::clamp(c, 0, dims[i] - 1);
    if (d[i] > 0.0) {
      t_max[i] = (g.origin()[i] + (idx[i] + 1) * res - a[i]) / d[i];
      t_delta[i] = res / d[i];
    } else if (d[i] < 0.0) {
      t_max[i] = (g.origin()[i] + idx[i] * res - a[i]) / d[i];
      t_delta[i] = -res / d[i];
    } else {
      t_max[i] = std::numeric_limits<double>::infinity();
      t_delta[i] = std::numeric_limits<double>::infinity();
    }
  }

  double t = t0;
  while (true) {
    double t_next = std::min({t_max[0], t_max[1], t_max[2]});
    if (std::min(t_next, t1) > t) {
      visit(idx[0], idx[1], idx[2]);
    }
    if (t_next >= t1) return;
    t = t_next;
    for (int i = 0; i < 3; ++i) {
      if (t_max[i] == t_next) {
        idx[i] += d[i] > 0.0 ? 1 : -1;
        if (idx[i] < 0 || idx[i] >= dims[i]) return;
        t_max[i] += t_delta[i];
      }
    }
  }
}

/// Integrate one scan: every traversed cell before a beam's endpoint cell
/// gets l_miss; the endpoint cell gets l_hit when the beam returned within
/// max_range, l_miss otherwise (at-range beams are free evidence).  When
/// `changes` is given, the per-cell final values are recorded there.
void integrate_observation(LocalGrid& grid, const DepthObservation& obs,
                           double max_range, Changeset* changes = nullptr);

/// Total binary entropy over the grid, in bits.
double entropy_bits(const LocalGrid& grid);

/// -1 free (l < -delta), 0 unknown (|l| <= delta), +1 occupied (l > delta).
inline int tri_state(double log_odds, double delta) {
  if (log_odds > delta) return 1;
  if (log_odds < -delta) return -1;
  return 0;
}

/// Free cells with at least one unknown 6-neighbor.  Neighbors outside the
/// grid do not count; when `clamp` is given only cells whose centers fall
/// inside it are returned.
std::vector<std::uint32_t> frontier_cells(const LocalGrid& grid, double delta,
                                          const Aabb* clamp = nullptr);

/// Copy of a window of `src` (same resolution) as a grid centered at `center`
/// with the given dims and clamp; cells outside `src` keep the prior.
LocalGrid window_copy(const LocalGrid& src, const Vec3& center, int nx, int ny,
                      int nz, const InverseSensorModel& ism);

/// Binary grid dump (header + float32 cells, little-endian).
void save_grid(const LocalGrid& grid, const std::string& path);
LocalGrid load_grid(const std::string& path);

}  // namespace mcg
