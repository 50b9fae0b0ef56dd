#include "mcg/geometry.hpp"

#include <cmath>

namespace mcg {

double normalize_angle(double a) {
  double r = std::fmod(a + M_PI, 2.0 * M_PI);
  if (r <= 0.0) r += 2.0 * M_PI;
  return r - M_PI;  // (-pi, pi]
}

std::vector<Aabb> box_set_difference(const Aabb& b_new, const Aabb& b_old) {
  std::vector<Aabb> out;
  if (b_new.empty()) return out;
  Aabb inter = b_new.intersection(b_old);
  if (inter.empty()) {
    out.push_back(b_new);
    return out;
  }
  auto push = [&out](const Aabb& b) {
    if (!b.empty()) out.push_back(b);
  };
  // x slabs over the full y/z footprint of b_new.
  push({b_new.min, Vec3(inter.min.x(), b_new.max.y(), b_new.max.z())});
  push({Vec3(inter.max.x(), b_new.min.y(), b_new.min.z()), b_new.max});
  // y slabs restricted to the shared x range.
  push({Vec3(inter.min.x(), b_new.min.y(), b_new.min.z()),
        Vec3(inter.max.x(), inter.min.y(), b_new.max.z())});
  push({Vec3(inter.min.x(), inter.max.y(), b_new.min.z()),
        Vec3(inter.max.x(), b_new.max.y(), b_new.max.z())});
  // z slabs in the shared x/y column.
  push({Vec3(inter.min.x(), inter.min.y(), b_new.min.z()),
        Vec3(inter.max.x(), inter.max.y(), inter.min.z())});
  push({Vec3(inter.min.x(), inter.min.y(), inter.max.z()),
        Vec3(inter.max.x(), inter.max.y(), b_new.max.z())});
  return out;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  // splitmix64 finalizer over a combined word; cheap and well scrambled.
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1) + 0x94d049bb133111ebULL * (c + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  // Modulo bias is negligible for the small ranges used here.
  return n ? next_u64() % n : 0;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * M_PI * u2);
}

}  // namespace mcg
