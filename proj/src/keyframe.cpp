#include "mcg/keyframe.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace mcg {

namespace {

constexpr std::uint32_t kMagic = 0x464B4D47u;  // "GMKF" little-endian
constexpr std::uint32_t kVersion = 1u;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

void put_f32(std::vector<std::uint8_t>& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) |
         (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

double get_f32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return static_cast<double>(std::bit_cast<float>(get_u32(b, at)));
}

void put_component(std::vector<std::uint8_t>& out, const GaussianComponent& c) {
  put_f32(out, c.weight);
  put_f32(out, c.mean.x());
  put_f32(out, c.mean.y());
  put_f32(out, c.mean.z());
  put_f32(out, c.cov(0, 0));
  put_f32(out, c.cov(0, 1));
  put_f32(out, c.cov(0, 2));
  put_f32(out, c.cov(1, 1));
  put_f32(out, c.cov(1, 2));
  put_f32(out, c.cov(2, 2));
}

GaussianComponent get_component(const std::vector<std::uint8_t>& b, std::size_t at) {
  GaussianComponent c;
  c.weight = get_f32(b, at);
  c.mean = Vec3(get_f32(b, at + 4), get_f32(b, at + 8), get_f32(b, at + 12));
  double xx = get_f32(b, at + 16), xy = get_f32(b, at + 20), xz = get_f32(b, at + 24);
  double yy = get_f32(b, at + 28), yz = get_f32(b, at + 32), zz = get_f32(b, at + 36);
  c.cov << xx, xy, xz, xy, yy, yz, xz, yz, zz;
  return c;
}

}  // namespace

std::size_t keyframe_payload_bytes(const Keyframe& kf) {
  std::size_t m_total = kf.occupied.components.size() + kf.free.components.size();
  return 4 * (10 * m_total + 1 + 6);
}

std::vector<std::uint8_t> serialize_keyframe(const Keyframe& kf) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + keyframe_payload_bytes(kf));
  put_u32(out, kMagic);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(kf.occupied.components.size()));
  put_u32(out, static_cast<std::uint32_t>(kf.free.components.size()));
  for (const auto& c : kf.occupied.components) put_component(out, c);
  for (const auto& c : kf.free.components) put_component(out, c);
  put_f32(out, static_cast<double>(kf.support_size()));
  put_f32(out, kf.origin.t.x());
  put_f32(out, kf.origin.t.y());
  put_f32(out, kf.origin.t.z());
  put_f32(out, kf.origin.roll);
  put_f32(out, kf.origin.pitch);
  put_f32(out, kf.origin.yaw);
  return out;
}

Keyframe deserialize_keyframe(const std::vector<std::uint8_t>& bytes,
                              std::size_t& offset) {
  auto fail = [] { throw std::runtime_error("malformed keyframe"); };
  if (offset + 16 > bytes.size()) fail();
  if (get_u32(bytes, offset) != kMagic) fail();
  if (get_u32(bytes, offset + 4) != kVersion) fail();
  std::uint32_t n_occ = get_u32(bytes, offset + 8);
  std::uint32_t n_free = get_u32(bytes, offset + 12);
  std::size_t m_total = static_cast<std::size_t>(n_occ) + n_free;
  std::size_t payload = 4 * (10 * m_total + 7);
  if (offset + 16 + payload > bytes.size()) fail();

  Keyframe kf;
  std::size_t at = offset + 16;
  for (std::uint32_t i = 0; i < n_occ; ++i, at += 40) {
    kf.occupied.components.push_back(get_component(bytes, at));
  }
  for (std::uint32_t i = 0; i < n_free; ++i, at += 40) {
    kf.free.components.push_back(get_component(bytes, at));
  }
  double support = get_f32(bytes, at);
  at += 4;
  if (!(support >= 0.0) || !std::isfinite(support)) fail();
  // Only the total point count crosses the wire.  Split it across the two
  // mixtures in proportion to their component counts (each non-empty mixture
  // keeps at least one point) so the sum, and hence re-serialization, is
  // preserved exactly.
  auto total = static_cast<std::uint64_t>(std::llround(support));
  std::uint64_t occ_share = 0;
  if (n_occ > 0 && m_total > 0) {
    occ_share = (total * n_occ + m_total / 2) / m_total;
    std::uint64_t lo = 1;
    std::uint64_t hi = n_free > 0 ? (total > 0 ? total - 1 : 0) : total;
    if (occ_share < lo) occ_share = lo;
    if (occ_share > hi) occ_share = hi;
  }
  kf.occupied.support_size = occ_share;
  kf.free.support_size = n_free > 0 ? total - occ_share : 0;
  kf.origin.t = Vec3(get_f32(bytes, at), get_f32(bytes, at + 4), get_f32(bytes, at + 8));
  kf.origin.roll = get_f32(bytes, at + 12);
  kf.origin.pitch = get_f32(bytes, at + 16);
  kf.origin.yaw = get_f32(bytes, at + 20);
  offset += 16 + payload;
  return kf;
}

}  // namespace mcg
