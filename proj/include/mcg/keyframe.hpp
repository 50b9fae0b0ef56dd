#pragma once

#include <cstdint>
#include <vector>

#include "mcg/geometry.hpp"
#include "mcg/gmm.hpp"

namespace mcg {

/// One stored observation: the sensor pose plus occupied- and free-space
/// mixtures fit from that scan.  Ids are assigned by insertion order and are
/// not part of the wire format.
struct Keyframe {
  std::uint32_t id = 0;
  Pose origin;
  Gmm occupied;
  Gmm free;

  std::uint64_t support_size() const {
    return occupied.support_size + free.support_size;
  }
};

/// Wire payload size in bytes: 4 * (10 * M_total + 1 + 6).  Ten float32 per
/// component (weight, mean, upper-triangular covariance), one total support
/// count, six pose floats.  The 16-byte framing header is not counted.
std::size_t keyframe_payload_bytes(const Keyframe& kf);

/// Serialize with a 16-byte header (magic "GMKF", version, component counts),
/// then the float32 little-endian payload.
std::vector<std::uint8_t> serialize_keyframe(const Keyframe& kf);

/// Parse one keyframe from the front of `bytes` starting at `offset`, which is
/// advanced past the consumed record.  The wire format stores a single total
/// support count; it is split across the two mixtures in proportion to their
/// component counts (sum preserved exactly).  Throws
/// std::runtime_error("malformed keyframe") on bad magic/version/truncation.
Keyframe deserialize_keyframe(const std::vector<std::uint8_t>& bytes,
                              std::size_t& offset);

}  // namespace mcg
