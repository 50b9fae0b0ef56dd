#pragma once

#include <cstdint>
#include <vector>

namespace mcg {

/// Exact Euclidean distance transform (squared-parabola lower envelope per
/// axis, three passes).  `source` marks seed cells; the result holds the
/// center-to-center distance in meters from each cell to its nearest seed,
/// +inf when there are no seeds.
std::vector<float> distance_field_m(int nx, int ny, int nz, double res,
                                    const std::vector<std::uint8_t>& source);

}  // namespace mcg
