#pragma once

#include <cstdint>
#include <vector>

namespace msseg {

/// Exact squared Euclidean distance to the nearest set pixel (mask != 0),
/// computed with the two-pass lower-envelope-of-parabolas method. Pixels of
/// an empty mask get a large finite sentinel (> any squared image distance).
std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& mask,
                                               int width, int height);

} // namespace msseg
