#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace capdrum::detail {

constexpr double kEdtInf = std::numeric_limits<double>::infinity();

// Exact squared Euclidean distance transform on a d-dimensional grid
// (Felzenszwalb-Huttenlocher lower envelope of parabolas, one axis at a
// time).  On entry f holds 0 at site cells and kEdtInf elsewhere; on exit it
// holds squared distance to the nearest site in cell units.
void edt_squared(std::vector<double>& f, const std::array<int, 4>& dims,
                 int dim);

}  // namespace capdrum::detail
