#pragma once

#include "instamatte/raster.hpp"

namespace instamatte {

// How pixels beyond the raster edge are treated by dilation.
enum class Border { False, True };

// Disk structuring element: a pixel is set iff some set pixel lies within
// Euclidean distance `radius`. With Border::True the region outside the
// raster counts as set.
BinaryMask binary_dilate(const BinaryMask& m, int radius, Border border = Border::False);

// Pixels outside the raster count as false, so erosion pulls away from the
// frame edge. Equals complement(binary_dilate(complement(m), radius, Border::True)).
BinaryMask binary_erode(const BinaryMask& m, int radius);

}  // namespace instamatte
