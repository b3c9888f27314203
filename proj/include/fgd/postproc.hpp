#pragma once

#include <optional>
#include <vector>

#include "fgd/image.hpp"

namespace fgd::postproc {

/// Horizontal run of foreground pixels, inclusive ends.
struct Run {
    int y;
    int x_begin;
    int x_end;
};

/// One 4-connected component with its tight hull.
struct Component {
    std::vector<Run> runs;
    BoundingBox box;
    int area = 0;
};

/// Pixel true iff value >= t.
BinaryMask binarize(const SoftMask& m, double t);

// 4-connectivity; sorted by area descending, ties by first pixel in raster order.
std::vector<Component> connected_components(const BinaryMask& b);

/// Tight boxes of components with area >= min_area_fraction * image area; order preserved.
std::vector<BoundingBox> fit_boxes(const std::vector<Component>& comps,
                                   double min_area_fraction, int image_width,
                                   int image_height);

/// Upsample to frame size, threshold, and return the largest surviving component box.
std::optional<BoundingBox> primary_box(const SoftMask& m, double t, double min_area_fraction,
                                       int frame_width, int frame_height);

}  // namespace fgd::postproc
