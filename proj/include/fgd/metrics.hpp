#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fgd/image.hpp"

namespace fgd::metrics {

/// One evaluated frame: prediction plus whatever ground truth exists for it.
struct EvalRecord {
    std::string frame_id;
    std::optional<BoundingBox> predicted_box;
    SoftMask predicted_mask;
    std::vector<BoundingBox> gt_boxes;
    std::optional<BinaryMask> gt_mask;

    EvalRecord(std::string fid, std::optional<BoundingBox> pbox, SoftMask pmask,
               std::vector<BoundingBox> gboxes, std::optional<BinaryMask> gmask);
};

/// Intersection over union with inclusive pixel areas; 0 when disjoint.
double box_iou(const BoundingBox& a, const BoundingBox& b);

// Percentage of frames whose predicted box reaches IoU >= 0.5 against the
// best-matching ground-truth box; missing predictions count as incorrect.
double corloc(const std::vector<EvalRecord>& records);

/// F-measure at a single binarization threshold; beta2 weighs precision over recall.
double f_beta(const SoftMask& pred, const BinaryMask& gt, double t, double beta2 = 0.3);

/// Max F-measure over the 256-point threshold sweep t in {0, 1/255, ..., 1}.
double f_beta_max(const SoftMask& pred, const BinaryMask& gt, double beta2 = 0.3);

struct PJ {
    double p;  // fraction of pixels labeled correctly, foreground and background
    double j;  // Jaccard similarity of the foreground
};
PJ pj(const BinaryMask& pred, const BinaryMask& gt);

/// Mean absolute per-pixel difference; lower is better.
double mae(const SoftMask& pred, const BinaryMask& gt);

/// Foreground intersection over union for one record; 1 when both masks are empty.
double mean_iou(const BinaryMask& pred, const BinaryMask& gt);

}  // namespace fgd::metrics
