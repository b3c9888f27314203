#include "fgd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fgd/postproc.hpp"

namespace fgd::metrics {

namespace {

void check_aligned(int pw, int ph, int gw, int gh) {
    if (pw != gw || ph != gh)
        throw std::invalid_argument("prediction and ground truth sizes differ");
}

}  // namespace

EvalRecord::EvalRecord(std::string fid, std::optional<BoundingBox> pbox, SoftMask pmask,
                       std::vector<BoundingBox> gboxes, std::optional<BinaryMask> gmask)
    : frame_id(std::move(fid)),
      predicted_box(pbox),
      predicted_mask(std::move(pmask)),
      gt_boxes(std::move(gboxes)),
      gt_mask(std::move(gmask)) {
    if (gt_boxes.empty() && !gt_mask.has_value())
        throw std::invalid_argument("record needs at least one ground-truth annotation");
}

double box_iou(const BoundingBox& a, const BoundingBox& b) {
    long long ix0 = std::max(a.x_min, b.x_min);
    long long iy0 = std::max(a.y_min, b.y_min);
    long long ix1 = std::min(a.x_max, b.x_max);
    long long iy1 = std::min(a.y_max, b.y_max);
    if (ix0 > ix1 || iy0 > iy1) return 0.0;
    double inter = static_cast<double>((ix1 - ix0 + 1) * (iy1 - iy0 + 1));
    double uni = static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
    return inter / uni;
}

double corloc(const std::vector<EvalRecord>& records) {
    if (records.empty()) throw std::invalid_argument("corloc needs at least one record");
    int correct = 0;
    for (const EvalRecord& r : records) {
        if (!r.predicted_box.has_value()) continue;
        double best = 0.0;
        for (const BoundingBox& gt : r.gt_boxes)
            best = std::max(best, box_iou(*r.predicted_box, gt));
        if (best >= 0.5) ++correct;
    }
    return 100.0 * correct / static_cast<double>(records.size());
}

double f_beta(const SoftMask& pred, const BinaryMask& gt, double t, double beta2) {
    check_aligned(pred.width(), pred.height(), gt.width(), gt.height());
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("threshold must be in [0,1]");
    long long tp = 0, fp = 0, fn = 0;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            bool p = pred.at(x, y) >= t;
            bool g = gt.at(x, y);
            tp += p && g;
            fp += p && !g;
            fn += !p && g;
        }
    }
    if (tp + fp + fn == 0) return 1.0;  // perfect absence
    double precision = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 0.0;
    double recall = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 0.0;
    double denom = beta2 * precision + recall;
    if (denom == 0.0) return 0.0;
    return (1.0 + beta2) * precision * recall / denom;
}

double f_beta_max(const SoftMask& pred, const BinaryMask& gt, double beta2) {
    double best = 0.0;
    for (int k = 0; k <= 255; ++k)
        best = std::max(best, f_beta(pred, gt, k / 255.0, beta2));
    return best;
}

PJ pj(const BinaryMask& pred, const BinaryMask& gt) {
    check_aligned(pred.width(), pred.height(), gt.width(), gt.height());
    long long correct = 0, inter = 0, uni = 0;
    long long total = static_cast<long long>(gt.width()) * gt.height();
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            bool p = pred.at(x, y);
            bool g = gt.at(x, y);
            correct += p == g;
            inter += p && g;
            uni += p || g;
        }
    }
    double j = uni ? static_cast<double>(inter) / uni : 1.0;
    return {static_cast<double>(correct) / total, j};
}

double mae(const SoftMask& pred, const BinaryMask& gt) {
    check_aligned(pred.width(), pred.height(), gt.width(), gt.height());
    double acc = 0.0;
    for (int y = 0; y < gt.height(); ++y)
        for (int x = 0; x < gt.width(); ++x)
            acc += std::fabs(pred.at(x, y) - (gt.at(x, y) ? 1.0 : 0.0));
    return acc / (static_cast<double>(gt.width()) * gt.height());
}

double mean_iou(const BinaryMask& pred, const BinaryMask& gt) {
    check_aligned(pred.width(), pred.height(), gt.width(), gt.height());
    long long inter = 0, uni = 0;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            bool p = pred.at(x, y);
            bool g = gt.at(x, y);
            inter += p && g;
            uni += p || g;
        }
    }
    return uni ? static_cast<double>(inter) / uni : 1.0;
}

}  // namespace fgd::metrics
