#include "fgd/postproc.hpp"

#include <algorithm>
#include <stdexcept>

namespace fgd::postproc {

BinaryMask binarize(const SoftMask& m, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("threshold must be in [0,1]");
    BinaryMask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) out.set(x, y, m.at(x, y) >= t);
    return out;
}

std::vector<Component> connected_components(const BinaryMask& b) {
    const int w = b.width(), h = b.height();
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<Component> comps;
    std::vector<int> stack;

    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            std::size_t sidx = static_cast<std::size_t>(sy) * w + sx;
            if (!b.at(sx, sy) || label[sidx] != -1) continue;
            int id = static_cast<int>(comps.size());
            Component comp;
            comp.box = BoundingBox(sx, sy, sx, sy);
            label[sidx] = id;
            stack.push_back(static_cast<int>(sidx));
            while (!stack.empty()) {
                int idx = stack.back();
                stack.pop_back();
                int x = idx % w, y = idx / w;
                ++comp.area;
                comp.box.x_min = std::min(comp.box.x_min, x);
                comp.box.x_max = std::max(comp.box.x_max, x);
                comp.box.y_min = std::min(comp.box.y_min, y);
                comp.box.y_max = std::max(comp.box.y_max, y);
                const int nx[4] = {x - 1, x + 1, x, x};
                const int ny[4] = {y, y, y - 1, y + 1};
                for (int k = 0; k < 4; ++k) {
                    if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
                    std::size_t nidx = static_cast<std::size_t>(ny[k]) * w + nx[k];
                    if (b.at(nx[k], ny[k]) && label[nidx] == -1) {
                        label[nidx] = id;
                        stack.push_back(static_cast<int>(nidx));
                    }
                }
            }
            comps.push_back(std::move(comp));
        }
    }

    // Runs rebuilt row-wise from labels so they come out sorted.
    for (int y = 0; y < h; ++y) {
        int x = 0;
        while (x < w) {
            std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (label[idx] == -1) {
                ++x;
                continue;
            }
            int id = label[idx];
            int x_end = x;
            while (x_end + 1 < w && label[idx + (x_end - x) + 1] == id) ++x_end;
            comps[id].runs.push_back({y, x, x_end});
            x = x_end + 1;
        }
    }

    // Discovery order is already raster order of the first pixel; stable sort keeps
    // it as the tie-break.
    std::stable_sort(comps.begin(), comps.end(),
                     [](const Component& a, const Component& b) { return a.area > b.area; });
    return comps;
}

std::vector<BoundingBox> fit_boxes(const std::vector<Component>& comps,
                                   double min_area_fraction, int image_width,
                                   int image_height) {
    if (!(min_area_fraction >= 0.0 && min_area_fraction < 1.0))
        throw std::invalid_argument("min_area_fraction must be in [0,1)");
    double min_area = min_area_fraction * image_width * image_height;
    std::vector<BoundingBox> boxes;
    for (const Component& c : comps)
        if (c.area >= min_area) boxes.push_back(c.box);
    return boxes;
}

std::optional<BoundingBox> primary_box(const SoftMask& m, double t, double min_area_fraction,
                                       int frame_width, int frame_height) {
    SoftMask full = (m.width() == frame_width && m.height() == frame_height)
                        ? m
                        : resize_bilinear(m, frame_width, frame_height);
    auto comps = connected_components(binarize(full, t));
    auto boxes = fit_boxes(comps, min_area_fraction, frame_width, frame_height);
    if (boxes.empty()) return std::nullopt;
    return boxes.front();
}

}  // namespace fgd::postproc
