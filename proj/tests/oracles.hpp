#pragma once

// Independent brute-force oracles used only by tests. These deliberately avoid
// the library implementations they are checking.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fgd/image.hpp"

namespace fgd_test::oracle {

// ---- box / pixel metrics ----------------------------------------------------

inline bool box_contains(const fgd::BoundingBox& b, int x, int y) {
    return x >= b.x_min && x <= b.x_max && y >= b.y_min && y <= b.y_max;
}

// IoU by scanning every pixel of the joint hull.
inline double box_iou(const fgd::BoundingBox& a, const fgd::BoundingBox& b) {
    int x0 = std::min(a.x_min, b.x_min), x1 = std::max(a.x_max, b.x_max);
    int y0 = std::min(a.y_min, b.y_min), y1 = std::max(a.y_max, b.y_max);
    long long inter = 0, uni = 0;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            bool in_a = box_contains(a, x, y);
            bool in_b = box_contains(b, x, y);
            inter += in_a && in_b;
            uni += in_a || in_b;
        }
    }
    return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

inline double f_beta_at(const fgd::SoftMask& pred, const fgd::BinaryMask& gt, double t,
                        double beta2) {
    long long tp = 0, fp = 0, fn = 0;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            bool p = pred.at(x, y) >= t;
            bool g = gt.at(x, y);
            if (p && g) ++tp;
            if (p && !g) ++fp;
            if (!p && g) ++fn;
        }
    }
    if (tp + fp + fn == 0) return 1.0;
    if (tp + fp == 0 || tp + fn == 0) return 0.0;
    double prec = double(tp) / double(tp + fp);
    double rec = double(tp) / double(tp + fn);
    if (beta2 * prec + rec == 0.0) return 0.0;
    return (1.0 + beta2) * prec * rec / (beta2 * prec + rec);
}

inline double f_beta_max(const fgd::SoftMask& pred, const fgd::BinaryMask& gt, double beta2) {
    double best = 0.0;
    for (int k = 0; k <= 255; ++k) best = std::max(best, f_beta_at(pred, gt, k / 255.0, beta2));
    return best;
}

inline std::pair<double, double> pj(const fgd::BinaryMask& pred, const fgd::BinaryMask& gt) {
    long long ok = 0, inter = 0, uni = 0, total = 0;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            ++total;
            if (pred.at(x, y) == gt.at(x, y)) ++ok;
            if (pred.at(x, y) && gt.at(x, y)) ++inter;
            if (pred.at(x, y) || gt.at(x, y)) ++uni;
        }
    }
    return {double(ok) / double(total), uni ? double(inter) / double(uni) : 1.0};
}

inline double mae(const fgd::SoftMask& pred, const fgd::BinaryMask& gt) {
    double acc = 0.0;
    for (int y = 0; y < gt.height(); ++y)
        for (int x = 0; x < gt.width(); ++x)
            acc += std::fabs(pred.at(x, y) - (gt.at(x, y) ? 1.0 : 0.0));
    return acc / (double(gt.width()) * gt.height());
}

inline double iou(const fgd::BinaryMask& pred, const fgd::BinaryMask& gt) {
    long long inter = 0, uni = 0;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            if (pred.at(x, y) && gt.at(x, y)) ++inter;
            if (pred.at(x, y) || gt.at(x, y)) ++uni;
        }
    }
    return uni ? double(inter) / double(uni) : 1.0;
}

// ---- connected components via recursive flood fill ---------------------------

inline void flood(const fgd::BinaryMask& b, std::vector<int>& labels, int x, int y, int id) {
    if (x < 0 || y < 0 || x >= b.width() || y >= b.height()) return;
    int idx = y * b.width() + x;
    if (!b.at(x, y) || labels[idx] != -1) return;
    labels[idx] = id;
    flood(b, labels, x - 1, y, id);
    flood(b, labels, x + 1, y, id);
    flood(b, labels, x, y - 1, id);
    flood(b, labels, x, y + 1, id);
}

struct FloodComponent {
    int area = 0;
    fgd::BoundingBox box;
    int first_pixel = 0;  // raster index of the first pixel
};

inline std::vector<FloodComponent> flood_components(const fgd::BinaryMask& b) {
    std::vector<int> labels(static_cast<std::size_t>(b.width()) * b.height(), -1);
    std::vector<FloodComponent> comps;
    for (int y = 0; y < b.height(); ++y) {
        for (int x = 0; x < b.width(); ++x) {
            if (!b.at(x, y) || labels[y * b.width() + x] != -1) continue;
            flood(b, labels, x, y, static_cast<int>(comps.size()));
            comps.push_back({0, fgd::BoundingBox(x, y, x, y), y * b.width() + x});
        }
    }
    for (int y = 0; y < b.height(); ++y) {
        for (int x = 0; x < b.width(); ++x) {
            int id = labels[y * b.width() + x];
            if (id == -1) continue;
            auto& c = comps[id];
            ++c.area;
            c.box.x_min = std::min(c.box.x_min, x);
            c.box.x_max = std::max(c.box.x_max, x);
            c.box.y_min = std::min(c.box.y_min, y);
            c.box.y_max = std::max(c.box.y_max, y);
        }
    }
    std::stable_sort(comps.begin(), comps.end(), [](const FloodComponent& a, const FloodComponent& b2) {
        return a.area > b2.area;
    });
    return comps;
}

// ---- dense symmetric eigendecomposition (cyclic Jacobi) ----------------------

struct EigenResult {
    std::vector<double> values;                // descending
    std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i]
};

inline EigenResult jacobi_eigen(std::vector<std::vector<double>> a) {
    const int n = static_cast<int>(a.size());
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) v[i][i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-28) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a[x][x] > a[y][y]; });
    EigenResult r;
    for (int idx : order) {
        r.values.push_back(a[idx][idx]);
        std::vector<double> col(n);
        for (int k = 0; k < n; ++k) col[k] = v[k][idx];
        r.vectors.push_back(std::move(col));
    }
    return r;
}

// ---- rank statistics ---------------------------------------------------------

inline std::vector<double> ranks(const std::vector<double>& x) {
    std::vector<int> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto ra = ranks(a), rb = ranks(b);
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= ra.size();
    mb /= rb.size();
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    return num / std::sqrt(da * db);
}

}  // namespace fgd_test::oracle
