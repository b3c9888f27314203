#include "fgd/ensemble.hpp"

#include <algorithm>
#include <stdexcept>

namespace fgd::ensemble {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

StudentPool::StudentPool(std::vector<student::StudentNet> nets) : members(std::move(nets)) {
    require(members.size() >= 2, "a pool needs at least two students");
}

int StudentPool::common_grid() const {
    int g = 0;
    for (const auto& m : members) g = std::max(g, m.arch.output_size());
    return g;
}

SoftMask multi_net(const std::vector<SoftMask>& masks) {
    require(masks.size() >= 2, "multi_net needs at least two masks");
    int w = 0, h = 0;
    for (const SoftMask& m : masks) {
        w = std::max(w, m.width());
        h = std::max(h, m.height());
    }
    SoftMask out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.set(x, y, 1.0);
    for (const SoftMask& m : masks) {
        SoftMask r = (m.width() == w && m.height() == h) ? m : resize_bilinear(m, w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) out.set(x, y, out.at(x, y) * r.at(x, y));
    }
    return out;
}

SoftMask multiselect_net(const Frame& frame, const std::vector<SoftMask>& candidates,
                         const masksel::Evaluator& evaluator) {
    require(!candidates.empty(), "multiselect_net needs at least one candidate");
    std::size_t best = 0;
    double best_score = evaluator.score(frame, candidates[0]);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        double s = evaluator.score(frame, candidates[i]);
        if (s > best_score) {  // strict: ties keep the earliest architecture
            best_score = s;
            best = i;
        }
    }
    return candidates[best];
}

std::vector<TeacherEntry> generation_teacher(const StudentPool& pool,
                                             const std::vector<Frame>& frames,
                                             const masksel::Evaluator& evaluator,
                                             double tau) {
    require(tau >= 0.0 && tau <= 1.0, "tau must be in [0,1]");
    std::vector<TeacherEntry> entries;
    for (std::size_t fi = 0; fi < frames.size(); ++fi) {
        const Frame& frame = frames[fi];
        for (std::size_t mi = 0; mi < pool.members.size(); ++mi) {
            SoftMask mask = student::predict(pool.members[mi], frame);
            double s = evaluator.score(frame, mask);
            if (s < tau) continue;
            SoftMask full = (mask.width() == frame.width() && mask.height() == frame.height())
                                ? mask
                                : resize_bilinear(mask, frame.width(), frame.height());
            entries.push_back({static_cast<int>(fi), static_cast<int>(mi), s, std::move(full)});
        }
    }
    return entries;
}

}  // namespace fgd::ensemble
