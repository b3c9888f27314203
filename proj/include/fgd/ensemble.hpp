#pragma once

#include <vector>

#include "fgd/image.hpp"
#include "fgd/masksel.hpp"
#include "fgd/student.hpp"

namespace fgd::ensemble {

/// Trained students acting together; fusion happens on the largest output grid.
struct StudentPool {
    std::vector<student::StudentNet> members;

    explicit StudentPool(std::vector<student::StudentNet> nets);
    int common_grid() const;  // max output resolution across members
};

// Pixel-wise product on the common grid; only pixels all masks agree on survive.
SoftMask multi_net(const std::vector<SoftMask>& masks);

// The candidate the evaluator scores highest, returned unchanged; ties go to
// the earliest candidate (architecture order).
SoftMask multiselect_net(const Frame& frame, const std::vector<SoftMask>& candidates,
                         const masksel::Evaluator& evaluator);

struct TeacherEntry {
    int frame_index;
    int member_index;
    double score;
    SoftMask mask;  // at frame resolution
};

// Runs every pool member on every frame and keeps each mask that the
// evaluator scores at or above tau, independently per mask.
std::vector<TeacherEntry> generation_teacher(const StudentPool& pool,
                                             const std::vector<Frame>& frames,
                                             const masksel::Evaluator& evaluator,
                                             double tau = 0.8);

}  // namespace fgd::ensemble
