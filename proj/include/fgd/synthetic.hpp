#pragma once

#include <cstdint>
#include <filesystem>

namespace fgd::pipeline {

// Textured square translating over a static noisy background; colors are kept
// in separate families so foreground/background statistics are learnable.
struct SyntheticSpec {
    int shot_count = 40;
    int frames_per_shot = 30;
    int frame_width = 64;
    int frame_height = 64;
    int object_min_size = 14;
    int object_max_size = 20;
    int max_speed = 1;  // px/frame per axis
    std::uint64_t seed = 1;

    void validate() const;
};

// Writes <root>/shots/shot_###/frame_###.png plus ground truth under
// <root>/gt/shot_###/ (mask_###.png and boxes.csv). Ground truth is only ever
// read by evaluation, never by training stages.
void generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& root);

}  // namespace fgd::pipeline
