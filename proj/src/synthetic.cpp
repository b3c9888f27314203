#include "fgd/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "fgd/image.hpp"
#include "fgd/nn.hpp"
#include "fgd/png_io.hpp"

namespace fgd::pipeline {

namespace fs = std::filesystem;

void SyntheticSpec::validate() const {
    if (shot_count < 1 || frames_per_shot < 2)
        throw std::invalid_argument("corpus needs >= 1 shot and >= 2 frames per shot");
    if (frame_width < 8 || frame_height < 8)
        throw std::invalid_argument("frame size too small");
    if (object_min_size < 2 || object_min_size > object_max_size)
        throw std::invalid_argument("bad object size range");
    if (object_max_size >= std::min(frame_width, frame_height))
        throw std::invalid_argument("object must fit inside the frame");
    if (max_speed < 0) throw std::invalid_argument("max_speed must be >= 0");
}

namespace {

std::string index_name(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%03d", prefix, i);
    return buf;
}

// Start offset for one axis so the whole trajectory stays in bounds; the
// feasible interval is shrunk to its central half to keep objects mostly
// near the center, matching the assumption behind the center prior.
int pick_start(int frame_dim, int obj_size, int velocity, int n_frames, nn::Rng& rng) {
    int span = (n_frames - 1) * velocity;
    int lo = std::max(0, -span);
    int hi = (frame_dim - obj_size) - std::max(0, span);
    int margin = (hi - lo) / 4;
    lo += margin;
    hi -= margin;
    return lo + rng.below(hi - lo + 1);
}

bool axis_feasible(int frame_dim, int obj_size, int velocity, int n_frames) {
    int span = (n_frames - 1) * velocity;
    return std::max(0, -span) <= (frame_dim - obj_size) - std::max(0, span);
}

}  // namespace

void generate_synthetic(const SyntheticSpec& spec, const fs::path& root) {
    spec.validate();
    fs::create_directories(root / "shots");
    fs::create_directories(root / "gt");

    for (int shot = 0; shot < spec.shot_count; ++shot) {
        nn::Rng rng(spec.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(shot));
        const int W = spec.frame_width, H = spec.frame_height;

        // Static bluish noise background.
        Frame background(W, H);
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                background.set(x, y, 0, rng.uniform(0.00, 0.35));
                background.set(x, y, 1, rng.uniform(0.10, 0.50));
                background.set(x, y, 2, rng.uniform(0.55, 1.00));
            }
        }

        const int size = spec.object_min_size + rng.below(spec.object_max_size - spec.object_min_size + 1);
        int vx = 0, vy = 0;
        do {
            vx = rng.below(2 * spec.max_speed + 1) - spec.max_speed;
            vy = rng.below(2 * spec.max_speed + 1) - spec.max_speed;
        } while (vx == 0 && vy == 0 && spec.max_speed > 0);
        while (!axis_feasible(W, size, vx, spec.frames_per_shot)) vx -= vx > 0 ? 1 : -1;
        while (!axis_feasible(H, size, vy, spec.frames_per_shot)) vy -= vy > 0 ? 1 : -1;
        const int x0 = pick_start(W, size, vx, spec.frames_per_shot, rng);
        const int y0 = pick_start(H, size, vy, spec.frames_per_shot, rng);

        // Reddish texture patch that translates rigidly with the object.
        std::vector<double> texture(static_cast<std::size_t>(size) * size * 3);
        for (int p = 0; p < size * size; ++p) {
            texture[p * 3 + 0] = rng.uniform(0.65, 1.00);
            texture[p * 3 + 1] = rng.uniform(0.15, 0.55);
            texture[p * 3 + 2] = rng.uniform(0.00, 0.30);
        }

        const std::string shot_id = index_name("shot_", shot);
        fs::path shot_dir = root / "shots" / shot_id;
        fs::path gt_dir = root / "gt" / shot_id;
        fs::create_directories(shot_dir);
        fs::create_directories(gt_dir);

        std::ofstream boxes(gt_dir / "boxes.csv");
        boxes << "frame,x_min,y_min,x_max,y_max\n";

        for (int t = 0; t < spec.frames_per_shot; ++t) {
            const int ox = x0 + t * vx;
            const int oy = y0 + t * vy;
            Frame frame = background;
            SoftMask gt(W, H);
            for (int y = 0; y < size; ++y) {
                for (int x = 0; x < size; ++x) {
                    const std::size_t tp = (static_cast<std::size_t>(y) * size + x) * 3;
                    frame.set(ox + x, oy + y, 0, texture[tp + 0]);
                    frame.set(ox + x, oy + y, 1, texture[tp + 1]);
                    frame.set(ox + x, oy + y, 2, texture[tp + 2]);
                    gt.set(ox + x, oy + y, 1.0);
                }
            }
            const std::string stem = index_name("frame_", t);
            write_png(shot_dir / (stem + ".png"), frame);
            write_png(gt_dir / (index_name("mask_", t) + ".png"), gt);
            boxes << stem << ',' << ox << ',' << oy << ',' << ox + size - 1 << ','
                  << oy + size - 1 << '\n';
        }
    }
}

}  // namespace fgd::pipeline
