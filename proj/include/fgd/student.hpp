#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fgd/image.hpp"
#include "fgd/nn.hpp"

namespace fgd::student {

enum class ArchKind { tiny_lowres, tiny_fconv, tiny_unet };

// Three structural families: dense-head low-resolution, fully convolutional,
// and a skip-connected encoder-decoder.
struct StudentArch {
    ArchKind kind = ArchKind::tiny_lowres;
    std::vector<int> widths;  // per-family channel plan

    static StudentArch make(ArchKind kind);
    static StudentArch from_name(std::string_view name);
    std::string name() const;

    int input_size() const { return 64; }
    int output_size() const { return kind == ArchKind::tiny_lowres ? 16 : 64; }
};

struct TrainConfig {
    double lr = 0.001;
    int epochs = 10;
    int batch_size = 8;
    std::uint64_t seed = 0;
    bool augment = true;
    double crop_fraction = 0.8;

    void validate() const;
};

struct TrainingPair {
    Frame frame;
    SoftMask mask;  // teacher mask at frame resolution
};

struct StudentNet {
    StudentArch arch;
    nn::Network net;
};

// Mean over samples of the per-sample sum of squared pixel differences.
double l2_loss(const nn::Tensor4& pred, const nn::Tensor4& target);

// Random crop of round(crop_fraction * dim) at a uniform offset, the same
// window applied to frame and mask, both rescaled to the network sizes.
std::pair<Frame, SoftMask> augment(const Frame& frame, const SoftMask& mask,
                                   double crop_fraction, int input_size, int output_size,
                                   nn::Rng& rng);

struct TrainResult {
    StudentNet net;
    std::vector<double> epoch_loss;
};

/// Adam minimization of the L2 loss over seeded shuffled epochs.
TrainResult train_student(const StudentArch& arch, const std::vector<TrainingPair>& pairs,
                          const TrainConfig& cfg);

/// Soft mask at the architecture's output resolution; input resized internally.
SoftMask predict(const StudentNet& net, const Frame& frame);

/// Freshly initialized network for an architecture (exposed for tests).
nn::Network build_network(const StudentArch& arch, nn::Rng& rng);

}  // namespace fgd::student
