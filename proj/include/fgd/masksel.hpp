#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "fgd/image.hpp"
#include "fgd/nn.hpp"

namespace fgd::masksel {

struct SelectionPolicy {
    enum class Kind { percentile, threshold };
    Kind kind = Kind::percentile;
    double percentile_keep = 0.1;  // iteration 1
    double tau = 0.8;              // iteration 2

    void validate() const;
};

/// Mean of the strictly positive pixels; 0 for an all-zero mask.
double mean_nonzero_score(const SoftMask& m);

// Keeps the ceil(keep*n) highest-scored masks; ties broken by score descending,
// then frame_id ascending, then source.
std::vector<ScoredMask> percentile_select(const std::vector<ScoredMask>& masks, double keep);

/// (a.b)/(|a||b|); 0 if either mask is all zero. Nonnegative masks keep it in [0,1].
double cosine_similarity(const SoftMask& a, const SoftMask& b);

struct EvalTrainingPair {
    Frame frame;
    SoftMask candidate;
    double target;  // cosine similarity of the candidate to the ensemble mask
};

// One pair per (frame, candidate); frames without an ensemble mask are skipped
// and their indices reported.
std::vector<EvalTrainingPair> make_eval_pairs(
    const std::vector<Frame>& frames,
    const std::vector<std::vector<SoftMask>>& candidates_per_frame,
    const std::vector<std::optional<SoftMask>>& ensemble_per_frame,
    std::vector<int>* skipped_frames = nullptr);

struct EvaluatorConfig {
    int input_size = 32;
    std::vector<int> conv_widths = {8, 16, 16};
    int dense_width = 64;
    double lr = 0.001;
    int epochs = 10;
    int batch_size = 16;
    std::uint64_t seed = 0;
};

/// Scalar mask-quality regressor over a 4-channel (RGB + mask) stack.
class Evaluator {
public:
    Evaluator(nn::Network net, int input_size);

    /// Freshly initialized network for the given config.
    static Evaluator make(const EvaluatorConfig& cfg);

    double score(const Frame& frame, const SoftMask& mask) const;

    void save(const std::filesystem::path& path) const;
    static Evaluator load(const std::filesystem::path& path, int input_size = 32);

    const nn::Network& network() const { return net_; }
    nn::Network& network() { return net_; }
    int input_size() const { return input_size_; }

    nn::Tensor4 make_input(const Frame& frame, const SoftMask& mask) const;

private:
    nn::Network net_;
    int input_size_;
};

struct EvaluatorTrainResult {
    Evaluator evaluator;
    std::vector<double> epoch_loss;
};

/// Minimizes mean squared error against the cosine targets; seed-deterministic.
EvaluatorTrainResult train_evaluator(const std::vector<EvalTrainingPair>& pairs,
                                     const EvaluatorConfig& cfg);

struct Selection {
    int frame_index;
    int candidate_index;
    double score;
};

/// Keeps every (frame, mask) whose evaluator score reaches tau.
std::vector<Selection> threshold_select(const Evaluator& evaluator,
                                        const std::vector<Frame>& frames,
                                        const std::vector<std::vector<SoftMask>>& masks_per_frame,
                                        double tau = 0.8);

}  // namespace fgd::masksel
