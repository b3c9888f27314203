#include "fgd/masksel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fgd::masksel {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void SelectionPolicy::validate() const {
    require(percentile_keep > 0.0 && percentile_keep <= 1.0,
            "percentile_keep must be in (0,1]");
    require(tau >= 0.0 && tau <= 1.0, "tau must be in [0,1]");
}

double mean_nonzero_score(const SoftMask& m) {
    double sum = 0.0;
    long long count = 0;
    for (double v : m.data()) {
        if (v > 0.0) {
            sum += v;
            ++count;
        }
    }
    return count ? sum / count : 0.0;
}

std::vector<ScoredMask> percentile_select(const std::vector<ScoredMask>& masks, double keep) {
    require(keep > 0.0 && keep <= 1.0, "keep fraction must be in (0,1]");
    if (masks.empty()) return {};
    std::vector<std::size_t> order(masks.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (masks[a].score != masks[b].score) return masks[a].score > masks[b].score;
        if (masks[a].frame_id != masks[b].frame_id) return masks[a].frame_id < masks[b].frame_id;
        return masks[a].source < masks[b].source;
    });
    std::size_t n_keep = static_cast<std::size_t>(
        std::ceil(keep * static_cast<double>(masks.size())));
    n_keep = std::min(n_keep, masks.size());
    std::vector<ScoredMask> out;
    out.reserve(n_keep);
    for (std::size_t i = 0; i < n_keep; ++i) out.push_back(masks[order[i]]);
    return out;
}

double cosine_similarity(const SoftMask& a, const SoftMask& b) {
    require(a.width() == b.width() && a.height() == b.height(),
            "cosine similarity needs equal dimensions");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        dot += a.data()[i] * b.data()[i];
        na += a.data()[i] * a.data()[i];
        nb += b.data()[i] * b.data()[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::min(1.0, dot / (std::sqrt(na) * std::sqrt(nb)));
}

std::vector<EvalTrainingPair> make_eval_pairs(
    const std::vector<Frame>& frames,
    const std::vector<std::vector<SoftMask>>& candidates_per_frame,
    const std::vector<std::optional<SoftMask>>& ensemble_per_frame,
    std::vector<int>* skipped_frames) {
    require(frames.size() == candidates_per_frame.size() &&
                frames.size() == ensemble_per_frame.size(),
            "make_eval_pairs inputs must be aligned per frame");
    std::vector<EvalTrainingPair> pairs;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (!ensemble_per_frame[i].has_value()) {
            if (skipped_frames) skipped_frames->push_back(static_cast<int>(i));
            continue;
        }
        const SoftMask& ens = *ensemble_per_frame[i];
        for (const SoftMask& cand : candidates_per_frame[i]) {
            SoftMask aligned = (cand.width() == ens.width() && cand.height() == ens.height())
                                   ? cand
                                   : resize_bilinear(cand, ens.width(), ens.height());
            pairs.push_back({frames[i], cand, cosine_similarity(aligned, ens)});
        }
    }
    return pairs;
}

Evaluator::Evaluator(nn::Network net, int input_size)
    : net_(std::move(net)), input_size_(input_size) {
    require(input_size_ > 0, "evaluator input size must be positive");
}

Evaluator Evaluator::make(const EvaluatorConfig& cfg) {
    require(cfg.input_size >= 8 && cfg.input_size % 8 == 0,
            "evaluator input size must be a positive multiple of 8");
    require(cfg.conv_widths.size() == 3, "evaluator uses three conv stages");
    nn::Rng rng(cfg.seed ^ 0x45564C5345474eULL);  // distinct stream per role
    nn::Network net;
    int ch = 4;
    for (int width : cfg.conv_widths) {
        net.conv(ch, width, 2, rng).relu();
        ch = width;
    }
    int spatial = cfg.input_size / 8;
    net.dense(ch * spatial * spatial, cfg.dense_width, rng).relu();
    net.dense(cfg.dense_width, 1, rng);
    return Evaluator(std::move(net), cfg.input_size);
}

nn::Tensor4 Evaluator::make_input(const Frame& frame, const SoftMask& mask) const {
    Frame f = (frame.width() == input_size_ && frame.height() == input_size_)
                  ? frame
                  : resize_bilinear(frame, input_size_, input_size_);
    SoftMask m = (mask.width() == input_size_ && mask.height() == input_size_)
                     ? mask
                     : resize_bilinear(mask, input_size_, input_size_);
    nn::Tensor4 x(1, 4, input_size_, input_size_);
    for (int y = 0; y < input_size_; ++y) {
        for (int xx = 0; xx < input_size_; ++xx) {
            for (int c = 0; c < 3; ++c) x.at(0, c, y, xx) = f.at(xx, y, c);
            x.at(0, 3, y, xx) = m.at(xx, y);
        }
    }
    return x;
}

double Evaluator::score(const Frame& frame, const SoftMask& mask) const {
    nn::Tensor4 out = nn::forward(net_, make_input(frame, mask));
    return out.v[0];
}

void Evaluator::save(const std::filesystem::path& path) const {
    nn::save_weights(net_, path);
}

Evaluator Evaluator::load(const std::filesystem::path& path, int input_size) {
    return Evaluator(nn::load_weights(path), input_size);
}

EvaluatorTrainResult train_evaluator(const std::vector<EvalTrainingPair>& pairs,
                                     const EvaluatorConfig& cfg) {
    require(!pairs.empty(), "train_evaluator needs at least one pair");
    require(cfg.epochs >= 1 && cfg.batch_size >= 1, "bad evaluator training config");

    Evaluator evaluator = Evaluator::make(cfg);
    nn::Network& net = evaluator.network();
    nn::AdamState adam(net, cfg.lr);
    nn::Rng shuffle_rng(cfg.seed ^ 0x53485546464cULL);

    // Inputs are fixed across epochs; build once.
    std::vector<nn::Tensor4> inputs;
    inputs.reserve(pairs.size());
    for (const auto& p : pairs) inputs.push_back(evaluator.make_input(p.frame, p.candidate));

    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    const int s = cfg.input_size;

    std::vector<double> epoch_loss;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.below(static_cast<int>(i))]);

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t bsz = std::min<std::size_t>(cfg.batch_size, order.size() - start);
            nn::Tensor4 batch(static_cast<int>(bsz), 4, s, s);
            for (std::size_t b = 0; b < bsz; ++b)
                std::copy(inputs[order[start + b]].v.begin(), inputs[order[start + b]].v.end(),
                          batch.v.begin() + static_cast<long>(b * inputs[0].size()));

            nn::ForwardCache cache;
            nn::Tensor4 out = nn::forward(net, batch, &cache);
            nn::Tensor4 grad(out.n, out.c, out.h, out.w);
            double batch_loss = 0.0;
            for (std::size_t b = 0; b < bsz; ++b) {
                double diff = out.v[b] - pairs[order[start + b]].target;
                batch_loss += diff * diff;
                grad.v[b] = 2.0 * diff / static_cast<double>(bsz);
            }
            batch_loss /= static_cast<double>(bsz);
            if (!std::isfinite(batch_loss))
                throw nn::TrainingDivergedError("evaluator loss is not finite");
            loss_sum += batch_loss * static_cast<double>(bsz);

            nn::Gradients grads = nn::backward(net, cache, grad);
            nn::adam_step(adam, net, grads);
        }
        epoch_loss.push_back(loss_sum / static_cast<double>(order.size()));
    }
    return {std::move(evaluator), std::move(epoch_loss)};
}

std::vector<Selection> threshold_select(const Evaluator& evaluator,
                                        const std::vector<Frame>& frames,
                                        const std::vector<std::vector<SoftMask>>& masks_per_frame,
                                        double tau) {
    require(tau >= 0.0 && tau <= 1.0, "tau must be in [0,1]");
    require(frames.size() == masks_per_frame.size(), "frames and masks must be aligned");
    std::vector<Selection> out;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        for (std::size_t j = 0; j < masks_per_frame[i].size(); ++j) {
            double s = evaluator.score(frames[i], masks_per_frame[i][j]);
            if (s >= tau)
                out.push_back({static_cast<int>(i), static_cast<int>(j), s});
        }
    }
    return out;
}

}  // namespace fgd::masksel
