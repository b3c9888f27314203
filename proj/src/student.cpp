#include "fgd/student.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fgd::student {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

StudentArch StudentArch::make(ArchKind kind) {
    StudentArch arch;
    arch.kind = kind;
    switch (kind) {
        case ArchKind::tiny_lowres:
            arch.widths = {8, 16, 16};
            break;
        case ArchKind::tiny_fconv:
        case ArchKind::tiny_unet:
            arch.widths = {8, 16, 16, 8};
            break;
    }
    return arch;
}

StudentArch StudentArch::from_name(std::string_view name) {
    if (name == "tiny_lowres") return make(ArchKind::tiny_lowres);
    if (name == "tiny_fconv") return make(ArchKind::tiny_fconv);
    if (name == "tiny_unet") return make(ArchKind::tiny_unet);
    throw std::invalid_argument("unknown student architecture: " + std::string(name));
}

std::string StudentArch::name() const {
    switch (kind) {
        case ArchKind::tiny_lowres: return "tiny_lowres";
        case ArchKind::tiny_fconv: return "tiny_fconv";
        case ArchKind::tiny_unet: return "tiny_unet";
    }
    return "?";
}

void TrainConfig::validate() const {
    require(lr > 0.0, "learning rate must be positive");
    require(epochs >= 1, "epochs must be >= 1");
    require(batch_size >= 1, "batch size must be >= 1");
    require(crop_fraction > 0.0 && crop_fraction <= 1.0, "crop_fraction must be in (0,1]");
}

nn::Network build_network(const StudentArch& arch, nn::Rng& rng) {
    require(arch.widths.size() >= 3, "architecture needs at least three widths");
    nn::Network net;
    const auto& w = arch.widths;
    switch (arch.kind) {
        case ArchKind::tiny_lowres: {
            // 64 -> 32 -> 16 -> 8, then a dense head to a 16x16 map.
            net.conv(3, w[0], 2, rng).relu();
            net.conv(w[0], w[1], 2, rng).relu();
            net.conv(w[1], w[2], 2, rng).relu();
            net.dense(w[2] * 8 * 8, 16 * 16, rng);
            net.sigmoid();
            break;
        }
        case ArchKind::tiny_fconv: {
            net.conv(3, w[0], 2, rng).relu();    // 32
            net.conv(w[0], w[1], 2, rng).relu(); // 16
            net.conv(w[1], w[2], 1, rng).relu();
            net.upsample();                      // 32
            net.conv(w[2], w[3], 1, rng).relu();
            net.upsample();                      // 64
            net.conv(w[3], 1, 1, rng);
            net.sigmoid();
            break;
        }
        case ArchKind::tiny_unet: {
            net.conv(3, w[0], 2, rng).relu();    // layer 1 output: 32x32, skip source
            net.conv(w[0], w[1], 2, rng).relu(); // 16
            net.conv(w[1], w[2], 1, rng).relu(); // center
            net.upsample();                      // 32
            net.concat(1);                       // [up || encoder 32x32 features]
            net.conv(w[2] + w[0], w[3], 1, rng).relu();
            net.upsample();                      // 64
            net.conv(w[3], 1, 1, rng);
            net.sigmoid();
            break;
        }
    }
    return net;
}

double l2_loss(const nn::Tensor4& pred, const nn::Tensor4& target) {
    require(pred.same_shape(target), "l2_loss shapes must match");
    double total = 0.0;
    for (std::size_t i = 0; i < pred.v.size(); ++i) {
        double d = pred.v[i] - target.v[i];
        total += d * d;
    }
    return total / pred.n;
}

std::pair<Frame, SoftMask> augment(const Frame& frame, const SoftMask& mask,
                                   double crop_fraction, int input_size, int output_size,
                                   nn::Rng& rng) {
    require(crop_fraction > 0.0 && crop_fraction <= 1.0, "crop_fraction must be in (0,1]");
    require(frame.width() == mask.width() && frame.height() == mask.height(),
            "frame and mask must be aligned");
    const int w = frame.width(), h = frame.height();
    const int cw = std::max(1, static_cast<int>(std::lround(crop_fraction * w)));
    const int ch = std::max(1, static_cast<int>(std::lround(crop_fraction * h)));
    const int ox = cw < w ? rng.below(w - cw + 1) : 0;
    const int oy = ch < h ? rng.below(h - ch + 1) : 0;

    Frame fcrop(cw, ch);
    SoftMask mcrop(cw, ch);
    for (int y = 0; y < ch; ++y) {
        for (int x = 0; x < cw; ++x) {
            for (int c = 0; c < Frame::kChannels; ++c)
                fcrop.set(x, y, c, frame.at(ox + x, oy + y, c));
            mcrop.set(x, y, mask.at(ox + x, oy + y));
        }
    }
    return {resize_bilinear(fcrop, input_size, input_size),
            resize_bilinear(mcrop, output_size, output_size)};
}

namespace {

void fill_sample(nn::Tensor4& batch, int slot, const Frame& f) {
    const int s = f.width();
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < s; ++y)
            for (int x = 0; x < s; ++x) batch.at(slot, c, y, x) = f.at(x, y, c);
}

void fill_target(nn::Tensor4& batch, int slot, const SoftMask& m) {
    const int s = m.width();
    for (int y = 0; y < s; ++y)
        for (int x = 0; x < s; ++x) batch.at(slot, 0, y, x) = m.at(x, y);
}

}  // namespace

TrainResult train_student(const StudentArch& arch, const std::vector<TrainingPair>& pairs,
                          const TrainConfig& cfg) {
    cfg.validate();
    require(!pairs.empty(), "train_student needs at least one pair");

    const std::uint64_t arch_seed = cfg.seed ^ fnv1a(arch.name());
    nn::Rng init_rng(arch_seed);
    StudentNet student{arch, build_network(arch, init_rng)};
    nn::AdamState adam(student.net, cfg.lr);
    nn::Rng shuffle_rng(arch_seed ^ 0x5348554646ULL);
    nn::Rng aug_rng(arch_seed ^ 0x41554746ULL);

    const int in_s = arch.input_size(), out_s = arch.output_size();
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);

    std::vector<double> epoch_loss;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.below(static_cast<int>(i))]);

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t bsz = std::min<std::size_t>(cfg.batch_size, order.size() - start);
            nn::Tensor4 batch(static_cast<int>(bsz), 3, in_s, in_s);
            nn::Tensor4 target(static_cast<int>(bsz), 1, out_s, out_s);
            for (std::size_t b = 0; b < bsz; ++b) {
                const TrainingPair& p = pairs[order[start + b]];
                if (cfg.augment) {
                    auto [f, m] = augment(p.frame, p.mask, cfg.crop_fraction, in_s, out_s, aug_rng);
                    fill_sample(batch, static_cast<int>(b), f);
                    fill_target(target, static_cast<int>(b), m);
                } else {
                    Frame f = (p.frame.width() == in_s && p.frame.height() == in_s)
                                  ? p.frame
                                  : resize_bilinear(p.frame, in_s, in_s);
                    SoftMask m = (p.mask.width() == out_s && p.mask.height() == out_s)
                                     ? p.mask
                                     : resize_bilinear(p.mask, out_s, out_s);
                    fill_sample(batch, static_cast<int>(b), f);
                    fill_target(target, static_cast<int>(b), m);
                }
            }

            nn::ForwardCache cache;
            nn::Tensor4 out = nn::forward(student.net, batch, &cache);
            // A dense head emits (B, H*W, 1, 1); the flat layout matches the
            // (B, 1, H, W) target, so compare as a reshaped view.
            require(out.n == target.n && out.v.size() == target.v.size(),
                    "network output does not match target shape");
            nn::Tensor4 pred(target.n, target.c, target.h, target.w, out.v);

            double batch_loss = l2_loss(pred, target);
            if (!std::isfinite(batch_loss))
                throw nn::TrainingDivergedError("student loss is not finite");
            loss_sum += batch_loss * static_cast<double>(bsz);

            nn::Tensor4 grad(out.n, out.c, out.h, out.w);
            for (std::size_t i = 0; i < out.v.size(); ++i)
                grad.v[i] = 2.0 * (out.v[i] - target.v[i]) / static_cast<double>(bsz);
            nn::Gradients grads = nn::backward(student.net, cache, grad);
            nn::adam_step(adam, student.net, grads);
        }
        epoch_loss.push_back(loss_sum / static_cast<double>(pairs.size()));
    }
    return {std::move(student), std::move(epoch_loss)};
}

SoftMask predict(const StudentNet& student, const Frame& frame) {
    const int in_s = student.arch.input_size();
    Frame f = (frame.width() == in_s && frame.height() == in_s)
                  ? frame
                  : resize_bilinear(frame, in_s, in_s);
    nn::Tensor4 x(1, 3, in_s, in_s);
    fill_sample(x, 0, f);
    nn::Tensor4 out = nn::forward(student.net, x);

    int mw = out.w, mh = out.h;
    if (out.h == 1 && out.w == 1) {
        int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(out.c))));
        require(side * side == out.c, "dense head size is not a square map");
        mw = mh = side;
    }
    std::vector<double> data(out.v.begin(), out.v.end());
    for (double& v : data) v = std::clamp(v, 0.0, 1.0);
    return SoftMask(mw, mh, std::move(data));
}

}  // namespace fgd::student
