#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fgd/image.hpp"

namespace fgd::videopca {

class DegenerateMaskError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct VideoPCAConfig {
    int k = 8;                    // principal components
    int work_width = 64;
    int work_height = 64;
    double blur_sigma = 4.0;      // px, on the error image
    double error_threshold = 0.5; // fraction of the max blurred error
    double center_sigma = 0.35;   // fraction of the image diagonal
    int bins_per_channel = 8;
    bool use_grayscale = true;    // run PCA on intensity instead of color
    bool use_center_prior = true; // off = the sigma->infinity variant

    void validate() const;
};

/// Background model of one shot: mean frame plus top-k principal directions.
class PCAModel {
public:
    // Components must be mutually orthonormal within 1e-8; k may be 0.
    PCAModel(int width, int height, int channels, std::vector<double> mean,
             std::vector<std::vector<double>> components);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    int k() const { return static_cast<int>(components_.size()); }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<std::vector<double>>& components() const { return components_; }

private:
    int width_, height_, channels_;
    std::vector<double> mean_;
    std::vector<std::vector<double>> components_;
};

/// Foreground/background color histograms over quantized RGB bins.
struct ColorModel {
    std::vector<double> fg_hist;  // size bins_per_channel^3, sums to 1
    std::vector<double> bg_hist;
    int bins_per_channel = 0;
};

// Frames are brought to work resolution (and grayscale when configured) before
// fitting; components use the Gram-matrix route with a deterministic sign
// (largest-magnitude entry positive).
PCAModel fit_pca(const VideoShot& shot, const VideoPCAConfig& cfg);

// Per-pixel |frame - reconstruction|, channel-averaged, rescaled by the
// per-frame max (all-zero if the max is 0).
SoftMask reconstruction_error(const PCAModel& model, const Frame& frame);

/// Blur with cfg.blur_sigma, then threshold at cfg.error_threshold * max.
BinaryMask initial_binary_mask(const SoftMask& err, const VideoPCAConfig& cfg);

/// Laplace-smoothed histograms from pixels under / outside the initial mask.
ColorModel fit_color_models(const Frame& frame, const BinaryMask& init,
                            const VideoPCAConfig& cfg);

/// Per pixel P_fg / (P_fg + P_bg) from histogram lookups.
SoftMask classify_pixels(const Frame& frame, const ColorModel& cm);

/// Multiply by a centered Gaussian with sigma = center_sigma * diagonal.
SoftMask apply_center_prior(const SoftMask& m, double center_sigma);

struct DiscoverResult {
    std::vector<SoftMask> masks;          // one per frame, at frame resolution
    std::vector<int> fallback_frames;     // frames where the color model degenerated
};

/// Full per-shot teacher pipeline; never aborts a shot on degenerate frames.
DiscoverResult discover(const VideoShot& shot, const VideoPCAConfig& cfg);

}  // namespace fgd::videopca
