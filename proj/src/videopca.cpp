#include "fgd/videopca.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace fgd::videopca {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

constexpr double kOrthoTol = 1e-8;

// Work-resolution feature vector of one frame: grayscale intensities or
// interleaved RGB, depending on the model.
std::vector<double> frame_vector(const Frame& f, int w, int h, bool grayscale) {
    Frame r = (f.width() == w && f.height() == h) ? f : resize_bilinear(f, w, h);
    if (grayscale) return to_grayscale(r).data();
    return r.data();
}

Frame work_frame(const Frame& f, const VideoPCAConfig& cfg) {
    if (f.width() == cfg.work_width && f.height() == cfg.work_height) return f;
    return resize_bilinear(f, cfg.work_width, cfg.work_height);
}

}  // namespace

void VideoPCAConfig::validate() const {
    require(k >= 1, "k must be >= 1");
    require(work_width > 0 && work_height > 0, "work resolution must be positive");
    require(blur_sigma > 0.0, "blur_sigma must be positive");
    require(error_threshold > 0.0 && error_threshold < 1.0,
            "error_threshold must be in (0,1)");
    require(center_sigma > 0.0, "center_sigma must be positive");
    require(bins_per_channel >= 1, "bins_per_channel must be >= 1");
}

PCAModel::PCAModel(int width, int height, int channels, std::vector<double> mean,
                   std::vector<std::vector<double>> components)
    : width_(width), height_(height), channels_(channels),
      mean_(std::move(mean)), components_(std::move(components)) {
    require(width > 0 && height > 0, "model dims must be positive");
    require(channels == 1 || channels == 3, "model channels must be 1 or 3");
    const std::size_t d = static_cast<std::size_t>(width) * height * channels;
    require(mean_.size() == d, "mean length must match frame dims");
    for (std::size_t i = 0; i < components_.size(); ++i) {
        require(components_[i].size() == d, "component length must match frame dims");
        for (std::size_t j = 0; j <= i; ++j) {
            double dot = 0.0;
            for (std::size_t p = 0; p < d; ++p) dot += components_[i][p] * components_[j][p];
            double want = i == j ? 1.0 : 0.0;
            require(std::fabs(dot - want) <= kOrthoTol, "components must be orthonormal");
        }
    }
}

PCAModel fit_pca(const VideoShot& shot, const VideoPCAConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(shot.size());
    require(cfg.k <= n, "k must not exceed the number of frames");

    const int w = cfg.work_width, h = cfg.work_height;
    const int channels = cfg.use_grayscale ? 1 : 3;
    const std::size_t d = static_cast<std::size_t>(w) * h * channels;

    std::vector<std::vector<double>> rows;
    rows.reserve(n);
    for (const Frame& f : shot.frames()) rows.push_back(frame_vector(f, w, h, cfg.use_grayscale));

    std::vector<double> mean(d, 0.0);
    for (const auto& r : rows)
        for (std::size_t p = 0; p < d; ++p) mean[p] += r[p];
    for (double& m : mean) m /= n;

    // Centered data X is n x d with n << d, so eigendecompose the n x n Gram
    // matrix and map its eigenvectors back through X^T.
    Eigen::MatrixXd X(n, static_cast<Eigen::Index>(d));
    for (int i = 0; i < n; ++i)
        for (std::size_t p = 0; p < d; ++p) X(i, static_cast<Eigen::Index>(p)) = rows[i][p] - mean[p];
    Eigen::MatrixXd gram = X * X.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);

    std::vector<std::vector<double>> comps;
    comps.reserve(cfg.k);
    for (int j = 0; j < cfg.k; ++j) {
        // Eigen sorts eigenvalues ascending; walk from the top.
        Eigen::VectorXd u = X.transpose() * solver.eigenvectors().col(n - 1 - j);
        double norm = u.norm();
        std::vector<double> comp(d, 0.0);
        if (norm > 1e-10) {
            for (std::size_t p = 0; p < d; ++p) comp[p] = u(static_cast<Eigen::Index>(p)) / norm;
        } else {
            // Zero-variance direction (e.g. identical frames): fill with an
            // arbitrary unit vector orthogonal to the ones already picked.
            for (std::size_t basis = 0; basis < d; ++basis) {
                std::fill(comp.begin(), comp.end(), 0.0);
                comp[basis] = 1.0;
                for (const auto& prev : comps) {
                    double dot = 0.0;
                    for (std::size_t p = 0; p < d; ++p) dot += comp[p] * prev[p];
                    for (std::size_t p = 0; p < d; ++p) comp[p] -= dot * prev[p];
                }
                double rnorm = 0.0;
                for (double v : comp) rnorm += v * v;
                rnorm = std::sqrt(rnorm);
                if (rnorm > 0.5) {
                    for (double& v : comp) v /= rnorm;
                    break;
                }
            }
        }
        // Deterministic sign: the largest-magnitude entry comes out positive.
        std::size_t arg = 0;
        for (std::size_t p = 1; p < d; ++p)
            if (std::fabs(comp[p]) > std::fabs(comp[arg])) arg = p;
        if (comp[arg] < 0.0)
            for (double& v : comp) v = -v;
        comps.push_back(std::move(comp));
    }
    return PCAModel(w, h, channels, std::move(mean), std::move(comps));
}

SoftMask reconstruction_error(const PCAModel& model, const Frame& frame) {
    const int w = model.width(), h = model.height(), ch = model.channels();
    const std::size_t d = static_cast<std::size_t>(w) * h * ch;
    require(model.mean().size() == d, "model dims inconsistent with mean length");

    std::vector<double> x = frame_vector(frame, w, h, ch == 1);
    std::vector<double> recon = model.mean();
    for (const auto& comp : model.components()) {
        double coeff = 0.0;
        for (std::size_t p = 0; p < d; ++p) coeff += (x[p] - model.mean()[p]) * comp[p];
        for (std::size_t p = 0; p < d; ++p) recon[p] += coeff * comp[p];
    }

    std::vector<double> err(static_cast<std::size_t>(w) * h, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int xx = 0; xx < w; ++xx) {
            std::size_t pix = static_cast<std::size_t>(y) * w + xx;
            double e = 0.0;
            for (int c = 0; c < ch; ++c) e += std::fabs(x[pix * ch + c] - recon[pix * ch + c]);
            err[pix] = e / ch;
        }
    }
    double max_err = *std::max_element(err.begin(), err.end());
    if (max_err <= 1e-12) return SoftMask(w, h);
    for (double& e : err) e = std::min(1.0, e / max_err);
    return SoftMask(w, h, std::move(err));
}

BinaryMask initial_binary_mask(const SoftMask& err, const VideoPCAConfig& cfg) {
    SoftMask blurred = gaussian_blur(err, cfg.blur_sigma);
    double max_v = *std::max_element(blurred.data().begin(), blurred.data().end());
    BinaryMask out(err.width(), err.height());
    if (max_v <= 0.0) return out;  // nothing stands out
    double t = cfg.error_threshold * max_v;
    for (int y = 0; y < err.height(); ++y)
        for (int x = 0; x < err.width(); ++x) out.set(x, y, blurred.at(x, y) >= t);
    return out;
}

namespace {

int color_bin(const Frame& f, int x, int y, int bins) {
    int idx = 0;
    for (int c = 0; c < 3; ++c) {
        int b = std::min(static_cast<int>(f.at(x, y, c) * bins), bins - 1);
        idx = idx * bins + b;
    }
    return idx;
}

}  // namespace

ColorModel fit_color_models(const Frame& frame, const BinaryMask& init,
                            const VideoPCAConfig& cfg) {
    require(frame.width() == init.width() && frame.height() == init.height(),
            "frame and mask dims must match");
    int n_true = init.count_true();
    int total = init.width() * init.height();
    if (n_true == 0 || n_true == total)
        throw DegenerateMaskError("initial mask has no foreground/background split");

    const int bins = cfg.bins_per_channel;
    ColorModel cm;
    cm.bins_per_channel = bins;
    cm.fg_hist.assign(static_cast<std::size_t>(bins) * bins * bins, 1.0);  // Laplace +1
    cm.bg_hist.assign(cm.fg_hist.size(), 1.0);
    for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < frame.width(); ++x) {
            int b = color_bin(frame, x, y, bins);
            (init.at(x, y) ? cm.fg_hist[b] : cm.bg_hist[b]) += 1.0;
        }
    }
    double fg_sum = n_true + static_cast<double>(cm.fg_hist.size());
    double bg_sum = (total - n_true) + static_cast<double>(cm.bg_hist.size());
    for (double& v : cm.fg_hist) v /= fg_sum;
    for (double& v : cm.bg_hist) v /= bg_sum;
    return cm;
}

SoftMask classify_pixels(const Frame& frame, const ColorModel& cm) {
    require(cm.bins_per_channel >= 1, "color model is empty");
    SoftMask out(frame.width(), frame.height());
    for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < frame.width(); ++x) {
            int b = color_bin(frame, x, y, cm.bins_per_channel);
            double fg = cm.fg_hist[b], bg = cm.bg_hist[b];
            out.set(x, y, fg / (fg + bg));
        }
    }
    return out;
}

SoftMask apply_center_prior(const SoftMask& m, double center_sigma) {
    require(center_sigma > 0.0, "center_sigma must be positive");
    const int w = m.width(), h = m.height();
    const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
    const double diagonal = std::sqrt(static_cast<double>(w - 1) * (w - 1) +
                                      static_cast<double>(h - 1) * (h - 1));
    const double sigma = center_sigma * std::max(diagonal, 1.0);
    SoftMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            out.set(x, y, m.at(x, y) * std::exp(-d2 / (2.0 * sigma * sigma)));
        }
    }
    return out;
}

DiscoverResult discover(const VideoShot& shot, const VideoPCAConfig& cfg) {
    cfg.validate();
    PCAModel model = fit_pca(shot, cfg);

    DiscoverResult result;
    result.masks.reserve(shot.size());
    for (std::size_t i = 0; i < shot.size(); ++i) {
        const Frame& frame = shot.frames()[i];
        Frame work = work_frame(frame, cfg);
        SoftMask err = reconstruction_error(model, frame);
        BinaryMask init = initial_binary_mask(err, cfg);

        SoftMask classified(cfg.work_width, cfg.work_height);
        try {
            ColorModel cm = fit_color_models(work, init, cfg);
            classified = classify_pixels(work, cm);
        } catch (const DegenerateMaskError&) {
            classified = gaussian_blur(err, cfg.blur_sigma);
            result.fallback_frames.push_back(static_cast<int>(i));
        }
        SoftMask final_mask =
            cfg.use_center_prior ? apply_center_prior(classified, cfg.center_sigma) : classified;
        result.masks.push_back(resize_bilinear(final_mask, frame.width(), frame.height()));
    }
    return result;
}

}  // namespace fgd::videopca
