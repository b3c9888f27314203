#include "fgd/image.hpp"

#include <algorithm>
#include <cmath>

namespace fgd {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void check_dims(int w, int h) {
    require(w > 0 && h > 0, "image dimensions must be positive");
}

void check_unit_range(const std::vector<double>& data, const char* what) {
    for (double v : data) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument(std::string(what) + " value outside [0,1]");
    }
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Align-corners source coordinate for output index i.
double src_coord(int i, int in_size, int out_size) {
    if (out_size == 1) return 0.0;
    return static_cast<double>(i) * (in_size - 1) / (out_size - 1);
}

}  // namespace

Frame::Frame(int width, int height) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height * kChannels, 0.0);
}

Frame::Frame(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    require(data_.size() == static_cast<std::size_t>(width) * height * kChannels,
            "frame data length must be width*height*3");
    check_unit_range(data_, "frame");
}

void Frame::set(int x, int y, int c, double v) {
    require(v >= 0.0 && v <= 1.0, "frame value outside [0,1]");
    data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c] = v;
}

SoftMask::SoftMask(int width, int height) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, 0.0);
}

SoftMask::SoftMask(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    require(data_.size() == static_cast<std::size_t>(width) * height,
            "mask data length must be width*height");
    check_unit_range(data_, "mask");
}

void SoftMask::set(int x, int y, double v) {
    require(v >= 0.0 && v <= 1.0, "mask value outside [0,1]");
    data_[static_cast<std::size_t>(y) * width_ + x] = v;
}

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    require(data_.size() == static_cast<std::size_t>(width) * height,
            "mask data length must be width*height");
    for (auto& v : data_) v = v ? 1 : 0;
}

int BinaryMask::count_true() const {
    int n = 0;
    for (auto v : data_) n += v != 0;
    return n;
}

BoundingBox::BoundingBox(int x0, int y0, int x1, int y1)
    : x_min(x0), y_min(y0), x_max(x1), y_max(y1) {
    require(x_min <= x_max && y_min <= y_max, "box corners must be ordered");
}

VideoShot::VideoShot(std::string id, std::vector<Frame> frames)
    : id_(std::move(id)), frames_(std::move(frames)) {
    require(frames_.size() >= 2, "a shot needs at least 2 frames");
    for (const Frame& f : frames_) {
        require(f.width() == frames_[0].width() && f.height() == frames_[0].height(),
                "all frames in a shot must share dimensions");
    }
}

ScoredMask::ScoredMask(SoftMask m, double s, std::string src, std::string fid)
    : mask(std::move(m)), score(s), source(std::move(src)), frame_id(std::move(fid)) {
    require(std::isfinite(score), "mask score must be finite");
}

namespace {

template <typename Sample>
void resample_grid(int in_w, int in_h, int out_w, int out_h, Sample&& sample) {
    for (int oy = 0; oy < out_h; ++oy) {
        double sy = src_coord(oy, in_h, out_h);
        int y0 = static_cast<int>(sy);
        int y1 = std::min(y0 + 1, in_h - 1);
        double fy = sy - y0;
        for (int ox = 0; ox < out_w; ++ox) {
            double sx = src_coord(ox, in_w, out_w);
            int x0 = static_cast<int>(sx);
            int x1 = std::min(x0 + 1, in_w - 1);
            double fx = sx - x0;
            sample(ox, oy, x0, y0, x1, y1, fx, fy);
        }
    }
}

}  // namespace

Frame resize_bilinear(const Frame& img, int w, int h) {
    check_dims(w, h);
    Frame out(w, h);
    resample_grid(img.width(), img.height(), w, h,
                  [&](int ox, int oy, int x0, int y0, int x1, int y1, double fx, double fy) {
                      for (int c = 0; c < Frame::kChannels; ++c) {
                          double top = (1 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
                          double bot = (1 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
                          out.set(ox, oy, c, clamp01((1 - fy) * top + fy * bot));
                      }
                  });
    return out;
}

SoftMask resize_bilinear(const SoftMask& m, int w, int h) {
    check_dims(w, h);
    SoftMask out(w, h);
    resample_grid(m.width(), m.height(), w, h,
                  [&](int ox, int oy, int x0, int y0, int x1, int y1, double fx, double fy) {
                      double top = (1 - fx) * m.at(x0, y0) + fx * m.at(x1, y0);
                      double bot = (1 - fx) * m.at(x0, y1) + fx * m.at(x1, y1);
                      out.set(ox, oy, clamp01((1 - fy) * top + fy * bot));
                  });
    return out;
}

SoftMask to_grayscale(const Frame& f) {
    SoftMask out(f.width(), f.height());
    for (int y = 0; y < f.height(); ++y)
        for (int x = 0; x < f.width(); ++x)
            out.set(x, y, clamp01(0.299 * f.at(x, y, 0) + 0.587 * f.at(x, y, 1) +
                                  0.114 * f.at(x, y, 2)));
    return out;
}

SoftMask gaussian_blur(const SoftMask& m, double sigma) {
    require(sigma > 0.0, "blur sigma must be positive");
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    int w = m.width(), h = m.height();
    std::vector<double> tmp(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                int xx = std::clamp(x + i, 0, w - 1);
                acc += kernel[i + radius] * m.at(xx, y);
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    SoftMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                int yy = std::clamp(y + i, 0, h - 1);
                acc += kernel[i + radius] * tmp[static_cast<std::size_t>(yy) * w + x];
            }
            out.set(x, y, clamp01(acc));
        }
    }
    return out;
}

}  // namespace fgd
