#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fgd {

/// One RGB image, interleaved row-major, every value in [0,1].
class Frame {
public:
    static constexpr int kChannels = 3;

    Frame(int width, int height);
    Frame(int width, int height, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }

    double at(int x, int y, int c) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
    }
    void set(int x, int y, int c, double v);

    const std::vector<double>& data() const { return data_; }

private:
    int width_;
    int height_;
    std::vector<double> data_;
};

/// Per-pixel foreground confidence in [0,1], row-major.
class SoftMask {
public:
    SoftMask(int width, int height);
    SoftMask(int width, int height, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }

    double at(int x, int y) const {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }
    void set(int x, int y, double v);

    const std::vector<double>& data() const { return data_; }

private:
    int width_;
    int height_;
    std::vector<double> data_;
};

class BinaryMask {
public:
    BinaryMask(int width, int height);
    BinaryMask(int width, int height, std::vector<std::uint8_t> data);

    int width() const { return width_; }
    int height() const { return height_; }

    bool at(int x, int y) const {
        return data_[static_cast<std::size_t>(y) * width_ + x] != 0;
    }
    void set(int x, int y, bool v) {
        data_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
    }

    int count_true() const;
    const std::vector<std::uint8_t>& data() const { return data_; }

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
};

/// Axis-aligned box with inclusive pixel corners, origin top-left.
struct BoundingBox {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    BoundingBox() = default;
    BoundingBox(int x0, int y0, int x1, int y1);

    long long area() const {
        return static_cast<long long>(x_max - x_min + 1) * (y_max - y_min + 1);
    }
    bool operator==(const BoundingBox&) const = default;
};

/// An ordered run of same-sized frames from one video shot.
class VideoShot {
public:
    VideoShot(std::string id, std::vector<Frame> frames);

    const std::string& id() const { return id_; }
    const std::vector<Frame>& frames() const { return frames_; }
    std::size_t size() const { return frames_.size(); }

private:
    std::string id_;
    std::vector<Frame> frames_;
};

/// A soft mask with its quality score and provenance.
struct ScoredMask {
    SoftMask mask;
    double score = 0.0;
    std::string source;
    std::string frame_id;

    ScoredMask(SoftMask m, double s, std::string src, std::string fid);
};

// Align-corners bilinear sampling; resize to the same size is an exact identity.
Frame resize_bilinear(const Frame& img, int w, int h);
SoftMask resize_bilinear(const SoftMask& m, int w, int h);

/// Luminance 0.299 R + 0.587 G + 0.114 B.
SoftMask to_grayscale(const Frame& f);

/// Separable Gaussian, radius = ceil(3 sigma), replicated borders.
SoftMask gaussian_blur(const SoftMask& m, double sigma);

}  // namespace fgd
