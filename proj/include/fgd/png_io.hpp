#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fgd/image.hpp"

namespace fgd {

class PngError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// 8-bit encoding: byte b maps to b/255 on read, round-half-up on write.
Frame read_frame_png(const std::filesystem::path& path);
SoftMask read_mask_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Frame& img);
void write_png(const std::filesystem::path& path, const SoftMask& mask);

/// Lexicographically sorted *.png paths in a directory.
std::vector<std::filesystem::path> list_pngs(const std::filesystem::path& dir);

/// A shot is a directory of lexicographically ordered PNG frames; id = directory name.
VideoShot load_shot(const std::filesystem::path& dir);

}  // namespace fgd
