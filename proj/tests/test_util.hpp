#pragma once

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <string>

#include "fgd/nn.hpp"

namespace fgd_test {

/// Fresh empty directory under the system temp dir, unique per call.
inline std::filesystem::path make_temp_dir(const std::string& tag) {
    static std::uint64_t counter = 0;
    auto dir = std::filesystem::temp_directory_path() /
               ("fgd_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) : path(make_temp_dir(tag)) {}
    ~TempDir() { std::filesystem::remove_all(path); }
    operator const std::filesystem::path&() const { return path; }
};

inline fgd::nn::Rng test_rng(std::uint64_t seed) { return fgd::nn::Rng(seed); }

}  // namespace fgd_test
