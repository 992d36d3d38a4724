#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "rh/image.hpp"
#include "rh/rng.hpp"

namespace testutil {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("rh_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline rh::RasterImage random_image(int w, int h, std::uint64_t seed) {
  rh::SeededRng rng(seed);
  rh::RasterImage img(w, h);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return img;
}

inline rh::Hash120 random_hash(rh::SeededRng& rng) { return {rng.next(), rng.next()}; }

}  // namespace testutil
