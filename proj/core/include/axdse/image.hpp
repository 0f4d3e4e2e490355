#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "axdse/error.hpp"

namespace axdse {

// 8-bit grayscale image, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

// Portable graymap I/O; reads both ASCII (P2) and binary (P5) variants,
// writes P5 by default.
Image load_pgm(const std::filesystem::path& path);
void save_pgm(const Image& img, const std::filesystem::path& path,
              bool binary = true);

// Seeded smoothed-noise image, so tests and the CLI need no external data.
Image synthetic_image(int width, int height, std::uint64_t seed);

// Structural similarity over 8x8 sliding windows (stride 1), uniform
// weighting, L = 255, C1 = (0.01 L)^2, C2 = (0.03 L)^2; mean over windows.
double ssim(const Image& a, const Image& b);

}  // namespace axdse
