#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace circret {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Row-major raster. `Pixel` is Rgb, a gray level, or a foreground flag.
template <typename Pixel>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, Pixel fill = Pixel{})
      : width_(width), height_(height),
        pixels_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  Pixel& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  const Pixel& at(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::span<Pixel> pixels() { return pixels_; }
  std::span<const Pixel> pixels() const { return pixels_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Pixel> pixels_;
};

using RgbImage = Raster<Rgb>;
using GrayImage = Raster<std::uint8_t>;

enum class Polarity {
  kLightBackground,  // ink is dark
  kDarkBackground,   // ink is bright
};

enum class ThresholdMethod { kOtsu, kTriangle };

struct BinaryImage {
  Raster<std::uint8_t> mask;  // 1 = ink (foreground)
  Polarity polarity = Polarity::kLightBackground;
  ThresholdMethod method = ThresholdMethod::kOtsu;
  int threshold = 0;

  int width() const { return mask.width(); }
  int height() const { return mask.height(); }
  bool ink(int x, int y) const { return mask.at(x, y) != 0; }
  std::size_t ink_count() const;
};

// 8-bit gray, gray+alpha, RGB, RGBA, and palette PNGs; alpha is dropped.
RgbImage read_png(const std::filesystem::path& path);
RgbImage decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const RgbImage& img);
void write_png(const std::filesystem::path& path, const RgbImage& img);

}  // namespace circret
