#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace sigwin {

struct Point {
  int x = 0;
  int y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// 8-bit grayscale raster, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 255);
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

  const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Foreground/background raster; `true` is ink. Reads outside the frame
/// return background.
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool get(int x, int y) const noexcept {
    return contains(x, y) && bits_[index(x, y)] != 0;
  }
  void set(int x, int y, bool value) { bits_[index(x, y)] = value ? 1 : 0; }

  std::size_t foreground_count() const noexcept;
  bool any() const noexcept;

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct BoundingBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Component {
  int label = 0;
  std::vector<Point> pixels;
  BoundingBox bounding_box;
};

/// Otsu's global threshold over the 256-bin histogram. Pixels with
/// intensity <= t form the first class; ties go to the smallest t.
std::uint8_t otsu_threshold(const GrayImage& img);

/// Foreground wherever intensity <= t (dark ink on light paper).
BinaryImage binarize(const GrayImage& img, std::uint8_t t);

/// Maximal 8-connected components, labeled 1.. in row-major order of their
/// first pixel. Pixels inside a component are listed in BFS order.
std::vector<Component> connected_components(const BinaryImage& img);

/// Erases every 8-connected component with fewer than `min_size` pixels.
BinaryImage remove_specks(const BinaryImage& img, std::size_t min_size);

/// Otsu binarization followed by speck removal.
BinaryImage preprocess(const GrayImage& img, std::size_t speck_min_size);

// I/O. Readers accept binary PGM (P5, 8-bit) and PNG; color and alpha PNGs
// are reduced to luma (0.299 R + 0.587 G + 0.114 B).
GrayImage read_image(const std::filesystem::path& path);
GrayImage read_pgm(const std::filesystem::path& path);
GrayImage read_png(const std::filesystem::path& path);

void write_pgm(const GrayImage& img, const std::filesystem::path& path);
/// P4 bitmap; ink is written as black.
void write_pbm(const BinaryImage& img, const std::filesystem::path& path);
void write_png(const GrayImage& img, const std::filesystem::path& path);

/// Ink rendered black on white.
GrayImage to_gray(const BinaryImage& img);

}  // namespace sigwin
