#include "sigwin/image.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <numeric>

#include "sigwin/error.hpp"

namespace sigwin {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyImage: return "EmptyImage";
    case ErrorCode::kEmptyFragment: return "EmptyFragment";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kNoFragments: return "NoFragments";
    case ErrorCode::kEmptyRegistry: return "EmptyRegistry";
    case ErrorCode::kUnknownWriter: return "UnknownWriter";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kEmptyScores: return "EmptyScores";
    case ErrorCode::kLayout: return "LayoutError";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
  }
  return "Unknown";
}

namespace {

void check_dimensions(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must be positive");
  }
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dimensions(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dimensions(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::kInvalidArgument, "pixel buffer does not match width x height");
  }
}

BinaryImage::BinaryImage(int width, int height) : width_(width), height_(height) {
  check_dimensions(width, height);
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

std::size_t BinaryImage::foreground_count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool BinaryImage::any() const noexcept {
  return std::find(bits_.begin(), bits_.end(), std::uint8_t{1}) != bits_.end();
}

std::uint8_t otsu_threshold(const GrayImage& img) {
  std::array<double, 256> hist{};
  for (std::uint8_t v : img.pixels()) hist[v] += 1.0;

  const double total = static_cast<double>(img.pixels().size());
  double total_sum = 0.0;
  for (int v = 0; v < 256; ++v) total_sum += v * hist[v];

  // sigma_b^2(t) = (mu_T w0 - mu0_sum)^2 / (w0 w1), with class 0 = [0, t].
  double best = -1.0;
  int best_t = 0;
  double w0 = 0.0;
  double sum0 = 0.0;
  for (int t = 0; t < 256; ++t) {
    w0 += hist[t];
    sum0 += t * hist[t];
    const double w1 = total - w0;
    double between = 0.0;
    if (w0 > 0.0 && w1 > 0.0) {
      const double diff = total_sum * w0 - sum0 * total;
      between = diff * diff / (w0 * w1 * total * total);
    }
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return static_cast<std::uint8_t>(best_t);
}

BinaryImage binarize(const GrayImage& img, std::uint8_t t) {
  BinaryImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.at(x, y) <= t) out.set(x, y, true);
    }
  }
  return out;
}

std::vector<Component> connected_components(const BinaryImage& img) {
  std::vector<Component> components;
  if (img.width() == 0) return components;

  std::vector<int> labels(static_cast<std::size_t>(img.width()) * img.height(), 0);
  auto label_at = [&](int x, int y) -> int& {
    return labels[static_cast<std::size_t>(y) * img.width() + x];
  };

  std::deque<Point> queue;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!img.get(x, y) || label_at(x, y) != 0) continue;

      Component comp;
      comp.label = static_cast<int>(components.size()) + 1;
      comp.bounding_box = {x, y, x, y};
      label_at(x, y) = comp.label;
      queue.push_back({x, y});
      while (!queue.empty()) {
        const Point p = queue.front();
        queue.pop_front();
        comp.pixels.push_back(p);
        auto& bb = comp.bounding_box;
        bb.x_min = std::min(bb.x_min, p.x);
        bb.y_min = std::min(bb.y_min, p.y);
        bb.x_max = std::max(bb.x_max, p.x);
        bb.y_max = std::max(bb.y_max, p.y);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx;
            const int ny = p.y + dy;
            if (img.get(nx, ny) && label_at(nx, ny) == 0) {
              label_at(nx, ny) = comp.label;
              queue.push_back({nx, ny});
            }
          }
        }
      }
      components.push_back(std::move(comp));
    }
  }
  return components;
}

BinaryImage remove_specks(const BinaryImage& img, std::size_t min_size) {
  if (min_size == 0) return img;
  BinaryImage out = img;
  for (const auto& comp : connected_components(img)) {
    if (comp.pixels.size() >= min_size) continue;
    for (const Point& p : comp.pixels) out.set(p.x, p.y, false);
  }
  return out;
}

BinaryImage preprocess(const GrayImage& img, std::size_t speck_min_size) {
  return remove_specks(binarize(img, otsu_threshold(img)), speck_min_size);
}

GrayImage to_gray(const BinaryImage& img) {
  GrayImage out(img.width(), img.height(), 255);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.get(x, y)) out.at(x, y) = 0;
    }
  }
  return out;
}

}  // namespace sigwin
