#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "sigwin/error.hpp"
#include "sigwin/evalkit.hpp"

namespace sigwin {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Distributions are hand-rolled because the standard ones are not required to
// produce the same sequence across library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

Vec2 catmull_rom(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& p3, double t) {
  const double t2 = t * t, t3 = t2 * t;
  auto blend = [&](double a, double b, double c, double d) {
    return 0.5 * (2.0 * b + (-a + c) * t + (2.0 * a - 5.0 * b + 4.0 * c - d) * t2 +
                  (-a + 3.0 * b - 3.0 * c + d) * t3);
  };
  return {blend(p0.x, p1.x, p2.x, p3.x), blend(p0.y, p1.y, p2.y, p3.y)};
}

// Densely sampled curve through the control points (endpoints duplicated).
std::vector<Vec2> sample_curve(const std::vector<Vec2>& ctrl) {
  std::vector<Vec2> pts;
  if (ctrl.size() == 1) return ctrl;
  for (std::size_t i = 0; i + 1 < ctrl.size(); ++i) {
    const Vec2& p0 = ctrl[i == 0 ? 0 : i - 1];
    const Vec2& p1 = ctrl[i];
    const Vec2& p2 = ctrl[i + 1];
    const Vec2& p3 = ctrl[std::min(i + 2, ctrl.size() - 1)];
    const double chord = std::hypot(p2.x - p1.x, p2.y - p1.y);
    const int steps = std::max(4, static_cast<int>(std::ceil(chord * 6.0)));
    for (int s = 0; s < steps; ++s) pts.push_back(catmull_rom(p0, p1, p2, p3, double(s) / steps));
  }
  pts.push_back(ctrl.back());
  return pts;
}

void stamp(std::vector<double>& ink, int width, int height, const Vec2& c, double radius) {
  const int x0 = std::max(0, static_cast<int>(std::floor(c.x - radius - 1)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(c.x + radius + 1)));
  const int y0 = std::max(0, static_cast<int>(std::floor(c.y - radius - 1)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(c.y + radius + 1)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double d = std::hypot(x - c.x, y - c.y);
      const double cover = std::clamp(radius + 0.5 - d, 0.0, 1.0);
      double& v = ink[static_cast<std::size_t>(y) * width + x];
      v = std::max(v, cover);
    }
  }
}

}  // namespace

void SynthParams::validate() const {
  if (strokes < 1) throw Error(ErrorCode::kInvalidArgument, "strokes must be >= 1");
  if (!(jitter >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "jitter must be >= 0");
  if (!(pen_radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "pen radius must be > 0");
  if (width < 16 || height < 16) throw Error(ErrorCode::kInvalidArgument, "canvas too small");
}

SynthParams writer_style(std::uint64_t writer_seed, int width, int height) {
  Rng rng(derive_seed(writer_seed, 1));
  SynthParams p;
  p.writer_seed = writer_seed;
  p.strokes = rng.integer(2, 4);
  p.slant = rng.uniform(-0.5, 0.5);
  p.curvature = rng.uniform(0.5, 1.0);
  p.pen_radius = rng.uniform(0.9, 2.2);
  p.jitter = 0.8;
  p.width = width;
  p.height = height;
  return p;
}

GrayImage synth_signature(const SynthParams& params, std::uint64_t sample_seed) {
  params.validate();
  const int w = params.width, h = params.height;
  Rng style(derive_seed(params.writer_seed, 2));
  Rng sample(derive_seed(sample_seed, 3));

  const double margin_x = 0.1 * w, margin_y = 0.2 * h;
  const double span = (w - 2.0 * margin_x) / params.strokes;
  const double amplitude = 0.3 * h * params.curvature;
  const double mid_y = 0.5 * h;
  const double shear = std::tan(params.slant);

  std::vector<double> ink(static_cast<std::size_t>(w) * h, 0.0);
  for (int s = 0; s < params.strokes; ++s) {
    const int count = style.integer(4, 8);
    const double x_begin = margin_x + s * span;
    const double baseline = mid_y + style.uniform(-0.15, 0.15) * h * std::min(1.0, params.curvature);
    const double step = 0.9 * span / (count - 1);
    std::vector<Vec2> ctrl;
    for (int i = 0; i < count; ++i) {
      // Backward steps in x let curved strokes form loops.
      const double back = params.curvature * style.uniform(-0.9, 0.3) * step;
      Vec2 p{x_begin + i * step + (i > 0 && i + 1 < count ? back : 0.0),
             baseline + amplitude * style.uniform(-1.0, 1.0)};
      p.x += sample.normal() * params.jitter;
      p.y += sample.normal() * params.jitter;
      p.x += shear * (mid_y - p.y);
      p.x = std::clamp(p.x, 0.0, w - 1.0);
      p.y = std::clamp(p.y, margin_y * 0.5, h - 1.0 - margin_y * 0.5);
      ctrl.push_back(p);
    }
    for (const Vec2& p : sample_curve(ctrl)) stamp(ink, w, h, p, params.pen_radius);
  }

  GrayImage img(w, h, 255);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double paper = 232.0 + 5.0 * sample.normal();
      const double v = paper - (paper - 28.0) * ink[static_cast<std::size_t>(y) * w + x];
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return img;
}

std::vector<std::string> write_synthetic_dataset(const fs::path& out, const SynthDatasetSpec& spec) {
  if (spec.writers < 1 || spec.samples_per_writer < 1) {
    throw Error(ErrorCode::kInvalidArgument, "writers and samples per writer must be >= 1");
  }
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw Error(ErrorCode::kIo, "cannot create output directory " + out.string());
  }
  const int digits = static_cast<int>(std::to_string(spec.writers - 1).size());
  std::vector<std::string> ids;
  for (int wi = 0; wi < spec.writers; ++wi) {
    const std::string index = std::to_string(wi);
    const std::size_t width = static_cast<std::size_t>(std::max(digits, 2));
    const std::string id = "w" + std::string(width - index.size(), '0') + index;
    ids.push_back(id);
    const SynthParams params =
        writer_style(derive_seed(spec.seed, static_cast<std::uint64_t>(wi)), spec.width, spec.height);
    const fs::path dir = out / id;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string());
    for (int k = 0; k < spec.samples_per_writer; ++k) {
      const std::uint64_t sample_seed =
          derive_seed(params.writer_seed, 1000 + static_cast<std::uint64_t>(k));
      write_png(synth_signature(params, sample_seed), dir / ("genuine_" + std::to_string(k) + ".png"));
    }
  }
  return ids;
}

}  // namespace sigwin
