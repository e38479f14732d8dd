#include "sigwin/windowing.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <tuple>

#include "sigwin/error.hpp"

namespace sigwin {

void WindowSpec::validate() const {
  if (n < 3 || n % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "window size must be odd and >= 3");
  }
  if (!(overlap_max >= 0.0 && overlap_max <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "overlap_max must lie in [0, 1]");
  }
  if (max_slide && *max_slide < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_slide must be non-negative");
  }
}

long overlap_area(const Window& a, const Window& b) {
  const long w = std::min(a.x_max(), b.x_max()) - std::max(a.origin.x, b.origin.x) + 1;
  const long h = std::min(a.y_max(), b.y_max()) - std::max(a.origin.y, b.origin.y) + 1;
  return (w > 0 && h > 0) ? w * h : 0;
}

std::size_t Fragment::foreground_count() const noexcept {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

Point find_start(const BinaryImage& img) {
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.get(x, y)) return {x, y};
    }
  }
  throw Error(ErrorCode::kEmptyImage, "image has no foreground pixels");
}

ExitFlags exit_flags(const Skeleton& skel, const Window& w, const BinaryImage* visited) {
  const BinaryImage& s = skel.image;
  auto outside_live = [&](int x, int y) {
    return s.get(x, y) && !(visited && visited->get(x, y));
  };

  ExitFlags flags;
  const int x0 = w.origin.x, y0 = w.origin.y;
  const int x1 = w.x_max(), y1 = w.y_max();
  for (int i = 0; i < w.n; ++i) {
    const int y = y0 + i;
    if (s.get(x1, y)) {
      for (int dy = -1; dy <= 1; ++dy) flags.east = flags.east || outside_live(x1 + 1, y + dy);
    }
    if (s.get(x0, y)) {
      for (int dy = -1; dy <= 1; ++dy) flags.west = flags.west || outside_live(x0 - 1, y + dy);
    }
    const int x = x0 + i;
    if (s.get(x, y0)) {
      for (int dx = -1; dx <= 1; ++dx) flags.north = flags.north || outside_live(x + dx, y0 - 1);
    }
    if (s.get(x, y1)) {
      for (int dx = -1; dx <= 1; ++dx) flags.south = flags.south || outside_live(x + dx, y1 + 1);
    }
  }
  return flags;
}

std::size_t coverage(const Skeleton& skel, const Window& w, const BinaryImage& visited) {
  const BinaryImage& s = skel.image;
  const int x_begin = std::max(w.origin.x, 0), x_end = std::min(w.x_max(), s.width() - 1);
  const int y_begin = std::max(w.origin.y, 0), y_end = std::min(w.y_max(), s.height() - 1);
  std::size_t count = 0;
  for (int y = y_begin; y <= y_end; ++y) {
    for (int x = x_begin; x <= x_end; ++x) {
      if (s.get(x, y) && !visited.get(x, y)) ++count;
    }
  }
  return count;
}

namespace {

Window shifted(const Window& w, SlideAxis axis, int d) {
  Window out = w;
  if (axis == SlideAxis::kVertical) {
    out.origin.y += d;
  } else {
    out.origin.x += d;
  }
  return out;
}

// Best slide among offsets passing `admissible`; nullopt if none qualifies.
template <typename Admissible>
std::optional<Window> best_slide(const Skeleton& skel, const Window& candidate, SlideAxis axis,
                                 const BinaryImage& visited, int max_slide,
                                 Admissible&& admissible) {
  std::optional<Window> best;
  std::size_t best_cover = 0;
  // Visiting 0, -1, +1, -2, +2, ... and keeping strict improvements gives
  // the smallest-|d|, negative-first tie-break.
  for (int step = 0; step <= 2 * max_slide; ++step) {
    const int d = (step % 2 == 1) ? -(step + 1) / 2 : step / 2;
    const Window w = shifted(candidate, axis, d);
    if (!admissible(w)) continue;
    const std::size_t cover = coverage(skel, w, visited);
    if (!best || cover > best_cover) {
      best = w;
      best_cover = cover;
    }
  }
  return best;
}

// Windows sit on a lattice of n-wide column strips anchored at the seed
// window. Each strip is covered top to bottom: a window is centered on the
// topmost uncovered skeleton pixel, then slid vertically to the admissible
// offset with the most unvisited coverage that still contains that pixel.
class Placer {
 public:
  Placer(const Skeleton& skel, const WindowSpec& spec)
      : skel_(skel),
        spec_(spec),
        visited_(skel.image.width(), skel.image.height()),
        overlap_budget_(spec.overlap_max * spec.n * spec.n) {}

  std::vector<Window> run() {
    const int n = spec_.n;
    const int anchor = seed_at(find_start(skel_.image)).origin.x;
    const auto floor_div = [](int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
    const int k_first = floor_div(-anchor, n);
    const int k_last = floor_div(skel_.image.width() - 1 - anchor, n);
    for (int k = k_first; k <= k_last; ++k) cover_strip(anchor + k * n);
    return std::move(accepted_);
  }

 private:
  long max_overlap(const Window& w) const {
    long worst = 0;
    for (const Window& a : accepted_) worst = std::max(worst, overlap_area(w, a));
    return worst;
  }
  bool admissible(const Window& w) const {
    return static_cast<double>(max_overlap(w)) <= overlap_budget_;
  }

  // Placement containing `p` with the most coverage, nearest the centered one.
  Window seed_at(Point p) const {
    const int half = spec_.n / 2;
    using Key = std::tuple<long, int, int, int>;
    std::optional<Key> best_key;
    Window best{};
    for (int dy = -half; dy <= half; ++dy) {
      for (int dx = -half; dx <= half; ++dx) {
        const Window w{{p.x - half + dx, p.y - half + dy}, spec_.n};
        const long cover = static_cast<long>(coverage(skel_, w, visited_));
        const Key key{-cover, std::abs(dx) + std::abs(dy), dy, dx};
        if (!best_key || key < *best_key) {
          best_key = key;
          best = w;
        }
      }
    }
    return best;
  }

  std::optional<int> topmost_uncovered(int x0, int y_from) const {
    const BinaryImage& s = skel_.image;
    const int x_begin = std::max(x0, 0), x_end = std::min(x0 + spec_.n - 1, s.width() - 1);
    for (int y = std::max(y_from, 0); y < s.height(); ++y) {
      for (int x = x_begin; x <= x_end; ++x) {
        if (s.get(x, y) && !visited_.get(x, y)) return y;
      }
    }
    return std::nullopt;
  }

  void cover_strip(int x0) {
    const int n = spec_.n;
    int y_from = std::numeric_limits<int>::min() / 2;
    std::optional<int> prev_bottom;
    while (auto top = topmost_uncovered(x0, y_from)) {
      const Window candidate{{x0, *top - n / 2}, n};
      auto w = best_slide(skel_, candidate, SlideAxis::kVertical, visited_, spec_.slide_limit(),
                          [&](const Window& c) {
                            return c.origin.y <= *top && *top <= c.y_max() && admissible(c);
                          });
      // Abutting the previous window always contains `top` without overlap.
      if (!w) w = Window{{x0, *prev_bottom + 1}, n};
      accept(*w);
      prev_bottom = w->y_max();
      y_from = *top + 1;
    }
  }

  void accept(const Window& w) {
    const BinaryImage& s = skel_.image;
    for (int y = std::max(w.origin.y, 0); y <= std::min(w.y_max(), s.height() - 1); ++y) {
      for (int x = std::max(w.origin.x, 0); x <= std::min(w.x_max(), s.width() - 1); ++x) {
        if (s.get(x, y)) visited_.set(x, y, true);
      }
    }
    accepted_.push_back(w);
  }

  const Skeleton& skel_;
  const WindowSpec& spec_;
  BinaryImage visited_;
  double overlap_budget_;
  std::vector<Window> accepted_;
};

}  // namespace

Window slide_adjust(const Skeleton& skel, const Window& candidate, SlideAxis axis,
                    const BinaryImage& visited, int max_slide) {
  return *best_slide(skel, candidate, axis, visited, std::max(max_slide, 0),
                     [](const Window&) { return true; });
}

std::vector<Window> place_windows(const BinaryImage& component, const Skeleton& skel,
                                  const WindowSpec& spec) {
  spec.validate();
  if (component.width() != skel.image.width() || component.height() != skel.image.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "component and skeleton sizes differ");
  }
  if (!skel.image.any()) throw Error(ErrorCode::kEmptyImage, "skeleton is empty");
  return Placer(skel, spec).run();
}

Fragment extract_fragment(const BinaryImage& component, const Window& w) {
  Fragment f(w.n);
  f.origin_window = w;
  for (int r = 0; r < w.n; ++r) {
    for (int c = 0; c < w.n; ++c) {
      if (component.get(w.origin.x + c, w.origin.y + r)) f.set(r, c, true);
    }
  }
  return f;
}

Fragment adjust_fragment(const Fragment& f) {
  int min_row = f.n, min_col = f.n;
  for (int r = 0; r < f.n; ++r) {
    for (int c = 0; c < f.n; ++c) {
      if (!f.get(r, c)) continue;
      min_row = std::min(min_row, r);
      min_col = std::min(min_col, c);
    }
  }
  Fragment out = f;
  out.adjusted = true;
  if (min_row == f.n) return out;  // no ink

  std::fill(out.bits.begin(), out.bits.end(), std::uint8_t{0});
  for (int r = min_row; r < f.n; ++r) {
    for (int c = min_col; c < f.n; ++c) {
      if (f.get(r, c)) out.set(r - min_row, c - min_col, true);
    }
  }
  return out;
}

std::vector<Fragment> fragment_signature(const BinaryImage& signature, const WindowSpec& spec) {
  const Skeleton skel = thin(signature);
  std::vector<Fragment> out;
  for (const Window& w : place_windows(signature, skel, spec)) {
    Fragment f = adjust_fragment(extract_fragment(signature, w));
    if (f.foreground_count() >= spec.min_fragment_pixels) out.push_back(std::move(f));
  }
  return out;
}

}  // namespace sigwin
