#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sigwin/image.hpp"
#include "sigwin/skeleton.hpp"

namespace sigwin {

struct WindowSpec {
  int n = 13;
  double overlap_max = 0.0;
  std::size_t min_fragment_pixels = 3;
  /// Largest slide offset; unset means floor(n / 2).
  std::optional<int> max_slide;

  int slide_limit() const { return max_slide.value_or(n / 2); }
  /// Throws InvalidArgument unless n >= 3 is odd, overlap_max is in [0, 1]
  /// and max_slide (when set) is non-negative.
  void validate() const;

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

/// An n x n square anchored at its top-left corner. It may hang past the
/// image border; cells outside read as background.
struct Window {
  Point origin;
  int n = 13;

  bool contains(int x, int y) const noexcept {
    return x >= origin.x && y >= origin.y && x < origin.x + n && y < origin.y + n;
  }
  int x_max() const noexcept { return origin.x + n - 1; }
  int y_max() const noexcept { return origin.y + n - 1; }

  friend bool operator==(const Window&, const Window&) = default;
};

/// Shared area of two windows in pixels.
long overlap_area(const Window& a, const Window& b);

struct ExitFlags {
  bool east = false;
  bool west = false;
  bool north = false;
  bool south = false;

  bool any() const noexcept { return east || west || north || south; }
  friend bool operator==(const ExitFlags&, const ExitFlags&) = default;
};

struct Fragment {
  int n = 13;
  /// Row-major n x n cells, 1 = ink.
  std::vector<std::uint8_t> bits;
  Window origin_window;
  bool adjusted = false;

  explicit Fragment(int side = 13) : n(side), bits(static_cast<std::size_t>(side) * side, 0) {}

  bool get(int row, int col) const { return bits[static_cast<std::size_t>(row) * n + col] != 0; }
  void set(int row, int col, bool v) { bits[static_cast<std::size_t>(row) * n + col] = v ? 1 : 0; }
  std::size_t foreground_count() const noexcept;

  friend bool operator==(const Fragment&, const Fragment&) = default;
};

enum class SlideAxis { kVertical, kHorizontal };

/// First foreground pixel in row-major order. Throws EmptyImage.
Point find_start(const BinaryImage& img);

/// Exit flags of `w` over the skeleton: a side is flagged when a skeleton
/// pixel on that border row/column has a skeleton 8-neighbor beyond it.
/// When `visited` is given, neighbors marked there are ignored.
ExitFlags exit_flags(const Skeleton& skel, const Window& w,
                     const BinaryImage* visited = nullptr);

/// Unvisited skeleton pixels covered by `w`.
std::size_t coverage(const Skeleton& skel, const Window& w, const BinaryImage& visited);

/// Moves `candidate` along `axis` by the offset d in [-max_slide, max_slide]
/// that covers the most unvisited skeleton pixels. Ties prefer the smallest
/// |d|, then negative d.
Window slide_adjust(const Skeleton& skel, const Window& candidate, SlideAxis axis,
                    const BinaryImage& visited, int max_slide);

/// Adaptive window positioning along the skeleton.
///
/// A seed window is placed over the first skeleton pixel in row-major order
/// (the covering placement with the best coverage, nearest the centered one
/// on ties). Its x origin fixes a lattice of n-wide column strips, which are
/// covered left to right. Inside a strip, each window is centered on the
/// topmost uncovered skeleton pixel and slid vertically to the offset with
/// the most unvisited coverage that still contains that pixel and overlaps no
/// accepted window by more than overlap_max * n^2. Every skeleton pixel ends
/// up covered, and with overlap_max = 0 the windows are pairwise disjoint.
///
/// `component` only has to match the skeleton dimensions. Throws EmptyImage
/// for an empty skeleton.
std::vector<Window> place_windows(const BinaryImage& component, const Skeleton& skel,
                                  const WindowSpec& spec);

/// Copies the n x n patch under `w` from the (unthinned) image.
Fragment extract_fragment(const BinaryImage& component, const Window& w);

/// Translates the ink so it touches row 0 and column 0.
Fragment adjust_fragment(const Fragment& f);

/// Thinning, window placement, extraction and adjustment for one binarized
/// signature; fragments below spec.min_fragment_pixels are dropped.
std::vector<Fragment> fragment_signature(const BinaryImage& signature, const WindowSpec& spec);

}  // namespace sigwin
