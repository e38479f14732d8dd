#include "sigwin/skeleton.hpp"

#include <array>
#include <vector>

namespace sigwin {

namespace {

// Neighbors P2..P9 clockwise from north, as in the usual Zhang-Suen labeling.
constexpr std::array<int, 8> kDx = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDy = {-1, -1, 0, 1, 1, 1, 0, -1};

std::array<int, 8> neighbors(const BinaryImage& img, int x, int y) {
  std::array<int, 8> p{};
  for (int i = 0; i < 8; ++i) p[i] = img.get(x + kDx[i], y + kDy[i]) ? 1 : 0;
  return p;
}

bool zhang_suen_candidate(const std::array<int, 8>& p, bool first_pass) {
  int count = 0;
  int transitions = 0;
  for (int i = 0; i < 8; ++i) {
    count += p[i];
    if (p[i] == 0 && p[(i + 1) % 8] == 1) ++transitions;
  }
  if (count < 2 || count > 6 || transitions != 1) return false;
  // p[0]=P2 (N), p[2]=P4 (E), p[4]=P6 (S), p[6]=P8 (W)
  if (first_pass) return p[0] * p[2] * p[4] == 0 && p[2] * p[4] * p[6] == 0;
  return p[0] * p[2] * p[6] == 0 && p[0] * p[4] * p[6] == 0;
}

bool subiteration(BinaryImage& img, bool first_pass) {
  std::vector<Point> flagged;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.get(x, y) && zhang_suen_candidate(neighbors(img, x, y), first_pass)) {
        flagged.push_back({x, y});
      }
    }
  }
  bool changed = false;
  for (const Point& p : flagged) {
    if (!is_simple_point(img, p.x, p.y)) continue;
    img.set(p.x, p.y, false);
    changed = true;
  }
  return changed;
}

}  // namespace

bool is_simple_point(const BinaryImage& img, int x, int y) {
  // Yokoi connectivity number for 8-connectivity, on complemented neighbors
  // in E, NE, N, NW, W, SW, S, SE order.
  static constexpr std::array<int, 8> dx = {1, 1, 0, -1, -1, -1, 0, 1};
  static constexpr std::array<int, 8> dy = {0, -1, -1, -1, 0, 1, 1, 1};
  std::array<int, 8> c{};
  for (int i = 0; i < 8; ++i) c[i] = img.get(x + dx[i], y + dy[i]) ? 0 : 1;
  int number = 0;
  for (int k = 0; k < 8; k += 2) {
    number += c[k] - c[k] * c[(k + 1) % 8] * c[(k + 2) % 8];
  }
  return number == 1;
}

Skeleton thin(const BinaryImage& img) {
  Skeleton skel{img, img.foreground_count()};
  bool changed = true;
  while (changed) {
    changed = subiteration(skel.image, true);
    changed = subiteration(skel.image, false) || changed;
  }
  return skel;
}

}  // namespace sigwin
