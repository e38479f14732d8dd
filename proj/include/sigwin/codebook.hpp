#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "sigwin/windowing.hpp"

namespace sigwin {

/// Per-fragment shape measures.
struct FeatureVector {
  std::vector<int> hh;  ///< ink count per column
  std::vector<int> vh;  ///< ink count per row
  int upper = 0;        ///< topmost ink row
  int lower = 0;        ///< bottommost ink row
  double rect = 1.0;    ///< bounding-box area / ink count
  int perim = 0;        ///< ink pixels with a background 4-neighbor (frame counts as background)
};

struct PixelContingency {
  long n11 = 0;
  long n10 = 0;
  long n01 = 0;
  long n00 = 0;
};

struct PatternClass {
  /// members.front() is the founding fragment and the class representative.
  std::vector<Fragment> members;

  const Fragment& representative() const { return members.front(); }
  std::size_t frequency() const noexcept { return members.size(); }

  friend bool operator==(const PatternClass&, const PatternClass&) = default;
};

struct Codebook {
  std::vector<PatternClass> classes;  ///< in founding order
  WindowSpec spec;
  double theta = 0.8;

  std::size_t fragment_count() const noexcept;

  friend bool operator==(const Codebook&, const Codebook&) = default;
};

/// Throws EmptyFragment for a fragment without ink.
FeatureVector features(const Fragment& f);

/// Throws DimensionMismatch when the sides differ.
PixelContingency contingency(const Fragment& x, const Fragment& y);

/// Phi coefficient of the two bit patterns. When either pattern is constant
/// the coefficient is undefined; identical patterns then score 1, others 0.
double similarity(const Fragment& x, const Fragment& y);

/// Sequential leader clustering: each fragment joins the class whose
/// representative is most similar (earliest class on ties) if that
/// similarity reaches theta, and founds a new class otherwise.
Codebook cluster(const std::vector<Fragment>& fragments, double theta, const WindowSpec& spec);
Codebook cluster(const std::vector<Fragment>& fragments, double theta);

// Text format:
//   SIGWIN-CODEBOOK v1 n=<n> theta=<theta>
//   spec overlap_max=<x> min_fragment_pixels=<k> max_slide=<s|auto>
//   classes <count>
//   class <index> frequency <f>
//   fragment <origin x> <origin y> <adjusted 0|1>
//   <n rows of '0'/'1'>          (repeated per member)
//   end
void write_codebook(const Codebook& cb, std::ostream& out);
Codebook read_codebook(std::istream& in);

/// Throws IoError when the file cannot be opened or written.
void save_codebook(const Codebook& cb, const std::filesystem::path& path);
/// Throws IoError or FormatError.
Codebook load_codebook(const std::filesystem::path& path);

}  // namespace sigwin
