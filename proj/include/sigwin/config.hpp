#pragma once

#include <cstddef>
#include <cstdint>

#include "sigwin/windowing.hpp"

namespace sigwin {

/// Every tunable of the pipeline. Only the fields that shape enrolled
/// codebooks are recorded in a registry manifest; verify_tau and seed are
/// per-invocation.
struct PipelineConfig {
  int window_size = 13;
  double cluster_theta = 0.8;
  std::size_t min_fragment_pixels = 3;
  std::size_t speck_min_size = 8;
  double overlap_max = 0.0;
  double verify_tau = 0.5;
  std::uint64_t seed = 0;

  WindowSpec window_spec() const {
    WindowSpec spec;
    spec.n = window_size;
    spec.overlap_max = overlap_max;
    spec.min_fragment_pixels = min_fragment_pixels;
    return spec;
  }

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;

  /// True when the codebook-shaping fields agree.
  bool same_pipeline(const PipelineConfig& other) const {
    return window_size == other.window_size && cluster_theta == other.cluster_theta &&
           min_fragment_pixels == other.min_fragment_pixels &&
           speck_min_size == other.speck_min_size && overlap_max == other.overlap_max;
  }
};

}  // namespace sigwin
