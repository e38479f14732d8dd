#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sigwin/config.hpp"
#include "sigwin/image.hpp"

namespace sigwin {

struct ScoreSet {
  std::vector<double> genuine;  ///< claimed writer is the true writer
  std::vector<double> forgery;  ///< claimed writer differs (random forgeries)
};

struct RocPoint {
  double tau = 0.0;
  double far = 0.0;  ///< percent
  double frr = 0.0;  ///< percent
};

struct EvalMetrics {
  double far = 0.0;       ///< percent, at tau_star
  double frr = 0.0;       ///< percent, at tau_star
  double eer = 0.0;       ///< (far + frr) / 2 at tau_star
  double tau_star = 0.0;  ///< sweep point minimizing |far - frr|, smallest on ties
  /// Linear interpolation of the FAR/FRR crossing between sweep points.
  double eer_interpolated = 0.0;
  std::vector<RocPoint> roc;  ///< ascending tau
};

struct ErrorRates {
  double far = 0.0;
  double frr = 0.0;
};

/// far = % of forgery scores >= tau, frr = % of genuine scores < tau.
/// Throws EmptyScores if either list is empty.
ErrorRates far_frr(const ScoreSet& scores, double tau);

/// The reported equal error rate: the mean of FAR and FRR at the operating
/// point.
double averaged_eer(double far, double frr);

/// Sweeps tau over {0, 1} and every distinct score. Throws EmptyScores.
EvalMetrics eer(const ScoreSet& scores);

/// `tau,far,frr` rows, one per sweep point.
void write_roc_csv(const EvalMetrics& metrics, std::ostream& out);

// ---------------------------------------------------------------------------
// Synthetic signatures

struct SynthParams {
  std::uint64_t writer_seed = 0;
  int strokes = 3;
  double slant = 0.0;      ///< radians; positive leans right
  double curvature = 0.6;  ///< 0 gives straight strokes
  double jitter = 0.8;     ///< per-sample control point stddev, pixels
  double pen_radius = 1.5;
  int width = 320;
  int height = 160;

  /// Throws InvalidArgument unless strokes >= 1, jitter >= 0, pen_radius > 0
  /// and the canvas is at least 16 x 16.
  void validate() const;
};

/// Style parameters drawn deterministically from the writer seed.
SynthParams writer_style(std::uint64_t writer_seed, int width = 320, int height = 160);

/// Renders `strokes` Catmull-Rom curves whose control points depend only on
/// writer_seed; sample_seed perturbs them by `jitter` and adds paper noise.
GrayImage synth_signature(const SynthParams& params, std::uint64_t sample_seed);

struct SynthDatasetSpec {
  int writers = 10;
  int samples_per_writer = 10;
  std::uint64_t seed = 0;
  int width = 320;
  int height = 160;
};

/// Writes `<out>/<writer_id>/genuine_<k>.png`; returns the writer ids.
std::vector<std::string> write_synthetic_dataset(const std::filesystem::path& out,
                                                 const SynthDatasetSpec& spec);

// ---------------------------------------------------------------------------
// Experiments over a dataset directory

struct Protocol {
  std::size_t enroll_count = 5;
  PipelineConfig config;
};

struct WriterReport {
  std::string writer_id;
  std::size_t enrolled = 0;
  std::size_t classes = 0;
  std::size_t genuine_claims = 0;
  std::size_t forgery_claims = 0;
  double mean_genuine = 0.0;
  double mean_forgery = 0.0;
  std::size_t rank1_correct = 0;
  std::size_t rank1_total = 0;
};

struct ExperimentResult {
  ScoreSet scores;
  EvalMetrics metrics;
  std::vector<WriterReport> writers;
  double rank1_accuracy = 0.0;  ///< percent of held-out genuine samples ranked first
};

struct DatasetWriter {
  std::string writer_id;
  std::vector<std::filesystem::path> genuine;  ///< sorted by sample index
  std::vector<std::filesystem::path> forgery;
};

/// Scans `<root>/<writer_id>/{genuine,forgery}_<k>.{png,pgm}`. Throws
/// LayoutError on a missing or empty root or a writer without genuine
/// samples.
std::vector<DatasetWriter> scan_dataset(const std::filesystem::path& root);

/// Enrolls every writer on enroll_count genuine samples (chosen by a
/// permutation seeded from config.seed), then scores each held-out genuine
/// sample against its own writer (genuine claim) and every other writer
/// (random forgery claim), plus any forgery_<k> images against their
/// writer. Throws LayoutError or InsufficientSamples.
ExperimentResult run_experiment(const std::filesystem::path& root, const Protocol& protocol);

/// Human-readable summary table.
void write_report(const ExperimentResult& result, const Protocol& protocol, std::ostream& out);

/// Deterministic 64-bit mixing of a seed and a stream index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace sigwin
