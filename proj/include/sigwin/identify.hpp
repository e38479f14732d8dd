#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sigwin/codebook.hpp"
#include "sigwin/config.hpp"
#include "sigwin/image.hpp"

namespace sigwin {

struct WriterProfile {
  std::string writer_id;
  Codebook codebook;
  std::size_t sample_count = 0;
};

/// Enrolled writers sharing one pipeline configuration. Lookups are const and
/// may run concurrently; mutation needs exclusive access.
class Registry {
 public:
  explicit Registry(PipelineConfig config = {}) : config_(config) {}

  const PipelineConfig& config() const noexcept { return config_; }
  const std::map<std::string, WriterProfile>& profiles() const noexcept { return profiles_; }
  bool empty() const noexcept { return profiles_.empty(); }
  std::size_t size() const noexcept { return profiles_.size(); }

  /// Inserts or replaces the profile of `profile.writer_id`.
  void add(WriterProfile profile);
  /// Throws UnknownWriter.
  const WriterProfile& at(const std::string& writer_id) const;

  /// Directory layout: `manifest.txt` plus `<writer_id>.codebook` per writer.
  void save(const std::filesystem::path& dir) const;
  static Registry load(const std::filesystem::path& dir);
  /// As load(), but throws ConfigMismatch unless the manifest matches.
  static Registry load(const std::filesystem::path& dir, const PipelineConfig& expected);

 private:
  PipelineConfig config_;
  std::map<std::string, WriterProfile> profiles_;
};

/// Writer ids double as file names: [A-Za-z0-9_.-]+, not starting with '.'.
bool valid_writer_id(const std::string& id);

/// preprocess -> thin -> place windows -> extract and adjust. Throws
/// EmptyImage when no ink survives preprocessing.
std::vector<Fragment> signature_fragments(const GrayImage& img, const PipelineConfig& config);

/// Pools the fragments of every image into a single codebook.
WriterProfile enroll(const std::string& writer_id, const std::vector<GrayImage>& images,
                     const PipelineConfig& config);
WriterProfile enroll_fragments(const std::string& writer_id,
                               const std::vector<std::vector<Fragment>>& per_image,
                               const PipelineConfig& config);

/// Best similarity of each fragment to any stored class member.
std::vector<double> best_similarities(const std::vector<Fragment>& fragments,
                                      const Codebook& codebook);

/// Mean over fragments of max(0, best similarity). Throws NoFragments.
double match_score(const std::vector<Fragment>& fragments, const WriterProfile& profile);

struct RankedWriter {
  std::string writer_id;
  double score = 0.0;
  std::vector<double> best_similarities;
};

struct MatchReport {
  /// Descending score; ties in writer_id order.
  std::vector<RankedWriter> ranked;
  std::size_t fragment_count = 0;
};

MatchReport identify_fragments(const std::vector<Fragment>& fragments, const Registry& registry);
/// Throws EmptyRegistry or EmptyImage.
MatchReport identify(const GrayImage& test, const Registry& registry);

struct Verdict {
  bool accepted = false;
  double score = 0.0;
};

/// Accepts iff the score against the claimed writer is >= tau. Throws
/// UnknownWriter.
Verdict verify_fragments(const std::vector<Fragment>& fragments, const std::string& claimed_writer,
                         const Registry& registry, double tau);
Verdict verify(const GrayImage& test, const std::string& claimed_writer, const Registry& registry,
               double tau);

}  // namespace sigwin
