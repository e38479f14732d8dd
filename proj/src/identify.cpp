#include "sigwin/identify.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sigwin/error.hpp"

namespace sigwin {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  window_spec().validate();
  if (!(cluster_theta > -1.0 && cluster_theta <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "cluster-theta must lie in (-1, 1]");
  }
  if (!(verify_tau >= 0.0 && verify_tau <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "verify-tau must lie in [0, 1]");
  }
}

bool valid_writer_id(const std::string& id) {
  if (id.empty() || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-' || c == '.';
  });
}

void Registry::add(WriterProfile profile) {
  if (!valid_writer_id(profile.writer_id)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid writer id '" + profile.writer_id + "'");
  }
  const std::string id = profile.writer_id;
  profiles_.insert_or_assign(id, std::move(profile));
}

const WriterProfile& Registry::at(const std::string& writer_id) const {
  const auto it = profiles_.find(writer_id);
  if (it == profiles_.end()) {
    throw Error(ErrorCode::kUnknownWriter, "writer '" + writer_id + "' is not enrolled");
  }
  return it->second;
}

namespace {

constexpr const char* kManifest = "manifest.txt";

std::string codebook_file(const std::string& id) { return id + ".codebook"; }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void bad_manifest(const fs::path& dir, const std::string& what) {
  throw Error(ErrorCode::kFormat, "malformed registry manifest in " + dir.string() + ": " + what);
}

template <typename T>
T parse_value(const std::string& text, const fs::path& dir, const std::string& key) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    bad_manifest(dir, "bad value for " + key);
  }
  return value;
}

}  // namespace

void Registry::save(const fs::path& dir) const {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create registry directory " + dir.string());

  for (const auto& [id, profile] : profiles_) save_codebook(profile.codebook, dir / codebook_file(id));

  std::ostringstream m;
  m << "SIGWIN-REGISTRY v1\n"
    << "window_size=" << config_.window_size << '\n'
    << "cluster_theta=" << format_double(config_.cluster_theta) << '\n'
    << "min_fragment_pixels=" << config_.min_fragment_pixels << '\n'
    << "speck_min_size=" << config_.speck_min_size << '\n'
    << "overlap_max=" << format_double(config_.overlap_max) << '\n';
  for (const auto& [id, profile] : profiles_) {
    m << "writer " << id << " samples=" << profile.sample_count << '\n';
  }
  std::ofstream out(dir / kManifest, std::ios::binary);
  out << m.str();
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "cannot write manifest in " + dir.string());
}

Registry Registry::load(const fs::path& dir) {
  std::ifstream in(dir / kManifest, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "no registry manifest in " + dir.string());

  std::string line;
  if (!std::getline(in, line) || line != "SIGWIN-REGISTRY v1") bad_manifest(dir, "bad header");

  PipelineConfig config;
  std::vector<std::pair<std::string, std::size_t>> writers;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("writer ", 0) == 0) {
      std::istringstream ls(line.substr(7));
      std::string id, samples;
      if (!(ls >> id >> samples) || samples.rfind("samples=", 0) != 0 || !valid_writer_id(id)) {
        bad_manifest(dir, "bad writer line");
      }
      writers.emplace_back(id, parse_value<std::size_t>(samples.substr(8), dir, "samples"));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad_manifest(dir, "expected key=value");
    const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (key == "window_size") {
      config.window_size = parse_value<int>(value, dir, key);
    } else if (key == "cluster_theta") {
      config.cluster_theta = parse_value<double>(value, dir, key);
    } else if (key == "min_fragment_pixels") {
      config.min_fragment_pixels = parse_value<std::size_t>(value, dir, key);
    } else if (key == "speck_min_size") {
      config.speck_min_size = parse_value<std::size_t>(value, dir, key);
    } else if (key == "overlap_max") {
      config.overlap_max = parse_value<double>(value, dir, key);
    } else {
      bad_manifest(dir, "unknown key " + key);
    }
  }

  Registry registry(config);
  for (const auto& [id, samples] : writers) {
    WriterProfile profile{id, load_codebook(dir / codebook_file(id)), samples};
    if (profile.codebook.spec != config.window_spec() ||
        profile.codebook.theta != config.cluster_theta) {
      throw Error(ErrorCode::kConfigMismatch,
                  "codebook of '" + id + "' was built under a different configuration");
    }
    registry.add(std::move(profile));
  }
  return registry;
}

Registry Registry::load(const fs::path& dir, const PipelineConfig& expected) {
  Registry registry = load(dir);
  if (!registry.config().same_pipeline(expected)) {
    throw Error(ErrorCode::kConfigMismatch,
                "registry " + dir.string() + " was built with a different pipeline configuration");
  }
  registry.config_.verify_tau = expected.verify_tau;
  registry.config_.seed = expected.seed;
  return registry;
}

std::vector<Fragment> signature_fragments(const GrayImage& img, const PipelineConfig& config) {
  const BinaryImage clean = preprocess(img, config.speck_min_size);
  if (!clean.any()) throw Error(ErrorCode::kEmptyImage, "no ink left after preprocessing");
  return fragment_signature(clean, config.window_spec());
}

WriterProfile enroll_fragments(const std::string& writer_id,
                               const std::vector<std::vector<Fragment>>& per_image,
                               const PipelineConfig& config) {
  if (per_image.empty()) throw Error(ErrorCode::kInvalidArgument, "enrollment needs an image");
  std::vector<Fragment> pooled;
  for (const auto& fragments : per_image) {
    if (fragments.empty()) {
      throw Error(ErrorCode::kNoFragments, "an enrollment image produced no fragments");
    }
    pooled.insert(pooled.end(), fragments.begin(), fragments.end());
  }
  return {writer_id, cluster(pooled, config.cluster_theta, config.window_spec()),
          per_image.size()};
}

WriterProfile enroll(const std::string& writer_id, const std::vector<GrayImage>& images,
                     const PipelineConfig& config) {
  config.validate();
  std::vector<std::vector<Fragment>> per_image;
  per_image.reserve(images.size());
  for (const GrayImage& img : images) per_image.push_back(signature_fragments(img, config));
  return enroll_fragments(writer_id, per_image, config);
}

std::vector<double> best_similarities(const std::vector<Fragment>& fragments,
                                      const Codebook& codebook) {
  std::vector<double> best;
  best.reserve(fragments.size());
  for (const Fragment& f : fragments) {
    double s_max = -1.0;
    for (const auto& cls : codebook.classes) {
      for (const Fragment& m : cls.members) s_max = std::max(s_max, similarity(f, m));
    }
    best.push_back(s_max);
  }
  return best;
}

namespace {

double mean_clipped(const std::vector<double>& best) {
  double sum = 0.0;
  for (double s : best) sum += std::max(0.0, s);
  return sum / static_cast<double>(best.size());
}

}  // namespace

double match_score(const std::vector<Fragment>& fragments, const WriterProfile& profile) {
  if (fragments.empty()) throw Error(ErrorCode::kNoFragments, "no test fragments");
  return mean_clipped(best_similarities(fragments, profile.codebook));
}

MatchReport identify_fragments(const std::vector<Fragment>& fragments, const Registry& registry) {
  if (registry.empty()) throw Error(ErrorCode::kEmptyRegistry, "registry has no writers");
  if (fragments.empty()) throw Error(ErrorCode::kNoFragments, "no test fragments");
  MatchReport report;
  report.fragment_count = fragments.size();
  for (const auto& [id, profile] : registry.profiles()) {
    auto best = best_similarities(fragments, profile.codebook);
    const double score = mean_clipped(best);
    report.ranked.push_back({id, score, std::move(best)});
  }
  // profiles() is ordered by id, so a stable sort keeps ties lexicographic.
  std::stable_sort(report.ranked.begin(), report.ranked.end(),
                   [](const RankedWriter& a, const RankedWriter& b) { return a.score > b.score; });
  return report;
}

MatchReport identify(const GrayImage& test, const Registry& registry) {
  if (registry.empty()) throw Error(ErrorCode::kEmptyRegistry, "registry has no writers");
  return identify_fragments(signature_fragments(test, registry.config()), registry);
}

Verdict verify_fragments(const std::vector<Fragment>& fragments, const std::string& claimed_writer,
                         const Registry& registry, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must lie in [0, 1]");
  }
  const double score = match_score(fragments, registry.at(claimed_writer));
  return {score >= tau, score};
}

Verdict verify(const GrayImage& test, const std::string& claimed_writer, const Registry& registry,
               double tau) {
  registry.at(claimed_writer);
  return verify_fragments(signature_fragments(test, registry.config()), claimed_writer, registry,
                          tau);
}

}  // namespace sigwin
