#include "sigwin/evalkit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

#include "sigwin/error.hpp"
#include "sigwin/identify.hpp"

namespace sigwin {

namespace fs = std::filesystem;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over the combined value
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + stream + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ErrorRates far_frr(const ScoreSet& scores, double tau) {
  if (scores.genuine.empty() || scores.forgery.empty()) {
    throw Error(ErrorCode::kEmptyScores, "both genuine and forgery scores are required");
  }
  const auto accepted = std::count_if(scores.forgery.begin(), scores.forgery.end(),
                                      [tau](double s) { return s >= tau; });
  const auto rejected = std::count_if(scores.genuine.begin(), scores.genuine.end(),
                                      [tau](double s) { return s < tau; });
  return {100.0 * static_cast<double>(accepted) / static_cast<double>(scores.forgery.size()),
          100.0 * static_cast<double>(rejected) / static_cast<double>(scores.genuine.size())};
}

double averaged_eer(double far, double frr) { return (far + frr) / 2.0; }

EvalMetrics eer(const ScoreSet& scores) {
  if (scores.genuine.empty() || scores.forgery.empty()) {
    throw Error(ErrorCode::kEmptyScores, "both genuine and forgery scores are required");
  }
  std::vector<double> taus{0.0, 1.0};
  taus.insert(taus.end(), scores.genuine.begin(), scores.genuine.end());
  taus.insert(taus.end(), scores.forgery.begin(), scores.forgery.end());
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  std::vector<double> genuine = scores.genuine, forgery = scores.forgery;
  std::sort(genuine.begin(), genuine.end());
  std::sort(forgery.begin(), forgery.end());
  const double ng = static_cast<double>(genuine.size());
  const double nf = static_cast<double>(forgery.size());

  EvalMetrics m;
  m.roc.reserve(taus.size());
  double best_gap = 0.0;
  for (double tau : taus) {
    const auto below_g = std::lower_bound(genuine.begin(), genuine.end(), tau) - genuine.begin();
    const auto below_f = std::lower_bound(forgery.begin(), forgery.end(), tau) - forgery.begin();
    RocPoint p{tau, 100.0 * (nf - static_cast<double>(below_f)) / nf,
               100.0 * static_cast<double>(below_g) / ng};
    const double gap = std::abs(p.far - p.frr);
    if (m.roc.empty() || gap < best_gap) {
      best_gap = gap;
      m.tau_star = tau;
      m.far = p.far;
      m.frr = p.frr;
    }
    m.roc.push_back(p);
  }
  m.eer = averaged_eer(m.far, m.frr);

  // far - frr is non-increasing in tau; interpolate where it crosses zero.
  m.eer_interpolated = m.eer;
  for (std::size_t i = 0; i < m.roc.size(); ++i) {
    const double d1 = m.roc[i].far - m.roc[i].frr;
    if (d1 == 0.0) {
      m.eer_interpolated = m.roc[i].far;
      break;
    }
    if (i + 1 < m.roc.size()) {
      const double d2 = m.roc[i + 1].far - m.roc[i + 1].frr;
      if (d1 > 0.0 && d2 < 0.0) {
        const double a = d1 / (d1 - d2);
        const double far = m.roc[i].far + a * (m.roc[i + 1].far - m.roc[i].far);
        const double frr = m.roc[i].frr + a * (m.roc[i + 1].frr - m.roc[i].frr);
        m.eer_interpolated = averaged_eer(far, frr);
        break;
      }
    }
  }
  return m;
}

void write_roc_csv(const EvalMetrics& metrics, std::ostream& out) {
  out << "tau,far,frr\n";
  char buf[96];
  for (const RocPoint& p : metrics.roc) {
    std::snprintf(buf, sizeof buf, "%.6f,%.4f,%.4f\n", p.tau, p.far, p.frr);
    out << buf;
  }
}

namespace {

// Parses "<prefix><index>.<png|pgm>"; returns -1 when the name does not fit.
long sample_index(const std::string& name, std::string_view prefix) {
  if (name.size() <= prefix.size() + 4 || name.compare(0, prefix.size(), prefix) != 0) return -1;
  const std::string ext = name.substr(name.size() - 4);
  if (ext != ".png" && ext != ".pgm") return -1;
  const char* begin = name.data() + prefix.size();
  const char* end = name.data() + name.size() - 4;
  long value = -1;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || value < 0) return -1;
  return value;
}

std::vector<fs::path> sorted_samples(std::map<long, fs::path>& by_index) {
  std::vector<fs::path> out;
  for (auto& [idx, path] : by_index) out.push_back(path);
  return out;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::vector<DatasetWriter> scan_dataset(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::kLayout, "dataset root " + root.string() + " is not a directory");
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::kLayout, "cannot list " + root.string());
  if (dirs.empty()) throw Error(ErrorCode::kLayout, "dataset root " + root.string() + " is empty");
  std::sort(dirs.begin(), dirs.end());

  std::vector<DatasetWriter> writers;
  for (const fs::path& dir : dirs) {
    DatasetWriter w;
    w.writer_id = dir.filename().string();
    if (!valid_writer_id(w.writer_id)) {
      throw Error(ErrorCode::kLayout, "invalid writer directory name '" + w.writer_id + "'");
    }
    std::map<long, fs::path> genuine, forgery;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string name = entry.path().filename().string();
      if (const long g = sample_index(name, "genuine_"); g >= 0) {
        if (!genuine.emplace(g, entry.path()).second) {
          throw Error(ErrorCode::kLayout, "duplicate sample index in " + dir.string());
        }
      } else if (const long f = sample_index(name, "forgery_"); f >= 0) {
        if (!forgery.emplace(f, entry.path()).second) {
          throw Error(ErrorCode::kLayout, "duplicate forgery index in " + dir.string());
        }
      }
    }
    if (genuine.empty()) {
      throw Error(ErrorCode::kLayout, "writer directory " + dir.string() + " has no genuine samples");
    }
    w.genuine = sorted_samples(genuine);
    w.forgery = sorted_samples(forgery);
    writers.push_back(std::move(w));
  }
  return writers;
}

ExperimentResult run_experiment(const fs::path& root, const Protocol& protocol) {
  const PipelineConfig& config = protocol.config;
  config.validate();
  const auto writers = scan_dataset(root);
  if (protocol.enroll_count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "enroll count must be at least 1");
  }
  for (const auto& w : writers) {
    if (protocol.enroll_count >= w.genuine.size()) {
      throw Error(ErrorCode::kInsufficientSamples,
                  "writer '" + w.writer_id + "' has " + std::to_string(w.genuine.size()) +
                      " genuine samples; enrolling " + std::to_string(protocol.enroll_count) +
                      " leaves none to test");
    }
  }

  auto load_fragments = [&](const fs::path& p) { return signature_fragments(read_image(p), config); };

  Registry registry(config);
  std::vector<std::vector<std::vector<Fragment>>> held_out(writers.size());
  std::vector<std::vector<std::vector<Fragment>>> forgeries(writers.size());
  std::mt19937_64 rng(derive_seed(config.seed, 0x5eed));
  for (std::size_t wi = 0; wi < writers.size(); ++wi) {
    const auto& w = writers[wi];
    std::vector<std::size_t> order(w.genuine.size());
    std::iota(order.begin(), order.end(), 0);
    // Fisher-Yates with explicit modulo so the permutation does not depend on
    // the standard library's distribution implementation.
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng() % i]);
    }
    std::sort(order.begin(), order.begin() + static_cast<long>(protocol.enroll_count));
    std::sort(order.begin() + static_cast<long>(protocol.enroll_count), order.end());

    std::vector<std::vector<Fragment>> enrolled;
    for (std::size_t k = 0; k < order.size(); ++k) {
      auto fragments = load_fragments(w.genuine[order[k]]);
      if (k < protocol.enroll_count) {
        enrolled.push_back(std::move(fragments));
      } else {
        held_out[wi].push_back(std::move(fragments));
      }
    }
    for (const auto& p : w.forgery) forgeries[wi].push_back(load_fragments(p));
    registry.add(enroll_fragments(w.writer_id, enrolled, config));
  }

  ExperimentResult result;
  std::size_t correct_total = 0, claims_total = 0;
  for (std::size_t wi = 0; wi < writers.size(); ++wi) {
    const auto& id = writers[wi].writer_id;
    WriterReport rep;
    rep.writer_id = id;
    rep.enrolled = protocol.enroll_count;
    rep.classes = registry.at(id).codebook.classes.size();
    std::vector<double> genuine, forgery;
    for (const auto& fragments : held_out[wi]) {
      const MatchReport report = identify_fragments(fragments, registry);
      for (const auto& r : report.ranked) {
        if (r.writer_id == id) {
          genuine.push_back(r.score);
        } else {
          forgery.push_back(r.score);
        }
      }
      ++rep.rank1_total;
      if (report.ranked.front().writer_id == id) ++rep.rank1_correct;
    }
    for (const auto& fragments : forgeries[wi]) {
      forgery.push_back(match_score(fragments, registry.at(id)));
    }
    rep.genuine_claims = genuine.size();
    rep.forgery_claims = forgery.size();
    rep.mean_genuine = mean(genuine);
    rep.mean_forgery = mean(forgery);
    correct_total += rep.rank1_correct;
    claims_total += rep.rank1_total;
    result.scores.genuine.insert(result.scores.genuine.end(), genuine.begin(), genuine.end());
    result.scores.forgery.insert(result.scores.forgery.end(), forgery.begin(), forgery.end());
    result.writers.push_back(rep);
  }
  result.rank1_accuracy =
      claims_total == 0 ? 0.0 : 100.0 * static_cast<double>(correct_total) / claims_total;
  result.metrics = eer(result.scores);
  return result;
}

void write_report(const ExperimentResult& result, const Protocol& protocol, std::ostream& out) {
  const PipelineConfig& c = protocol.config;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "window-size %d  cluster-theta %.3f  min-fragment-pixels %zu  speck-min-size %zu  "
                "overlap-max %.3f  enroll-count %zu  seed %llu\n\n",
                c.window_size, c.cluster_theta, c.min_fragment_pixels, c.speck_min_size,
                c.overlap_max, protocol.enroll_count, static_cast<unsigned long long>(c.seed));
  out << buf;

  out << "writer        enrolled  classes  genuine  forgery  mean-genuine  mean-forgery  rank-1\n";
  for (const auto& w : result.writers) {
    std::snprintf(buf, sizeof buf, "%-12s  %8zu  %7zu  %7zu  %7zu  %12.4f  %12.4f  %zu/%zu\n",
                  w.writer_id.c_str(), w.enrolled, w.classes, w.genuine_claims, w.forgery_claims,
                  w.mean_genuine, w.mean_forgery, w.rank1_correct, w.rank1_total);
    out << buf;
  }
  out << '\n';

  const EvalMetrics& m = result.metrics;
  out << "FAR (%)  FRR (%)  EER (%)  tau*\n";
  std::snprintf(buf, sizeof buf, "%7.2f  %7.2f  %7.2f  %.4f\n", m.far, m.frr, m.eer, m.tau_star);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "\ninterpolated EER (%%): %.2f\nrank-1 identification (%%): %.2f\n"
                "genuine claims: %zu  forgery claims: %zu\n",
                m.eer_interpolated, result.rank1_accuracy, result.scores.genuine.size(),
                result.scores.forgery.size());
  out << buf;
}

}  // namespace sigwin
