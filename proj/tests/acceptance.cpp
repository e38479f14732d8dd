// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sigwin/cli.hpp"
#include "sigwin/codebook.hpp"
#include "sigwin/evalkit.hpp"
#include "sigwin/image.hpp"
#include "sigwin/skeleton.hpp"
#include "sigwin/windowing.hpp"
#include "test_support.hpp"

using namespace sigwin;
using namespace sigwin::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void check(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.ok = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs >= budget_s) {
    out.check(false, "runtime budget exceeded");
    out.ok = false;
  }
  if (!out.ok) ++failures;
  std::printf("%s %2d %-40s %8.3f s%s%s\n", out.ok ? "PASS" : "FAIL", id, name, secs,
              out.detail.empty() ? "" : "  ", out.detail.c_str());
  std::fflush(stdout);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Binarized synthetic signatures shared by criteria 4-6.
std::vector<BinaryImage> synthetic_inks(int count) {
  std::vector<BinaryImage> out;
  for (int i = 0; i < count; ++i) {
    const SynthParams style = writer_style(derive_seed(77, static_cast<std::uint64_t>(i)));
    out.push_back(preprocess(synth_signature(style, static_cast<std::uint64_t>(i)), 8));
  }
  return out;
}

std::vector<Fragment> criterion4_fragments;

}  // namespace

int main() {
  const fs::path scratch = fs::temp_directory_path() / "sigwin_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  criterion(1, "similarity oracle equivalence", 1.0, [] {
    Outcome o;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> density(0.02, 0.98);
    for (int i = 0; i < 1000; ++i) {
      const Fragment x = random_fragment(rng, 13, density(rng));
      const Fragment y = random_fragment(rng, 13, density(rng));
      const double d = std::abs(similarity(x, y) - phi_oracle(x, y));
      o.check(d <= 1e-12, "pair " + std::to_string(i) + " differs by " + std::to_string(d));
    }
    const Fragment x = fragment_from({"110", "010", "000"});
    const Fragment xc = fragment_from({"001", "101", "111"});
    o.check(similarity(x, x) == 1.0, "identical != 1");
    o.check(similarity(x, xc) == -1.0, "complement != -1");
    o.check(similarity(fragment_from({"11", "00"}), fragment_from({"10", "10"})) == 0.0,
            "2x2 independent != 0");
    return o;
  });

  criterion(2, "otsu oracle equivalence", 1.0, [] {
    Outcome o;
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
      const GrayImage img = random_gray(rng, 32, 32);
      o.check(otsu_threshold(img) == otsu_oracle(img), "image " + std::to_string(i));
    }
    return o;
  });

  criterion(3, "skeleton properties", 10.0, [] {
    Outcome o;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
      const BinaryImage blob = random_blob(rng, 48, 48);
      const BinaryImage skel = thin(blob).image;
      const std::string tag = "blob " + std::to_string(i);
      o.check(is_subset(skel, blob), tag + " not a subset");
      o.check(component_count_oracle(skel) == component_count_oracle(blob),
              tag + " component count changed");
      o.check(thin(skel).image == skel, tag + " not idempotent");
    }
    return o;
  });

  criterion(4, "windowing coverage and disjointness", 10.0, [] {
    Outcome o;
    const WindowSpec spec;
    const auto inks = synthetic_inks(100);
    for (std::size_t i = 0; i < inks.size(); ++i) {
      const BinaryImage& ink = inks[i];
      const Skeleton skel = thin(ink);
      const auto windows = place_windows(ink, skel, spec);
      const std::string tag = "signature " + std::to_string(i);
      for (std::size_t a = 0; a < windows.size(); ++a) {
        for (std::size_t b = a + 1; b < windows.size(); ++b) {
          o.check(overlap_area(windows[a], windows[b]) == 0, tag + " windows overlap");
        }
      }
      for (int y = 0; y < skel.image.height(); ++y) {
        for (int x = 0; x < skel.image.width(); ++x) {
          if (!skel.image.get(x, y)) continue;
          bool covered = false;
          for (const Window& w : windows) covered = covered || w.contains(x, y);
          o.check(covered, tag + " uncovered skeleton pixel");
        }
      }
      for (const Window& w : windows) criterion4_fragments.push_back(extract_fragment(ink, w));
    }
    BinaryImage stroke(100, 101);
    for (int x = 20; x < 20 + 3 * spec.n; ++x) stroke.set(x, 50, true);
    o.check(place_windows(stroke, thin(stroke), spec).size() == 3, "straight stroke != 3 windows");
    return o;
  });

  criterion(5, "adjustment properties", 0.0, [] {
    Outcome o;
    o.check(!criterion4_fragments.empty(), "no fragments from criterion 4");
    for (const Fragment& f : criterion4_fragments) {
      const Fragment a = adjust_fragment(f);
      o.check(a.foreground_count() == f.foreground_count(), "foreground count changed");
      if (a.foreground_count() > 0) {
        bool row0 = false, col0 = false;
        for (int k = 0; k < a.n; ++k) {
          row0 = row0 || a.get(0, k);
          col0 = col0 || a.get(k, 0);
        }
        o.check(row0 && col0, "ink does not touch row 0 and column 0");
      }
      o.check(adjust_fragment(a) == a, "not idempotent");
    }
    return o;
  });

  criterion(6, "clustering contracts", 0.0, [] {
    Outcome o;
    std::vector<Fragment> frags;
    for (const Fragment& f : criterion4_fragments) {
      Fragment a = adjust_fragment(f);
      if (a.foreground_count() >= 3) frags.push_back(std::move(a));
    }
    for (double theta : {0.5, 0.8, 0.95}) {
      const Codebook cb = cluster(frags, theta);
      std::size_t total = 0;
      for (const PatternClass& cls : cb.classes) {
        total += cls.frequency();
        for (const Fragment& m : cls.members) {
          o.check(similarity(m, cls.representative()) >= theta, "member below theta");
        }
      }
      o.check(total == frags.size(), "frequencies do not sum to fragment count");
    }
    const std::vector<Fragment> same(25, frags.front());
    o.check(cluster(same, 0.8).classes.size() == 1, "identical fragments not one class");
    return o;
  });

  criterion(7, "metric correctness", 0.0, [] {
    Outcome o;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      ScoreSet s;
      for (int i = 0; i < 40; ++i) s.genuine.push_back(std::round(u(rng) * 20) / 20);
      for (int i = 0; i < 60; ++i) s.forgery.push_back(std::round(u(rng) * 20) / 20);
      for (double tau : {0.0, 0.25, 0.5, 0.55, 0.9, 1.0}) {
        int fa = 0, fr = 0;
        for (double g : s.genuine) fr += g < tau ? 1 : 0;
        for (double f : s.forgery) fa += f >= tau ? 1 : 0;
        const ErrorRates r = far_frr(s, tau);
        o.check(r.far == 100.0 * fa / 60.0 && r.frr == 100.0 * fr / 40.0, "far_frr mismatch");
      }
    }
    o.check(std::abs(averaged_eer(8.68, 6.12) - 7.40) <= 1e-12, "8.68/6.12 does not give 7.40");
    ScoreSet same;
    for (int i = 0; i < 200; ++i) same.genuine.push_back(u(rng));
    same.forgery = same.genuine;
    const double granularity = 100.0 / 200.0;
    o.check(std::abs(eer(same).eer - 50.0) <= granularity, "identical distributions EER != 50");
    return o;
  });

  criterion(8, "end-to-end synthetic experiment", 60.0, [&scratch] {
    Outcome o;
    const fs::path ds = scratch / "dataset";
    write_synthetic_dataset(ds, SynthDatasetSpec{});
    const ExperimentResult r = run_experiment(ds, Protocol{});
    char buf[96];
    std::snprintf(buf, sizeof buf, "rank-1 %.2f%%, EER %.2f%%", r.rank1_accuracy, r.metrics.eer);
    o.check(r.rank1_accuracy >= 90.0 && r.metrics.eer <= 15.0, buf);
    if (o.ok) o.detail = buf;
    return o;
  });

  criterion(9, "evaluate determinism", 0.0, [&scratch] {
    Outcome o;
    const fs::path ds = scratch / "dataset";
    std::string reports[2], csvs[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path csv = scratch / ("roc_" + std::to_string(run) + ".csv");
      const fs::path report = scratch / ("report_" + std::to_string(run) + ".txt");
      std::ostringstream out, err;
      const int status = run_cli({"sigwin", "--seed", "11", "evaluate", ds.string(), "--roc-csv",
                                  csv.string(), "--report", report.string()},
                                 out, err);
      o.check(status == 0, "evaluate failed: " + err.str());
      reports[run] = slurp(report);
      csvs[run] = slurp(csv);
    }
    o.check(!reports[0].empty() && reports[0] == reports[1], "reports differ");
    o.check(!csvs[0].empty() && csvs[0] == csvs[1], "CSVs differ");
    return o;
  });

  criterion(10, "codebook round-trip", 0.0, [&scratch] {
    Outcome o;
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> count(0, 6), coord(-50, 300);
    for (int trial = 0; trial < 40; ++trial) {
      Codebook cb;
      const int sizes[] = {3, 5, 11, 13, 21};
      cb.spec.n = sizes[trial % 5];
      cb.spec.overlap_max = std::round(u(rng) * 100) / 100;
      cb.spec.min_fragment_pixels = static_cast<std::size_t>(count(rng));
      if (trial % 3 == 0) cb.spec.max_slide = count(rng);
      cb.theta = u(rng);
      const int classes = trial == 0 ? 0 : count(rng);
      for (int k = 0; k < classes; ++k) {
        PatternClass cls;
        const int members = 1 + count(rng);
        for (int m = 0; m < members; ++m) {
          Fragment f = random_fragment(rng, cb.spec.n, u(rng));
          f.origin_window = Window{{coord(rng), coord(rng)}, cb.spec.n};
          f.adjusted = (m % 2) == 0;
          cls.members.push_back(std::move(f));
        }
        cb.classes.push_back(std::move(cls));
      }
      std::stringstream text;
      write_codebook(cb, text);
      o.check(read_codebook(text) == cb, "stream round-trip differs at trial " + std::to_string(trial));
      const fs::path path = scratch / "rt.codebook";
      save_codebook(cb, path);
      o.check(load_codebook(path) == cb, "file round-trip differs at trial " + std::to_string(trial));
    }
    return o;
  });

  fs::remove_all(scratch);
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
