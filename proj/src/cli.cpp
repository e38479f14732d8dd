#include "sigwin/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "sigwin/codebook.hpp"
#include "sigwin/error.hpp"
#include "sigwin/evalkit.hpp"
#include "sigwin/identify.hpp"

namespace sigwin {

namespace fs = std::filesystem;

namespace {

struct DumpPaths {
  std::string skeleton;
  std::string windows;
  std::string fragments;

  bool any() const { return !skeleton.empty() || !windows.empty() || !fragments.empty(); }
};

void add_dump_flags(CLI::App* cmd, DumpPaths& dumps) {
  cmd->add_option("--dump-skeleton", dumps.skeleton, "Write the thinned signature as PBM");
  cmd->add_option("--dump-windows", dumps.windows, "Write accepted windows over the ink as PGM");
  cmd->add_option("--dump-fragments", dumps.fragments, "Write the adjusted fragments as a PGM mosaic");
}

fs::path with_suffix(const std::string& path, std::size_t index, bool multiple) {
  if (!multiple) return path;
  fs::path p(path);
  return p.parent_path() / (p.stem().string() + "_" + std::to_string(index) + p.extension().string());
}

GrayImage window_overlay(const BinaryImage& ink, const std::vector<Window>& windows) {
  GrayImage out = to_gray(ink);
  auto mark = [&](int x, int y) {
    if (x >= 0 && y >= 0 && x < out.width() && y < out.height() && out.at(x, y) != 0) {
      out.at(x, y) = 150;
    }
  };
  for (const Window& w : windows) {
    for (int i = 0; i < w.n; ++i) {
      mark(w.origin.x + i, w.origin.y);
      mark(w.origin.x + i, w.y_max());
      mark(w.origin.x, w.origin.y + i);
      mark(w.x_max(), w.origin.y + i);
    }
  }
  return out;
}

GrayImage fragment_mosaic(const std::vector<Fragment>& fragments, int n) {
  constexpr int kColumns = 10;
  const int count = std::max<int>(1, static_cast<int>(fragments.size()));
  const int cols = std::min(kColumns, count);
  const int rows = (count + kColumns - 1) / kColumns;
  const int cell = n + 1;
  GrayImage out(cols * cell + 1, rows * cell + 1, 200);
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    const int ox = 1 + static_cast<int>(i % kColumns) * cell;
    const int oy = 1 + static_cast<int>(i / kColumns) * cell;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) out.at(ox + c, oy + r) = fragments[i].get(r, c) ? 0 : 255;
    }
  }
  return out;
}

void write_dumps(const GrayImage& img, const PipelineConfig& config, const DumpPaths& dumps,
                 std::size_t index, bool multiple) {
  if (!dumps.any()) return;
  const BinaryImage clean = preprocess(img, config.speck_min_size);
  if (!clean.any()) throw Error(ErrorCode::kEmptyImage, "no ink left after preprocessing");
  const WindowSpec spec = config.window_spec();
  const Skeleton skel = thin(clean);
  const auto windows = place_windows(clean, skel, spec);
  if (!dumps.skeleton.empty()) write_pbm(skel.image, with_suffix(dumps.skeleton, index, multiple));
  if (!dumps.windows.empty()) {
    write_pgm(window_overlay(clean, windows), with_suffix(dumps.windows, index, multiple));
  }
  if (!dumps.fragments.empty()) {
    write_pgm(fragment_mosaic(fragment_signature(clean, spec), spec.n),
              with_suffix(dumps.fragments, index, multiple));
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Registry open_registry(const fs::path& dir, const PipelineConfig& config) {
  return Registry::load(dir, config);
}

int cmd_enroll(const std::string& registry_dir, const std::string& writer_id,
               const std::vector<std::string>& images, const PipelineConfig& config,
               const DumpPaths& dumps, std::ostream& out) {
  if (!valid_writer_id(writer_id)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid writer id '" + writer_id + "'");
  }
  const fs::path dir(registry_dir);
  Registry registry = fs::exists(dir / "manifest.txt") ? open_registry(dir, config)
                                                       : Registry(config);
  std::vector<std::vector<Fragment>> per_image;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const GrayImage img = read_image(images[i]);
    write_dumps(img, config, dumps, i, images.size() > 1);
    per_image.push_back(signature_fragments(img, config));
  }
  WriterProfile profile = enroll_fragments(writer_id, per_image, config);
  const std::size_t classes = profile.codebook.classes.size();
  const std::size_t fragments = profile.codebook.fragment_count();
  registry.add(std::move(profile));
  registry.save(dir);
  out << "enrolled " << writer_id << ": " << images.size() << " image(s), " << fragments
      << " fragments, " << classes << " classes\n";
  return kExitOk;
}

int cmd_identify(const std::string& registry_dir, const std::string& image, bool json,
                 const PipelineConfig& config, const DumpPaths& dumps, std::ostream& out) {
  const Registry registry = open_registry(registry_dir, config);
  const GrayImage img = read_image(image);
  write_dumps(img, config, dumps, 0, false);
  const MatchReport report = identify(img, registry);
  if (json) {
    nlohmann::ordered_json doc;
    doc["image"] = image;
    doc["fragments"] = report.fragment_count;
    auto& ranking = doc["ranking"] = nlohmann::ordered_json::array();
    for (const auto& r : report.ranked) ranking.push_back({{"writer", r.writer_id}, {"score", r.score}});
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  out << "fragments: " << report.fragment_count << '\n';
  for (std::size_t i = 0; i < report.ranked.size(); ++i) {
    out << i + 1 << ". " << report.ranked[i].writer_id << "  " << fixed(report.ranked[i].score, 3)
        << '\n';
  }
  return kExitOk;
}

int cmd_verify(const std::string& registry_dir, const std::string& writer_id,
               const std::string& image, bool json, const PipelineConfig& config,
               std::ostream& out) {
  const Registry registry = open_registry(registry_dir, config);
  const Verdict v = verify(read_image(image), writer_id, registry, config.verify_tau);
  if (json) {
    nlohmann::ordered_json doc{{"writer", writer_id},
                               {"score", v.score},
                               {"tau", config.verify_tau},
                               {"accepted", v.accepted}};
    out << doc.dump(2) << '\n';
  } else {
    out << (v.accepted ? "ACCEPT" : "REJECT") << ' ' << writer_id << " score " << fixed(v.score, 3)
        << " tau " << fixed(config.verify_tau, 3) << '\n';
  }
  return kExitOk;
}

int cmd_evaluate(const std::string& dataset_root, std::size_t enroll_count,
                 const std::string& roc_csv, const std::string& report_path,
                 const PipelineConfig& config, std::ostream& out) {
  Protocol protocol{enroll_count, config};
  const ExperimentResult result = run_experiment(dataset_root, protocol);

  std::ostringstream report;
  write_report(result, protocol, report);
  out << report.str();

  std::ofstream csv(roc_csv, std::ios::binary);
  if (!csv) throw Error(ErrorCode::kIo, "cannot write " + roc_csv);
  write_roc_csv(result.metrics, csv);
  if (!report_path.empty()) {
    std::ofstream rep(report_path, std::ios::binary);
    if (!rep) throw Error(ErrorCode::kIo, "cannot write " + report_path);
    rep << report.str();
  }
  return kExitOk;
}

int cmd_synth(const std::string& out_dir, int writers, int samples, int width, int height,
              const PipelineConfig& config, std::ostream& out) {
  SynthDatasetSpec spec{writers, samples, config.seed, width, height};
  const auto ids = write_synthetic_dataset(out_dir, spec);
  out << "wrote " << ids.size() * static_cast<std::size_t>(samples) << " images for " << ids.size()
      << " writers to " << out_dir << '\n';
  return kExitOk;
}

int cmd_codebook_inspect(const std::string& path, std::ostream& out) {
  const Codebook cb = load_codebook(path);
  out << "classes: " << cb.classes.size() << "  fragments: " << cb.fragment_count()
      << "  n: " << cb.spec.n << "  theta: " << cb.theta << '\n';

  std::map<std::size_t, std::size_t> histogram;
  for (const auto& cls : cb.classes) ++histogram[cls.frequency()];
  out << "\nfrequency  classes\n";
  for (const auto& [freq, count] : histogram) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%9zu  %7zu\n", freq, count);
    out << buf;
  }

  out << "\nclass  freq";
  for (int i = 1; i <= cb.spec.n; ++i) out << "  HH" << i;
  for (int i = 1; i <= cb.spec.n; ++i) out << "  VH" << i;
  out << "  Uppe  Lowe   Rect  Perim\n";
  for (std::size_t k = 0; k < cb.classes.size(); ++k) {
    const auto& rep = cb.classes[k].representative();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%5zu  %4zu", k + 1, cb.classes[k].frequency());
    out << buf;
    if (rep.foreground_count() == 0) {
      out << "  (empty)\n";
      continue;
    }
    const FeatureVector fv = features(rep);
    for (int i = 0; i < cb.spec.n; ++i) {
      std::snprintf(buf, sizeof buf, "  %*d", i + 1 >= 10 ? 4 : 3, fv.hh[i]);
      out << buf;
    }
    for (int i = 0; i < cb.spec.n; ++i) {
      std::snprintf(buf, sizeof buf, "  %*d", i + 1 >= 10 ? 4 : 3, fv.vh[i]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "  %4d  %4d  %5.3f  %5d\n", fv.upper, fv.lower, fv.rect, fv.perim);
    out << buf;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Offline signature identification with adaptive window positioning", "sigwin"};
  app.require_subcommand(1);
  app.fallthrough();

  PipelineConfig config;
  app.set_config("--config", "", "Config file whose keys are flag names")
      ->envname("SIGWIN_CONFIG");
  app.add_option("--window-size", config.window_size, "Window side n (odd, >= 3)")
      ->capture_default_str();
  app.add_option("--cluster-theta", config.cluster_theta, "Codebook similarity threshold")
      ->capture_default_str();
  app.add_option("--min-fragment-pixels", config.min_fragment_pixels,
                 "Drop fragments with less ink than this")
      ->capture_default_str();
  app.add_option("--speck-min-size", config.speck_min_size, "Erase ink components smaller than this")
      ->capture_default_str();
  app.add_option("--overlap-max", config.overlap_max, "Allowed window overlap as a fraction of n^2")
      ->capture_default_str();
  app.add_option("--verify-tau", config.verify_tau, "Acceptance threshold for verify")
      ->capture_default_str();
  app.add_option("--seed", config.seed, "Seed for every random choice")->capture_default_str();

  DumpPaths dumps;
  bool json = false;

  std::string registry_dir, writer_id, image;
  std::vector<std::string> images;
  auto* enroll = app.add_subcommand("enroll", "Build a writer's codebook from genuine samples");
  enroll->add_option("registry", registry_dir, "Registry directory")->required();
  enroll->add_option("writer", writer_id, "Writer id")->required();
  enroll->add_option("images", images, "Signature images (PNG or PGM)")->required();
  add_dump_flags(enroll, dumps);

  auto* ident = app.add_subcommand("identify", "Rank enrolled writers for a signature");
  ident->add_option("registry", registry_dir, "Registry directory")->required();
  ident->add_option("image", image, "Signature image")->required();
  ident->add_flag("--json", json, "Machine-readable output");
  add_dump_flags(ident, dumps);

  auto* verify_cmd = app.add_subcommand("verify", "Accept or reject a claimed identity");
  verify_cmd->add_option("registry", registry_dir, "Registry directory")->required();
  verify_cmd->add_option("writer", writer_id, "Claimed writer id")->required();
  verify_cmd->add_option("image", image, "Signature image")->required();
  verify_cmd->add_flag("--json", json, "Machine-readable output");

  std::string dataset_root, roc_csv = "roc.csv", report_path;
  std::size_t enroll_count = 5;
  auto* evaluate = app.add_subcommand("evaluate", "FAR/FRR/EER over a dataset directory");
  evaluate->add_option("dataset", dataset_root, "Dataset root")->required();
  evaluate->add_option("--enroll-count", enroll_count, "Genuine samples enrolled per writer")
      ->capture_default_str();
  evaluate->add_option("--roc-csv", roc_csv, "Where to write the tau,far,frr sweep")
      ->capture_default_str();
  evaluate->add_option("--report", report_path, "Also write the report table to this file");

  std::string out_dir;
  int writers = 10, samples = 10, width = 320, height = 160;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic multi-writer dataset");
  synth->add_option("out", out_dir, "Output directory")->required();
  synth->add_option("--writers", writers, "Number of writers")->capture_default_str();
  synth->add_option("--samples", samples, "Samples per writer")->capture_default_str();
  synth->add_option("--width", width, "Canvas width")->capture_default_str();
  synth->add_option("--height", height, "Canvas height")->capture_default_str();

  std::string codebook_path;
  auto* codebook = app.add_subcommand("codebook", "Codebook utilities");
  codebook->require_subcommand(1);
  auto* inspect = codebook->add_subcommand("inspect", "Summarize a codebook file");
  inspect->add_option("path", codebook_path, "Codebook file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInput;
  }

  try {
    config.validate();
    if (*enroll) return cmd_enroll(registry_dir, writer_id, images, config, dumps, out);
    if (*ident) return cmd_identify(registry_dir, image, json, config, dumps, out);
    if (*verify_cmd) return cmd_verify(registry_dir, writer_id, image, json, config, out);
    if (*evaluate) return cmd_evaluate(dataset_root, enroll_count, roc_csv, report_path, config, out);
    if (*synth) return cmd_synth(out_dir, writers, samples, width, height, config, out);
    if (*inspect) return cmd_codebook_inspect(codebook_path, out);
  } catch (const Error& e) {
    err << "sigwin: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == ErrorCode::kConfigMismatch ? kExitConfigMismatch : kExitInput;
  } catch (const std::exception& e) {
    err << "sigwin: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInput;
}

}  // namespace sigwin
