#include "sigwin/codebook.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "sigwin/error.hpp"

namespace sigwin {

std::size_t Codebook::fragment_count() const noexcept {
  std::size_t total = 0;
  for (const auto& c : classes) total += c.frequency();
  return total;
}

FeatureVector features(const Fragment& f) {
  const int n = f.n;
  FeatureVector fv;
  fv.hh.assign(n, 0);
  fv.vh.assign(n, 0);
  int count = 0;
  int top = n, bottom = -1, left = n, right = -1;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (!f.get(r, c)) continue;
      ++count;
      ++fv.hh[c];
      ++fv.vh[r];
      top = std::min(top, r);
      bottom = std::max(bottom, r);
      left = std::min(left, c);
      right = std::max(right, c);
      const bool boundary = r == 0 || c == 0 || r == n - 1 || c == n - 1 || !f.get(r - 1, c) ||
                            !f.get(r + 1, c) || !f.get(r, c - 1) || !f.get(r, c + 1);
      if (boundary) ++fv.perim;
    }
  }
  if (count == 0) throw Error(ErrorCode::kEmptyFragment, "fragment has no ink");
  fv.upper = top;
  fv.lower = bottom;
  fv.rect = static_cast<double>((bottom - top + 1) * (right - left + 1)) / count;
  return fv;
}

PixelContingency contingency(const Fragment& x, const Fragment& y) {
  if (x.n != y.n || x.bits.size() != y.bits.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "fragments have different sizes");
  }
  long both = 0, in_x = 0, in_y = 0;
  for (std::size_t i = 0; i < x.bits.size(); ++i) {
    both += x.bits[i] & y.bits[i];
    in_x += x.bits[i];
    in_y += y.bits[i];
  }
  PixelContingency t;
  t.n11 = both;
  t.n10 = in_x - both;
  t.n01 = in_y - both;
  t.n00 = static_cast<long>(x.bits.size()) - t.n11 - t.n10 - t.n01;
  return t;
}

double similarity(const Fragment& x, const Fragment& y) {
  const PixelContingency t = contingency(x, y);
  const double denom = static_cast<double>(t.n11 + t.n10) * static_cast<double>(t.n01 + t.n00) *
                       static_cast<double>(t.n11 + t.n01) * static_cast<double>(t.n10 + t.n00);
  if (denom == 0.0) return x.bits == y.bits ? 1.0 : 0.0;
  const double numer =
      static_cast<double>(t.n11 * t.n00) - static_cast<double>(t.n10 * t.n01);
  return std::clamp(numer / std::sqrt(denom), -1.0, 1.0);
}

Codebook cluster(const std::vector<Fragment>& fragments, double theta, const WindowSpec& spec) {
  if (!(theta > -1.0 && theta <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "theta must lie in (-1, 1]");
  }
  Codebook cb;
  cb.spec = spec;
  cb.theta = theta;
  for (const Fragment& f : fragments) {
    std::size_t best_class = 0;
    double best = -2.0;
    for (std::size_t k = 0; k < cb.classes.size(); ++k) {
      const double s = similarity(f, cb.classes[k].representative());
      if (s > best) {
        best = s;
        best_class = k;
      }
    }
    if (!cb.classes.empty() && best >= theta) {
      cb.classes[best_class].members.push_back(f);
    } else {
      cb.classes.push_back(PatternClass{{f}});
    }
  }
  return cb;
}

Codebook cluster(const std::vector<Fragment>& fragments, double theta) {
  WindowSpec spec;
  if (!fragments.empty()) spec.n = fragments.front().n;
  return cluster(fragments, theta, spec);
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kFormat, "malformed codebook: " + what);
}

template <typename T>
T parse_number(std::string_view text, const char* field) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    malformed(std::string("bad value for ") + field);
  }
  return value;
}

// Returns the value of "key=value" or fails.
std::string_view keyed(std::string_view token, std::string_view key) {
  if (token.size() <= key.size() || token.substr(0, key.size()) != key ||
      token[key.size()] != '=') {
    malformed("expected " + std::string(key) + "=...");
  }
  return token.substr(key.size() + 1);
}

std::vector<std::string> next_tokens(std::istream& in, const char* expected) {
  std::string line;
  if (!std::getline(in, line)) malformed(std::string("truncated before ") + expected);
  std::istringstream ls(line);
  std::vector<std::string> tokens;
  for (std::string tok; ls >> tok;) tokens.push_back(tok);
  if (tokens.empty() || tokens.front() != expected) malformed(std::string("expected ") + expected);
  return tokens;
}

}  // namespace

void write_codebook(const Codebook& cb, std::ostream& out) {
  out << "SIGWIN-CODEBOOK v1 n=" << cb.spec.n << " theta=" << format_double(cb.theta) << '\n';
  out << "spec overlap_max=" << format_double(cb.spec.overlap_max)
      << " min_fragment_pixels=" << cb.spec.min_fragment_pixels << " max_slide="
      << (cb.spec.max_slide ? std::to_string(*cb.spec.max_slide) : std::string("auto")) << '\n';
  out << "classes " << cb.classes.size() << '\n';
  for (std::size_t k = 0; k < cb.classes.size(); ++k) {
    const auto& cls = cb.classes[k];
    out << "class " << k + 1 << " frequency " << cls.frequency() << '\n';
    for (const Fragment& f : cls.members) {
      out << "fragment " << f.origin_window.origin.x << ' ' << f.origin_window.origin.y << ' '
          << (f.adjusted ? 1 : 0) << '\n';
      for (int r = 0; r < f.n; ++r) {
        for (int c = 0; c < f.n; ++c) out << (f.get(r, c) ? '1' : '0');
        out << '\n';
      }
    }
  }
  out << "end\n";
}

Codebook read_codebook(std::istream& in) {
  Codebook cb;
  auto header = next_tokens(in, "SIGWIN-CODEBOOK");
  if (header.size() != 4 || header[1] != "v1") malformed("unsupported header");
  cb.spec.n = parse_number<int>(keyed(header[2], "n"), "n");
  cb.theta = parse_number<double>(keyed(header[3], "theta"), "theta");

  auto spec = next_tokens(in, "spec");
  if (spec.size() != 4) malformed("bad spec line");
  cb.spec.overlap_max = parse_number<double>(keyed(spec[1], "overlap_max"), "overlap_max");
  cb.spec.min_fragment_pixels =
      parse_number<std::size_t>(keyed(spec[2], "min_fragment_pixels"), "min_fragment_pixels");
  const auto slide = keyed(spec[3], "max_slide");
  if (slide != "auto") cb.spec.max_slide = parse_number<int>(slide, "max_slide");
  try {
    cb.spec.validate();
  } catch (const Error& e) {
    malformed(e.what());
  }

  auto count_line = next_tokens(in, "classes");
  if (count_line.size() != 2) malformed("bad classes line");
  const auto class_count = parse_number<std::size_t>(count_line[1], "classes");

  const int n = cb.spec.n;
  for (std::size_t k = 0; k < class_count; ++k) {
    auto cls_line = next_tokens(in, "class");
    if (cls_line.size() != 4 || cls_line[2] != "frequency") malformed("bad class line");
    if (parse_number<std::size_t>(cls_line[1], "class index") != k + 1) {
      malformed("class index out of order");
    }
    const auto freq = parse_number<std::size_t>(cls_line[3], "frequency");
    if (freq == 0) malformed("empty class");

    PatternClass cls;
    for (std::size_t m = 0; m < freq; ++m) {
      auto frag_line = next_tokens(in, "fragment");
      if (frag_line.size() != 4) malformed("bad fragment line");
      Fragment f(n);
      f.origin_window = {{parse_number<int>(frag_line[1], "origin x"),
                          parse_number<int>(frag_line[2], "origin y")},
                         n};
      const int adjusted = parse_number<int>(frag_line[3], "adjusted");
      if (adjusted != 0 && adjusted != 1) malformed("bad adjusted flag");
      f.adjusted = adjusted == 1;
      for (int r = 0; r < n; ++r) {
        std::string row;
        if (!std::getline(in, row)) malformed("truncated fragment");
        if (static_cast<int>(row.size()) != n) malformed("fragment row has wrong width");
        for (int c = 0; c < n; ++c) {
          if (row[c] != '0' && row[c] != '1') malformed("fragment row has bad character");
          f.set(r, c, row[c] == '1');
        }
      }
      cls.members.push_back(std::move(f));
    }
    cb.classes.push_back(std::move(cls));
  }
  auto end = next_tokens(in, "end");
  if (end.size() != 1) malformed("bad end line");
  return cb;
}

void save_codebook(const Codebook& cb, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_codebook(cb, out);
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

Codebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_codebook(in);
}

}  // namespace sigwin
