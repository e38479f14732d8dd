#include <png.h>

#include <cctype>
#include <fstream>
#include <string>

#include "sigwin/error.hpp"
#include "sigwin/image.hpp"

namespace sigwin {

namespace {

std::uint8_t luma(unsigned r, unsigned g, unsigned b) {
  return static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!token.empty()) break;
    } else {
      token.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  return token;
}

int parse_header_int(const std::string& token, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const int value = std::stoi(token, &used);
    if (used != token.size() || value < 0) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kFormat, "bad PGM header in " + path.string());
  }
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());

  if (pnm_token(in) != "P5") {
    throw Error(ErrorCode::kFormat, path.string() + " is not a binary PGM (P5)");
  }
  const int width = parse_header_int(pnm_token(in), path);
  const int height = parse_header_int(pnm_token(in), path);
  const int maxval = parse_header_int(pnm_token(in), path);
  if (width < 1 || height < 1 || maxval < 1 || maxval > 255) {
    throw Error(ErrorCode::kFormat, "unsupported PGM geometry in " + path.string());
  }

  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(pixels.size())) {
    throw Error(ErrorCode::kFormat, "truncated PGM data in " + path.string());
  }
  if (maxval != 255) {
    for (auto& v : pixels) v = static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
  }
  return GrayImage(width, height, std::move(pixels));
}

GrayImage read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    const std::string msg = image.message;
    png_image_free(&image);
    const bool missing = !std::filesystem::exists(path);
    throw Error(missing ? ErrorCode::kIo : ErrorCode::kFormat,
                "cannot read PNG " + path.string() + ": " + msg);
  }
  image.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kFormat, "cannot decode PNG " + path.string() + ": " + msg);
  }

  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  std::vector<std::uint8_t> gray(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const unsigned r = rgba[4 * i], g = rgba[4 * i + 1], b = rgba[4 * i + 2];
    const unsigned a = rgba[4 * i + 3];
    // Transparent regions read as paper.
    const unsigned y = luma(r, g, b);
    gray[i] = static_cast<std::uint8_t>((y * a + 255 * (255 - a) + 127) / 255);
  }
  return GrayImage(width, height, std::move(gray));
}

GrayImage read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  char magic[8] = {};
  in.read(magic, sizeof magic);
  if (in.gcount() >= 2 && magic[0] == 'P' && magic[1] == '5') return read_pgm(path);
  if (in.gcount() == 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(magic), 0, 8) == 0) {
    return read_png(path);
  }
  throw Error(ErrorCode::kFormat, path.string() + " is neither PGM (P5) nor PNG");
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels().data()),
            static_cast<std::streamsize>(img.pixels().size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

void write_pbm(const BinaryImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "P4\n" << img.width() << ' ' << img.height() << '\n';
  const int row_bytes = (img.width() + 7) / 8;
  std::vector<char> row(static_cast<std::size_t>(row_bytes));
  for (int y = 0; y < img.height(); ++y) {
    std::fill(row.begin(), row.end(), 0);
    for (int x = 0; x < img.width(); ++x) {
      if (img.get(x, y)) row[x / 8] = static_cast<char>(row[x / 8] | (0x80 >> (x % 8)));
    }
    out.write(row.data(), row_bytes);
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

void write_png(const GrayImage& img, const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, img.pixels().data(), 0,
                               nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kIo, "cannot write PNG " + path.string() + ": " + msg);
  }
}

}  // namespace sigwin
