#include "droplab/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <iterator>

#include "droplab/error.hpp"

namespace droplab::io {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

namespace {

class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Reads one whitespace-delimited token, skipping '#' comments.
  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !is_space(bytes_[pos_])) out.push_back(static_cast<char>(bytes_[pos_++]));
    return out;
  }

  long number() {
    const std::string tok = token();
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw Error(ErrorCode::UnsupportedPixelFormat, "malformed PGM header");
    if (tok.size() > 9) throw Error(ErrorCode::UnsupportedPixelFormat, "PGM header value too large");
    return std::stol(tok);
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_]))
      throw Error(ErrorCode::UnsupportedPixelFormat, "malformed PGM header");
    return pos_ + 1;
  }

 private:
  static bool is_space(std::uint8_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  PnmHeaderReader reader(bytes);
  const std::string magic = reader.token();
  if (magic != "P5") throw Error(ErrorCode::UnsupportedPixelFormat, "expected binary PGM (P5), found '" + magic + "'");
  const long width = reader.number();
  const long height = reader.number();
  const long maxval = reader.number();
  if (width <= 0 || height <= 0) throw Error(ErrorCode::UnsupportedPixelFormat, "PGM has zero size");
  if (maxval != 255) throw Error(ErrorCode::UnsupportedPixelFormat, "PGM maxval must be 255");
  const std::size_t offset = reader.raster_offset();
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() < offset + count) throw Error(ErrorCode::UnsupportedPixelFormat, "PGM raster truncated");
  std::vector<std::uint8_t> pixels(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                                   bytes.begin() + static_cast<std::ptrdiff_t>(offset + count));
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  const std::string header =
      "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels().begin(), image.pixels().end());
  return out;
}

namespace {

struct PngReadState {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void png_read_callback(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->pos + length > state->bytes.size()) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, state->bytes.data() + state->pos, length);
  state->pos += length;
}

void png_write_callback(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void png_flush_callback(png_structp) {}

[[noreturn]] void png_error_callback(png_structp png, png_const_charp message) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text != nullptr) *text = message;
  png_longjmp(png, 1);
}

void png_warning_callback(png_structp, png_const_charp) {}

}  // namespace

namespace {

struct PngDecoded {
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  bool unsupported = false;
  std::string message;
};

// Keeps every object touched after setjmp behind a pointer that is never
// reassigned, so longjmp cannot clobber it.
bool run_png_decode(png_structp png, png_infop info, PngReadState* state, PngDecoded* out) {
  if (setjmp(png_jmpbuf(png)) != 0) return false;
  png_set_read_fn(png, state, png_read_callback);
  png_read_info(png, info);
  out->width = png_get_image_width(png, info);
  out->height = png_get_image_height(png, info);
  if (png_get_bit_depth(png, info) != 8 || png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY) {
    out->unsupported = true;
    return true;
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  out->pixels.resize(static_cast<std::size_t>(out->width) * out->height);
  out->rows.resize(out->height);
  for (png_uint_32 y = 0; y < out->height; ++y)
    out->rows[y] = out->pixels.data() + static_cast<std::size_t>(y) * out->width;
  png_read_image(png, out->rows.data());
  png_read_end(png, nullptr);
  return true;
}

struct PngEncodeJob {
  const GrayImage* image = nullptr;
  std::vector<png_text> text;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> out;
};

bool run_png_encode(png_structp png, png_infop info, PngEncodeJob* job) {
  if (setjmp(png_jmpbuf(png)) != 0) return false;
  png_set_write_fn(png, &job->out, png_write_callback, png_flush_callback);
  png_set_IHDR(png, info, static_cast<png_uint_32>(job->image->width()), static_cast<png_uint_32>(job->image->height()),
               8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (!job->text.empty()) png_set_text(png, info, job->text.data(), static_cast<int>(job->text.size()));
  png_write_info(png, info);
  png_write_image(png, job->rows.data());
  png_write_end(png, nullptr);
  return true;
}

}  // namespace

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
    throw Error(ErrorCode::UnsupportedPixelFormat, "not a PNG file");

  PngDecoded decoded;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &decoded.message, png_error_callback, png_warning_callback);
  if (png == nullptr) throw Error(ErrorCode::Io, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::Io, "png_create_info_struct failed");
  }
  PngReadState state{bytes, 0};
  const bool ok = run_png_decode(png, info, &state, &decoded);
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) throw Error(ErrorCode::UnsupportedPixelFormat, "PNG decode failed: " + decoded.message);
  if (decoded.unsupported) throw Error(ErrorCode::UnsupportedPixelFormat, "PNG must be 8-bit grayscale without alpha");
  return GrayImage(static_cast<int>(decoded.width), static_cast<int>(decoded.height), std::move(decoded.pixels));
}

std::vector<std::uint8_t> encode_png(const GrayImage& image,
                                     const std::vector<std::pair<std::string, std::string>>& text) {
  std::string message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, png_error_callback, png_warning_callback);
  if (png == nullptr) throw Error(ErrorCode::Io, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::Io, "png_create_info_struct failed");
  }

  PngEncodeJob job;
  job.image = &image;
  job.text.resize(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    job.text[i].compression = PNG_TEXT_COMPRESSION_NONE;
    job.text[i].key = const_cast<char*>(text[i].first.c_str());
    job.text[i].text = const_cast<char*>(text[i].second.c_str());
    job.text[i].text_length = text[i].second.size();
  }
  job.rows.resize(static_cast<std::size_t>(image.height()));
  for (int y = 0; y < image.height(); ++y)
    job.rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(image.row(y).data());

  const bool ok = run_png_encode(png, info, &job);
  png_destroy_write_struct(&png, &info);
  if (!ok) throw Error(ErrorCode::Io, "PNG encode failed: " + message);
  return std::move(job.out);
}

GrayImage load_image(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  static constexpr std::array<std::uint8_t, 4> kPngMagic{0x89, 'P', 'N', 'G'};
  if (bytes.size() >= 4 && std::equal(kPngMagic.begin(), kPngMagic.end(), bytes.begin())) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P') return decode_pgm(bytes);
  throw Error(ErrorCode::UnsupportedPixelFormat, path.filename().string() + " is neither PGM nor PNG");
}

}  // namespace droplab::io
