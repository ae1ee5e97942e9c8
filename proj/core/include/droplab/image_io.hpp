#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "droplab/image.hpp"

namespace droplab::io {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

// Binary PGM (P5) with maxval 255 only. Anything else is UnsupportedPixelFormat.
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);

// 8-bit grayscale PNG only (no palette, alpha, colour or 16-bit).
GrayImage decode_png(std::span<const std::uint8_t> bytes);

// Text entries are stored as tEXt chunks. No time chunk is written, so the
// output depends only on the arguments.
std::vector<std::uint8_t> encode_png(
    const GrayImage& image, const std::vector<std::pair<std::string, std::string>>& text = {});

// Dispatches on the file's magic bytes.
GrayImage load_image(const std::filesystem::path& path);

}  // namespace droplab::io
