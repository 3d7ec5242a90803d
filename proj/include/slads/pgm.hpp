#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "slads/image.hpp"

namespace slads {

/// Decoded binary graymap. Only 8-bit "P5" files are accepted.
struct Graymap {
    Dims dims;
    int maxval = 255;
    std::vector<std::uint8_t> pixels;
};

Graymap parse_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(Dims dims, std::span<const std::uint8_t> pixels);

GroundTruthImage load_image(const std::filesystem::path& path);

void write_pgm(const std::filesystem::path& path, Dims dims, std::span<const std::uint8_t> pixels);
/// Values are rounded half away from zero and clamped to 0..255.
void write_pgm(const std::filesystem::path& path, const ImageGrid& image);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace slads
