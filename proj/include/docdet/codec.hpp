#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "docdet/image.hpp"

namespace docdet {

/// Decodes a PNG or JPEG stream into 8-bit RGB. Gray and palette inputs
/// are expanded; 16-bit channels are rejected. Throws DecodeError.
RgbImage decode_image(std::span<const uint8_t> bytes);

/// Reads just the pixel dimensions from a PNG or JPEG header without a
/// full decode. Throws DecodeError.
struct ImageDims {
    int width = 0;
    int height = 0;
};
ImageDims peek_image_size(std::span<const uint8_t> bytes);

std::vector<uint8_t> encode_png(const RgbImage& img);
std::vector<uint8_t> encode_png(const GrayImage& img);
std::vector<uint8_t> encode_jpeg(const RgbImage& img, int quality = 90);

RgbImage load_image_file(const std::string& path);
void save_bytes(const std::string& path, std::span<const uint8_t> bytes);
std::vector<uint8_t> read_file_bytes(const std::string& path);

}  // namespace docdet
