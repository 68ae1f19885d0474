#pragma once

#include <filesystem>

#include "melscreen/image.hpp"

namespace melscreen {

// PNG / JPEG, 8-bit. Single-channel files are replicated into RGB.
RgbImage load_rgb(const std::filesystem::path& path);
GrayImage load_gray(const std::filesystem::path& path);

void save_gray_png(const std::filesystem::path& path, const GrayImage& img);

// Masks persist as 0/255 single-channel PNG.
void save_mask_png(const std::filesystem::path& path, const BinaryMask& mask);
BinaryMask load_mask_png(const std::filesystem::path& path);

}  // namespace melscreen
