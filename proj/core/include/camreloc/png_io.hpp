#pragma once

#include <string>

#include "camreloc/image.hpp"

namespace camreloc {

/// 8-bit grayscale PNG. Intensities map linearly to [0,255] on write and back
/// to k/255 on read; masks are not stored (loaded images are fully valid).
void write_png_gray8(const GrayImage& img, const std::string& path);
GrayImage read_png_gray8(const std::string& path);

}  // namespace camreloc
