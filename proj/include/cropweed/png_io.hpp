#pragma once

#include <string>

#include "cropweed/image.hpp"

namespace cropweed {

// Reads any 8/16-bit gray/palette/RGB/RGBA PNG as 8-bit RGB.
RgbImage read_png(const std::string& path);

void write_png(const std::string& path, const RgbImage& img);

}  // namespace cropweed
