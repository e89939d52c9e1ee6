#pragma once

#include <filesystem>

#include "rrlab/image.hpp"

namespace rrlab {

// 8-bit RGB PNG with fixed encoder settings, so identical images produce
// byte-identical files.
void write_png(const std::filesystem::path& path, const Image& img);
Image read_png(const std::filesystem::path& path);

}  // namespace rrlab
