#pragma once

#include <cstdint>
#include <vector>

#include "rrlab/types.hpp"

namespace rrlab {

// RGB image with values in [0,1]. Pixels are stored channels-as-rows: px is
// 3 x (h*w) with column index y*w + x, matching the feature-map layout used
// by the denoiser.
struct Image {
    int h = 0;
    int w = 0;
    Mat px;

    Image() = default;
    Image(int height, int width) : h(height), w(width), px(Mat::Zero(3, height * width)) {}

    Real& at(int c, int x, int y) { return px(c, y * w + x); }
    Real at(int c, int x, int y) const { return px(c, y * w + x); }

    void clamp01() { px = px.cwiseMax(Real(0)).cwiseMin(Real(1)); }
};

std::vector<uint8_t> to_bytes_rgb8(const Image& img);
Image from_bytes_rgb8(const std::vector<uint8_t>& bytes, int h, int w);

uint64_t hash_image(const Image& img);

}  // namespace rrlab
