#include "rrlab/image.hpp"

#include <cmath>

#include "rrlab/hash.hpp"

namespace rrlab {

std::vector<uint8_t> to_bytes_rgb8(const Image& img) {
    std::vector<uint8_t> out(static_cast<size_t>(img.h) * img.w * 3);
    size_t k = 0;
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int c = 0; c < 3; ++c) {
                float v = std::min(1.0f, std::max(0.0f, img.at(c, x, y)));
                out[k++] = static_cast<uint8_t>(std::lround(v * 255.0f));
            }
    return out;
}

Image from_bytes_rgb8(const std::vector<uint8_t>& bytes, int h, int w) {
    Image img(h, w);
    size_t k = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(c, x, y) = static_cast<Real>(bytes[k++]) / Real(255);
    return img;
}

uint64_t hash_image(const Image& img) {
    auto bytes = to_bytes_rgb8(img);
    return fnv1a64(bytes.data(), bytes.size());
}

}  // namespace rrlab
