#pragma once

#include "graypatch/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace graypatch {

namespace detail {

// One output coordinate of a half-pixel-centred bilinear mapping.
struct LinearTap {
    int lo;
    int hi;
    double frac;
};

inline std::vector<LinearTap> linear_taps(int in_size, int out_size) {
    std::vector<LinearTap> taps(static_cast<std::size_t>(out_size));
    const double scale = static_cast<double>(in_size) / static_cast<double>(out_size);
    for (int i = 0; i < out_size; ++i) {
        double src = (i + 0.5) * scale - 0.5;
        src = std::clamp(src, 0.0, static_cast<double>(in_size - 1));
        const int lo = static_cast<int>(std::floor(src));
        const int hi = std::min(lo + 1, in_size - 1);
        taps[static_cast<std::size_t>(i)] = {lo, hi, src - lo};
    }
    return taps;
}

} // namespace detail

/// Bilinear resampling with half-pixel centres and border clamping, used for
/// both shrinking and enlarging. Identical dimensions return a copy.
inline ImageBuffer resize_bilinear(const ImageBuffer& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) {
        throw image_error("resize_bilinear: target must be positive, got " + std::to_string(out_w) + "x" +
                          std::to_string(out_h));
    }
    if (img.empty()) throw image_error("resize_bilinear: empty input");
    if (out_w == img.width() && out_h == img.height()) return img;

    const int ch = img.channels();
    const auto xs = detail::linear_taps(img.width(), out_w);
    const auto ys = detail::linear_taps(img.height(), out_h);

    ImageBuffer out(out_w, out_h, ch);
    for (int y = 0; y < out_h; ++y) {
        const auto& ty = ys[static_cast<std::size_t>(y)];
        for (int x = 0; x < out_w; ++x) {
            const auto& tx = xs[static_cast<std::size_t>(x)];
            for (int c = 0; c < ch; ++c) {
                const double top = img.at(tx.lo, ty.lo, c) * (1.0 - tx.frac) + img.at(tx.hi, ty.lo, c) * tx.frac;
                const double bot = img.at(tx.lo, ty.hi, c) * (1.0 - tx.frac) + img.at(tx.hi, ty.hi, c) * tx.frac;
                out.at(x, y, c) = round_to_u8(top * (1.0 - ty.frac) + bot * ty.frac);
            }
        }
    }
    return out;
}

} // namespace graypatch
