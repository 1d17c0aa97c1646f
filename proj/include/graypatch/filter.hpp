#pragma once

#include "graypatch/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace graypatch {

/// Normalised 1-D Gaussian with radius ceil(3 * sigma).
inline std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw image_error("gaussian_kernel: sigma must be positive, got " + std::to_string(sigma));
    }
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (auto& w : k) w /= sum;
    return k;
}

/// Separable Gaussian over a single plane, clamp-to-border, unquantised.
/// Both passes accumulate in double; callers round once at the end.
inline std::vector<double> gaussian_blur_plane(const ImageBuffer& img, double sigma) {
    require_channels(img, 1, "gaussian_blur");
    const auto k = gaussian_kernel(sigma);
    const int radius = static_cast<int>(k.size() / 2);
    const int w = img.width();
    const int h = img.height();
    const auto src = img.data();

    std::vector<double> horiz(img.pixel_count());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int sx = std::clamp(x + i, 0, w - 1);
                acc += k[static_cast<std::size_t>(i + radius)] * src[static_cast<std::size_t>(y) * w + sx];
            }
            horiz[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }

    std::vector<double> out(img.pixel_count());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int sy = std::clamp(y + i, 0, h - 1);
                acc += k[static_cast<std::size_t>(i + radius)] * horiz[static_cast<std::size_t>(sy) * w + x];
            }
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return out;
}

inline ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma) {
    const auto blurred = gaussian_blur_plane(img, sigma);
    ImageBuffer out(img.width(), img.height(), 1);
    auto dst = out.data();
    for (std::size_t i = 0; i < blurred.size(); ++i) dst[i] = round_to_u8(blurred[i]);
    return out;
}

/// Sobel gradient magnitude, rounded and clamped to 255, clamp-to-border.
inline ImageBuffer sobel_magnitude(const ImageBuffer& img) {
    require_channels(img, 1, "sobel_magnitude");
    const int w = img.width();
    const int h = img.height();
    ImageBuffer out(w, h, 1);
    auto px = [&](int x, int y) -> int { return img.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int gx = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) -
                           (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
            const int gy = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) -
                           (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
            out.at(x, y) = round_to_u8(std::sqrt(static_cast<double>(gx * gx + gy * gy)));
        }
    }
    return out;
}

} // namespace graypatch
