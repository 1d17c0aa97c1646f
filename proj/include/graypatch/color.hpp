#pragma once

#include "graypatch/image.hpp"

#include <cstdint>

namespace graypatch {

/// BT.601 luma, round-half-up. Integer weights keep the .5 ties exact.
constexpr std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    const unsigned acc = 299u * r + 587u * g + 114u * b + 500u;
    return static_cast<std::uint8_t>(acc / 1000u);
}

inline ImageBuffer to_grayscale(const ImageBuffer& img) {
    require_channels(img, 3, "to_grayscale");
    ImageBuffer out(img.width(), img.height(), 1);
    const auto src = img.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
        dst[i] = luma(src[3 * i], src[3 * i + 1], src[3 * i + 2]);
    }
    return out;
}

inline ImageBuffer gray_to_rgb(const ImageBuffer& img) {
    require_channels(img, 1, "gray_to_rgb");
    ImageBuffer out(img.width(), img.height(), 3);
    const auto src = img.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = src[i];
    }
    return out;
}

/// 3-channel image whose three planes all hold the luma of `img`.
inline ImageBuffer grayscale_rgb(const ImageBuffer& img) { return gray_to_rgb(to_grayscale(img)); }

/// Promotes a luma plane to RGB; 3-channel input is returned as-is.
inline ImageBuffer ensure_rgb(ImageBuffer img) {
    if (img.channels() == 1) return gray_to_rgb(img);
    return img;
}

} // namespace graypatch
