#pragma once

#include "graypatch/color.hpp"
#include "graypatch/filter.hpp"
#include "graypatch/image.hpp"
#include "graypatch/random.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace graypatch {

class config_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Gate probabilities and rectangle-sampling ranges for the grayscale patch
/// transforms. Area bounds are fractions of the image area; aspect bounds
/// are height/width ratios.
struct AugmentConfig {
    double p_local = 0.4;   // LGPR gate
    double p_global = 0.05; // GGPR gate
    double area_min = 0.02;
    double area_max = 0.4;
    double aspect_min = 0.3;
    double aspect_max = 3.33;
    int max_attempts = 100;

    void validate() const {
        auto prob = [](double p, const char* name) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw config_error(std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
            }
        };
        prob(p_local, "p_l");
        prob(p_global, "p_g");
        if (!(area_min > 0.0 && area_min <= area_max && area_max <= 1.0)) {
            throw config_error("area range must satisfy 0 < min <= max <= 1, got [" + std::to_string(area_min) +
                               ", " + std::to_string(area_max) + "]");
        }
        if (!(aspect_min > 0.0 && aspect_min <= aspect_max && std::isfinite(aspect_max))) {
            throw config_error("aspect range must satisfy 0 < min <= max, got [" + std::to_string(aspect_min) +
                               ", " + std::to_string(aspect_max) + "]");
        }
        if (max_attempts < 1) throw config_error("max_attempts must be at least 1");
    }
};

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    [[nodiscard]] bool fits(int width, int height) const noexcept {
        return x >= 0 && y >= 0 && w >= 1 && h >= 1 && x + w <= width && y + h <= height;
    }
    [[nodiscard]] bool contains(int px, int py) const noexcept {
        return px >= x && px < x + w && py >= y && py < y + h;
    }
    friend bool operator==(const Rect&, const Rect&) = default;
};

enum class SketchOperator { dodge, sobel };

inline std::string_view to_string(SketchOperator op) noexcept { return op == SketchOperator::dodge ? "dodge" : "sobel"; }

inline SketchOperator parse_sketch_operator(std::string_view name) {
    if (name == "dodge") return SketchOperator::dodge;
    if (name == "sobel") return SketchOperator::sobel;
    throw config_error("unknown sketch operator '" + std::string(name) + "' (expected dodge or sobel)");
}

struct SketchParams {
    SketchOperator op = SketchOperator::dodge;
    double sigma = 3.0;

    void validate() const {
        if (!(sigma > 0.0) || !std::isfinite(sigma)) {
            throw config_error("sketch sigma must be positive, got " + std::to_string(sigma));
        }
    }
};

// ---------------------------------------------------------------------------
// Channel subsets
// ---------------------------------------------------------------------------

/// A subset of {R, G, B} stored as a bit mask (bit 0 = R).
class ChannelSet {
public:
    constexpr ChannelSet() = default;
    constexpr explicit ChannelSet(unsigned mask) : mask_(mask & 7u) {}

    static constexpr ChannelSet red() { return ChannelSet(1u); }
    static constexpr ChannelSet green() { return ChannelSet(2u); }
    static constexpr ChannelSet blue() { return ChannelSet(4u); }

    [[nodiscard]] constexpr unsigned mask() const noexcept { return mask_; }
    [[nodiscard]] constexpr bool has(int channel) const noexcept { return (mask_ >> channel) & 1u; }
    [[nodiscard]] constexpr int size() const noexcept {
        return static_cast<int>((mask_ & 1u) + ((mask_ >> 1) & 1u) + ((mask_ >> 2) & 1u));
    }

    constexpr ChannelSet operator|(ChannelSet o) const noexcept { return ChannelSet(mask_ | o.mask_); }
    friend constexpr bool operator==(ChannelSet, ChannelSet) = default;

    /// Letters in RGB order, e.g. "RB".
    [[nodiscard]] std::string letters() const {
        std::string s;
        if (has(0)) s += 'R';
        if (has(1)) s += 'G';
        if (has(2)) s += 'B';
        return s;
    }

    static ChannelSet parse(std::string_view letters) {
        unsigned mask = 0;
        for (char c : letters) {
            switch (c) {
            case 'R': case 'r': mask |= 1u; break;
            case 'G': case 'g': mask |= 2u; break;
            case 'B': case 'b': mask |= 4u; break;
            default: throw config_error("bad channel letter '" + std::string(1, c) + "'");
            }
        }
        return ChannelSet(mask);
    }

private:
    unsigned mask_ = 0;
};

/// The six fusable subsets, singletons first, each group in RGB order.
inline constexpr std::array<ChannelSet, 3> single_channel_sets{ChannelSet(1u), ChannelSet(2u), ChannelSet(4u)};
inline constexpr std::array<ChannelSet, 3> channel_pair_sets{ChannelSet(3u), ChannelSet(5u), ChannelSet(6u)};

// ---------------------------------------------------------------------------
// GGPR
// ---------------------------------------------------------------------------

struct GgprResult {
    ImageBuffer image;
    bool fired = false;
};

/// Whole-image grayscale with probability p_global, decided by the caller's draw `u`.
inline GgprResult ggpr_gate(const ImageBuffer& img, double u, double p_global) {
    require_channels(img, 3, "ggpr_gate");
    if (u < p_global) return {grayscale_rgb(img), true};
    return {img, false};
}

// ---------------------------------------------------------------------------
// LGPR
// ---------------------------------------------------------------------------

/// Outcome of rectangle sampling, with the draws of the accepted attempt.
struct RectSample {
    std::optional<Rect> rect;
    int attempts = 0;
    double area = 0.0;   // S_e of the last attempt
    double aspect = 0.0; // r_e of the last attempt
};

/// Side lengths for a target area and height/width ratio.
struct RectExtent {
    int w;
    int h;
};

inline RectExtent rect_extent(double area, double aspect) noexcept {
    const double h = std::round(std::sqrt(area * aspect));
    const double w = std::round(std::sqrt(area / aspect));
    return {static_cast<int>(w), static_cast<int>(h)};
}

/// Rejection-samples a rectangle. Each attempt draws, in order, the area,
/// the aspect ratio, then the top-left x and y; an attempt is accepted when
/// the rectangle is non-empty and lies inside the image.
inline RectSample sample_rect(int width, int height, const AugmentConfig& cfg, RandomStream& rng) {
    if (width < 1 || height < 1) throw image_error("sample_rect: image dimensions must be positive");
    const double image_area = static_cast<double>(width) * static_cast<double>(height);
    RectSample out;
    for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
        const double area = rng.uniform(cfg.area_min, cfg.area_max) * image_area;
        const double aspect = rng.uniform(cfg.aspect_min, cfg.aspect_max);
        const auto [w, h] = rect_extent(area, aspect);
        const int x = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(width)));
        const int y = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(height)));
        out.attempts = attempt;
        out.area = area;
        out.aspect = aspect;
        const Rect r{x, y, w, h};
        if (r.fits(width, height)) {
            out.rect = r;
            return out;
        }
    }
    return out;
}

/// Replaces every pixel inside `rect` by its luma in all three channels.
inline void apply_gray_patch(ImageBuffer& img, const Rect& rect) {
    require_channels(img, 3, "apply_gray_patch");
    if (!rect.fits(img.width(), img.height())) throw image_error("apply_gray_patch: rectangle outside image");
    for (int y = rect.y; y < rect.y + rect.h; ++y) {
        for (int x = rect.x; x < rect.x + rect.w; ++x) {
            const auto g = luma(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
            img.at(x, y, 0) = img.at(x, y, 1) = img.at(x, y, 2) = g;
        }
    }
}

struct LgprResult {
    ImageBuffer image;
    double gate = 0.0;
    bool fired = false;     // gate opened
    int attempts = 0;       // rectangle attempts, 0 when the gate stayed shut
    std::optional<Rect> rect; // set only when a patch was applied
};

inline LgprResult lgpr(const ImageBuffer& img, const AugmentConfig& cfg, RandomStream& rng) {
    require_channels(img, 3, "lgpr");
    LgprResult out{img, rng.uniform(), false, 0, std::nullopt};
    if (out.gate >= cfg.p_local) return out;
    out.fired = true;
    const auto sample = sample_rect(img.width(), img.height(), cfg, rng);
    out.attempts = sample.attempts;
    if (sample.rect) {
        apply_gray_patch(out.image, *sample.rect);
        out.rect = sample.rect;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sketch and fusion
// ---------------------------------------------------------------------------

/// Pencil-sketch plane. `dodge` colour-dodges the luma with a blurred
/// negative of itself; `sobel` is the inverted gradient magnitude.
inline ImageBuffer sketch(const ImageBuffer& img, const SketchParams& params) {
    require_channels(img, 3, "sketch");
    params.validate();
    const ImageBuffer gray = to_grayscale(img);
    if (params.op == SketchOperator::sobel) {
        ImageBuffer out = sobel_magnitude(gray);
        for (auto& v : out.data()) v = static_cast<std::uint8_t>(255 - v);
        return out;
    }

    ImageBuffer inverted = gray;
    for (auto& v : inverted.data()) v = static_cast<std::uint8_t>(255 - v);
    const ImageBuffer blurred = gaussian_blur(inverted, params.sigma);

    ImageBuffer out(img.width(), img.height(), 1);
    const auto g = gray.data();
    const auto b = blurred.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        if (b[i] == 255) {
            dst[i] = 255;
        } else {
            const unsigned dodged = (static_cast<unsigned>(g[i]) * 255u) / (255u - b[i]);
            dst[i] = static_cast<std::uint8_t>(dodged > 255u ? 255u : dodged);
        }
    }
    return out;
}

/// Overwrites the selected channels of `rgb` with `plane`.
inline ImageBuffer fuse_channels(const ImageBuffer& rgb, const ImageBuffer& plane, ChannelSet channels) {
    require_channels(rgb, 3, "fuse_channels");
    require_channels(plane, 1, "fuse_channels");
    if (rgb.width() != plane.width() || rgb.height() != plane.height()) {
        throw image_error("fuse_channels: plane is " + std::to_string(plane.width()) + "x" +
                          std::to_string(plane.height()) + " but image is " + std::to_string(rgb.width()) + "x" +
                          std::to_string(rgb.height()));
    }
    if (channels.size() < 1 || channels.size() > 2) {
        throw image_error("fuse_channels: channel subset must hold 1 or 2 channels, got " +
                          std::to_string(channels.size()));
    }
    ImageBuffer out = rgb;
    auto dst = out.data();
    const auto src = plane.data();
    for (int c = 0; c < 3; ++c) {
        if (!channels.has(c)) continue;
        for (std::size_t i = 0; i < src.size(); ++i) dst[3 * i + static_cast<std::size_t>(c)] = src[i];
    }
    return out;
}

} // namespace graypatch
