#pragma once

#include "graypatch/color.hpp"
#include "graypatch/image.hpp"
#include "graypatch/random.hpp"
#include "graypatch/resize.hpp"
#include "graypatch/transforms.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace graypatch {

/// Training-time multi-modal partition plus the inference-time resize geometry.
///
/// The unit interval is split as
///   [0, p3)            -> sketch fusion
///   [p3, p3+p2)        -> grayscale fusion
///   [p3+p2, p1+p2+p3)  -> whole-image grayscale
///   [p1+p2+p3, 1)      -> unchanged
/// so the defaults send 10% of images to grayscale, fuse 5% with their luma
/// and 5% with their sketch.
struct DefenseConfig {
    double p_gray = 0.10;        // p1
    double p_gray_fuse = 0.05;   // p2
    double p_sketch_fuse = 0.05; // p3
    double two_channel_prob = 0.5;
    SketchParams sketch{};
    // Downscale then upscale geometry; Market-1501 frames are 64 wide, 128 tall.
    int down_w = 50;
    int down_h = 110;
    int up_w = 128;
    int up_h = 384;

    void validate_partition() const {
        auto prob = [](double p, const char* name) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw config_error(std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
            }
        };
        prob(p_gray, "p_gray");
        prob(p_gray_fuse, "p_gray_fuse");
        prob(p_sketch_fuse, "p_sketch_fuse");
        prob(two_channel_prob, "two_channel_prob");
        if (p_gray + p_gray_fuse + p_sketch_fuse > 1.0 + 1e-12) {
            throw config_error("p_gray + p_gray_fuse + p_sketch_fuse must not exceed 1, got " +
                               std::to_string(p_gray + p_gray_fuse + p_sketch_fuse));
        }
        sketch.validate();
    }

    void validate_geometry() const {
        if (down_w < 1 || down_h < 1 || up_w < 1 || up_h < 1) {
            throw config_error("resize geometry must be positive");
        }
        if (!(down_w < up_w && down_h < up_h)) {
            throw config_error("resize defense must downscale: down " + std::to_string(down_w) + "x" +
                               std::to_string(down_h) + " is not smaller than up " + std::to_string(up_w) + "x" +
                               std::to_string(up_h));
        }
    }

    void validate() const {
        validate_partition();
        validate_geometry();
    }
};

enum class DefenseKind { pass_through, pure_gray, gray_fuse, sketch_fuse };

inline std::string_view to_string(DefenseKind k) noexcept {
    switch (k) {
    case DefenseKind::pass_through: return "pass_through";
    case DefenseKind::pure_gray: return "pure_gray";
    case DefenseKind::gray_fuse: return "gray_fuse";
    case DefenseKind::sketch_fuse: return "sketch_fuse";
    }
    return "pass_through";
}

inline DefenseKind parse_defense_kind(std::string_view s) {
    if (s == "pass_through") return DefenseKind::pass_through;
    if (s == "pure_gray") return DefenseKind::pure_gray;
    if (s == "gray_fuse") return DefenseKind::gray_fuse;
    if (s == "sketch_fuse") return DefenseKind::sketch_fuse;
    throw config_error("unknown defense outcome '" + std::string(s) + "'");
}

struct DefenseOutcome {
    DefenseKind kind = DefenseKind::pass_through;
    std::optional<ChannelSet> channels; // present iff a fusion kind
    std::vector<double> draws;          // uniforms consumed, in order

    friend bool operator==(const DefenseOutcome&, const DefenseOutcome&) = default;
};

inline DefenseKind mmd_classify(double u, const DefenseConfig& cfg) noexcept {
    const double sketch_end = cfg.p_sketch_fuse;
    const double fuse_end = sketch_end + cfg.p_gray_fuse;
    const double gray_end = fuse_end + cfg.p_gray;
    if (u < sketch_end) return DefenseKind::sketch_fuse;
    if (u < fuse_end) return DefenseKind::gray_fuse;
    if (u < gray_end) return DefenseKind::pure_gray;
    return DefenseKind::pass_through;
}

/// Picks the subset size (two with `two_channel_prob`, else one), then a
/// subset of that size uniformly. Consumes two draws.
inline ChannelSet draw_channels(RandomStream& rng, double two_channel_prob, std::vector<double>& draws) {
    const double size_draw = rng.uniform();
    const double pick_draw = rng.uniform();
    draws.push_back(size_draw);
    draws.push_back(pick_draw);
    const auto& pool = size_draw < two_channel_prob ? channel_pair_sets : single_channel_sets;
    auto idx = static_cast<std::size_t>(pick_draw * 3.0);
    if (idx > 2) idx = 2;
    return pool[idx];
}

/// Applies a decided outcome; shared by mmd_apply and replay.
inline ImageBuffer apply_defense_outcome(const ImageBuffer& img, DefenseKind kind, std::optional<ChannelSet> channels,
                                         const SketchParams& sketch_params) {
    require_channels(img, 3, "mmd_apply");
    switch (kind) {
    case DefenseKind::pass_through:
        return img;
    case DefenseKind::pure_gray:
        return grayscale_rgb(img);
    case DefenseKind::gray_fuse:
        if (!channels) throw image_error("gray_fuse outcome without a channel subset");
        return fuse_channels(img, to_grayscale(img), *channels);
    case DefenseKind::sketch_fuse:
        if (!channels) throw image_error("sketch_fuse outcome without a channel subset");
        return fuse_channels(img, sketch(img, sketch_params), *channels);
    }
    return img;
}

struct DefenseResult {
    ImageBuffer image;
    DefenseOutcome outcome;
};

inline DefenseResult mmd_apply(const ImageBuffer& img, const DefenseConfig& cfg, RandomStream& rng) {
    require_channels(img, 3, "mmd_apply");
    DefenseOutcome outcome;
    const double u = rng.uniform();
    outcome.draws.push_back(u);
    outcome.kind = mmd_classify(u, cfg);
    if (outcome.kind == DefenseKind::gray_fuse || outcome.kind == DefenseKind::sketch_fuse) {
        outcome.channels = draw_channels(rng, cfg.two_channel_prob, outcome.draws);
    }
    ImageBuffer out = apply_defense_outcome(img, outcome.kind, outcome.channels, cfg.sketch);
    return {std::move(out), std::move(outcome)};
}

/// Shrinks to the defense size and enlarges back to the model input size,
/// discarding high-frequency structure such as adversarial noise.
inline ImageBuffer resize_defense(const ImageBuffer& img, const DefenseConfig& cfg) {
    return resize_bilinear(resize_bilinear(img, cfg.down_w, cfg.down_h), cfg.up_w, cfg.up_h);
}

} // namespace graypatch
