#pragma once

#include "graypatch/defense.hpp"
#include "graypatch/transforms.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace graypatch {

enum class Mode { ggpr, lgpr, combined, mmd, resize_defense };

inline std::string_view to_string(Mode m) noexcept {
    switch (m) {
    case Mode::ggpr: return "ggpr";
    case Mode::lgpr: return "lgpr";
    case Mode::combined: return "combined";
    case Mode::mmd: return "mmd";
    case Mode::resize_defense: return "resize_defense";
    }
    return "ggpr";
}

inline Mode parse_mode(std::string_view s) {
    if (s == "ggpr") return Mode::ggpr;
    if (s == "lgpr") return Mode::lgpr;
    if (s == "combined") return Mode::combined;
    if (s == "mmd") return Mode::mmd;
    if (s == "resize_defense") return Mode::resize_defense;
    throw config_error("unknown mode '" + std::string(s) + "'");
}

struct GgprTrace {
    double p = 0.0;
    double u = 0.0;
    bool fired = false;
    friend bool operator==(const GgprTrace&, const GgprTrace&) = default;
};

struct LgprTrace {
    double p = 0.0;
    double u = 0.0;
    bool fired = false;
    int attempts = 0;
    std::optional<Rect> rect;
    friend bool operator==(const LgprTrace&, const LgprTrace&) = default;
};

struct MmdTrace {
    double p_gray = 0.0;
    double p_gray_fuse = 0.0;
    double p_sketch_fuse = 0.0;
    double two_channel_prob = 0.0;
    SketchParams sketch{};
    DefenseOutcome outcome{};
    friend bool operator==(const MmdTrace& a, const MmdTrace& b) {
        return a.p_gray == b.p_gray && a.p_gray_fuse == b.p_gray_fuse && a.p_sketch_fuse == b.p_sketch_fuse &&
               a.two_channel_prob == b.two_channel_prob && a.sketch.op == b.sketch.op &&
               a.sketch.sigma == b.sketch.sigma && a.outcome == b.outcome;
    }
};

struct ResizeTrace {
    int down_w = 0;
    int down_h = 0;
    int up_w = 0;
    int up_h = 0;
    friend bool operator==(const ResizeTrace&, const ResizeTrace&) = default;
};

/// Audit entry for one dataset image. Together with the source image it
/// determines the output bytes without touching the random stream.
struct TransformRecord {
    std::uint64_t ordinal = 0;
    std::string path;
    std::string output;
    Mode mode = Mode::ggpr;
    std::uint64_t stream_key = 0;
    std::optional<std::string> error; // decode failure; nothing else is set

    int width = 0; // source dimensions
    int height = 0;
    int channels = 0;

    std::optional<GgprTrace> ggpr;
    std::optional<LgprTrace> lgpr;
    std::optional<MmdTrace> mmd;
    std::optional<ResizeTrace> resize;
    std::uint64_t draws = 0; // stream words consumed

    [[nodiscard]] bool ok() const noexcept { return !error.has_value(); }

    friend bool operator==(const TransformRecord&, const TransformRecord&) = default;
};

} // namespace graypatch
