// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

using namespace graypatch;
using namespace graypatch::testing;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// 1. Rectangle geometry on a 64x128 canvas with the default ranges.
Verdict rect_geometry() {
    const AugmentConfig cfg;
    constexpr int width = 64, height = 128;
    const double area = width * height;
    const auto t0 = Clock::now();
    int accepted = 0, violations = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        auto rng = derive_stream(1, i);
        const auto s = sample_rect(width, height, cfg, rng);
        if (!s.rect) continue;
        ++accepted;
        const auto& r = *s.rect;
        const bool in_bounds = r.x >= 0 && r.y >= 0 && r.w >= 1 && r.h >= 1 && r.x + r.w <= width && r.y + r.h <= height;
        // Each side may be off by one pixel from the ideal continuous rectangle.
        const double aspect_hi = r.w > 1 ? (r.h + 1.0) / (r.w - 1.0) : std::numeric_limits<double>::infinity();
        const double aspect_lo = (r.h - 1.0) / (r.w + 1.0);
        const bool aspect_ok = aspect_hi >= cfg.aspect_min && aspect_lo <= cfg.aspect_max;
        const bool area_ok = (r.w + 1.0) * (r.h + 1.0) >= cfg.area_min * area &&
                             (r.w - 1.0) * (r.h - 1.0) <= cfg.area_max * area;
        violations += !(in_bounds && aspect_ok && area_ok);
    }
    const double secs = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d/10000 accepted, %d violations, %.3f s (limit 5 s)", accepted, violations, secs);
    return {violations == 0 && accepted > 0 && secs < 5.0, buf};
}

// 2. Forced LGPR: outside bytes untouched, inside equals an independent luma.
Verdict lgpr_locality() {
    AugmentConfig cfg;
    cfg.p_local = 1.0;
    long violations = 0;
    int patched = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const auto img = random_image(64, 128, 500000 + i);
        auto rng = derive_stream(2, i);
        const auto res = lgpr(img, cfg, rng);
        if (!res.rect) continue;
        ++patched;
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                const bool inside = x >= res.rect->x && x < res.rect->x + res.rect->w && y >= res.rect->y &&
                                    y < res.rect->y + res.rect->h;
                for (int c = 0; c < 3; ++c) {
                    const int want =
                        inside ? reference_luma(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2)) : img.at(x, y, c);
                    violations += res.image.at(x, y, c) != want;
                }
            }
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d/1000 images patched, %ld sample violations", patched, violations);
    return {violations == 0 && patched == 1000, buf};
}

// 3. Gate statistics at N = 100,000.
Verdict gate_statistics() {
    const auto t0 = Clock::now();
    const std::uint64_t n = 100000;
    const auto tiny = random_image(4, 8, 3);
    AugmentConfig cfg; // p_g = 0.05, p_l = 0.4
    long ggpr = 0, lgpr_fired = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        auto g = derive_stream(30, i);
        ggpr += ggpr_gate(tiny, g.uniform(), cfg.p_global).fired;
        auto l = derive_stream(31, i);
        lgpr_fired += lgpr(tiny, cfg, l).fired;
    }
    const double secs = seconds_since(t0);
    const bool ok = std::abs(ggpr - 5000) <= 276 && std::abs(lgpr_fired - 40000) <= 620 && secs < 30.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "GGPR %ld (5000 +/- 276), LGPR %ld (40000 +/- 620), %.3f s (limit 30 s)", ggpr,
                  lgpr_fired, secs);
    return {ok, buf};
}

// 4. Multi-modal partition frequencies with the default shares.
Verdict partition_frequencies() {
    const DefenseConfig cfg;
    const std::uint64_t n = 100000;
    long counts[4] = {0, 0, 0, 0};
    for (std::uint64_t i = 0; i < n; ++i) {
        auto rng = derive_stream(4, i);
        ++counts[static_cast<int>(mmd_classify(rng.uniform(), cfg))];
    }
    const double shares[4] = {0.80, 0.10, 0.05, 0.05}; // pass, gray, gray fuse, sketch fuse
    bool ok = true;
    std::string detail;
    const char* names[4] = {"pass", "gray", "gray_fuse", "sketch_fuse"};
    for (int k = 0; k < 4; ++k) {
        const double bound = four_sigma(static_cast<double>(n), shares[k]);
        ok = ok && std::abs(counts[k] - shares[k] * static_cast<double>(n)) <= bound;
        char buf[80];
        std::snprintf(buf, sizeof buf, "%s%s %ld (%.0f +/- %.0f)", k ? ", " : "", names[k], counts[k],
                      shares[k] * static_cast<double>(n), bound);
        detail += buf;
    }
    return {ok, detail};
}

// 5. Fusion over 500 images and all six channel subsets.
Verdict fusion_correctness() {
    long violations = 0;
    std::vector<ChannelSet> subsets(single_channel_sets.begin(), single_channel_sets.end());
    subsets.insert(subsets.end(), channel_pair_sets.begin(), channel_pair_sets.end());
    for (std::uint64_t i = 0; i < 500; ++i) {
        const auto img = random_image(32, 64, 700000 + i);
        const auto plane = random_image(32, 64, 900000 + i, 1);
        for (const auto set : subsets) {
            const auto out = fuse_channels(img, plane, set);
            for (std::size_t p = 0; p < img.pixel_count(); ++p) {
                for (int c = 0; c < 3; ++c) {
                    const auto want = set.has(c) ? plane.data()[p] : img.data()[3 * p + static_cast<std::size_t>(c)];
                    violations += out.data()[3 * p + static_cast<std::size_t>(c)] != want;
                }
            }
        }
    }
    return {violations == 0, std::to_string(violations) + " violations over 500 images x 6 subsets"};
}

// 6. Resize defense against a one-pixel checkerboard.
Verdict resize_attenuation() {
    // Threshold 0.90; an independent numpy implementation of the same
    // kernel measured 0.9518 before this value was frozen.
    ImageBuffer img(128, 384, 3);
    for (int y = 0; y < 384; ++y)
        for (int x = 0; x < 128; ++x)
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = (x + y) % 2 == 0 ? 128 + 32 : 128 - 32;
    const DefenseConfig cfg; // 110x50 -> 384x128 (height x width)
    const auto out = resize_defense(img, cfg);
    const double reduction = 1.0 - residual_energy(out) / residual_energy(img);
    char buf[128];
    std::snprintf(buf, sizeof buf, "energy reduction %.4f (>= 0.90), output %dx%d (height x width)", reduction,
                  out.height(), out.width());
    return {reduction >= 0.90 && out.width() == 128 && out.height() == 384, buf};
}

// 7. Worker-count independence and replay on a 200-image corpus.
Verdict determinism() {
    ScratchDir in("acc_in"), out1("acc_w1"), out8("acc_w8");
    write_corpus(in.path(), 200, 12345);
    const auto entries = walk_dataset(in.path()).entries;
    if (entries.size() != 200) return {false, "corpus walk found " + std::to_string(entries.size()) + " files"};
    int mismatched_modes = 0;
    long replay_failures = 0, records = 0;
    for (Mode m : {Mode::ggpr, Mode::lgpr, Mode::combined, Mode::mmd, Mode::resize_defense}) {
        PipelineConfig cfg;
        cfg.mode = m;
        const auto sub = std::string(to_string(m));
        const auto r1 = process_batch(entries, in.path(), out1.path() / sub, cfg, 2024, 1);
        const auto r8 = process_batch(entries, in.path(), out8.path() / sub, cfg, 2024, 8);
        const auto m1 = write_manifest(r1.records);
        if (m1 != write_manifest(r8.records) || !same_tree(out1.path() / sub, out8.path() / sub)) ++mismatched_modes;
        for (const auto& rec : read_manifest(m1)) {
            ++records;
            if (!rec.ok() || replay(rec, load_image(in.path() / rec.path)) != load_image(out1.path() / sub / rec.output)) {
                ++replay_failures;
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d/5 modes differ between 1 and 8 workers, %ld/%ld replays failed",
                  mismatched_modes, replay_failures, records);
    return {mismatched_modes == 0 && replay_failures == 0 && records == 1000, buf};
}

// 8. Zero probabilities leave every input untouched.
Verdict identity_degenerations() {
    AugmentConfig aug;
    aug.p_local = 0.0;
    aug.p_global = 0.0;
    DefenseConfig def;
    def.p_gray = def.p_gray_fuse = def.p_sketch_fuse = 0.0;
    int lgpr_bad = 0, ggpr_bad = 0, mmd_bad = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        const auto img = random_image(16 + static_cast<int>(i % 50), 32 + static_cast<int>(i % 17), 800000 + i);
        auto l = derive_stream(8, i);
        lgpr_bad += lgpr(img, aug, l).image != img;
        auto g = derive_stream(9, i);
        ggpr_bad += ggpr_gate(img, g.uniform(), aug.p_global).image != img;
        auto d = derive_stream(10, i);
        mmd_bad += mmd_apply(img, def, d).image != img;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "changed images: lgpr %d, ggpr %d, mmd %d (of 500 each)", lgpr_bad, ggpr_bad,
                  mmd_bad);
    return {lgpr_bad == 0 && ggpr_bad == 0 && mmd_bad == 0, buf};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"1 rectangle geometry", rect_geometry},
        {"2 LGPR locality", lgpr_locality},
        {"3 gate statistics", gate_statistics},
        {"4 multi-modal partition", partition_frequencies},
        {"5 fusion correctness", fusion_correctness},
        {"6 resize-defense attenuation", resize_attenuation},
        {"7 determinism and replay", determinism},
        {"8 identity degenerations", identity_degenerations},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v{false, ""};
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        std::printf("[%s] %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
