#pragma once

#include "graypatch/graypatch.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>

namespace graypatch::cli {

/// Geometry as written on the command line: HEIGHTxWIDTH, the order in
/// which pedestrian crops are usually quoted (Market-1501 frames are 128x64).
struct Geometry {
    int height = 0;
    int width = 0;
};

inline Geometry parse_geometry(const std::string& text) {
    const auto x = text.find_first_of("xX*");
    auto bad = [&] { return config_error("malformed geometry '" + text + "' (expected HEIGHTxWIDTH, e.g. 110x50)"); };
    if (x == std::string::npos || x == 0 || x + 1 == text.size()) throw bad();
    auto number = [&](const std::string& s) {
        if (s.find_first_not_of("0123456789") != std::string::npos || s.size() > 6) throw bad();
        const int v = std::stoi(s);
        if (v < 1) throw bad();
        return v;
    };
    return {number(text.substr(0, x)), number(text.substr(x + 1))};
}

enum class Exit : int { ok = 0, usage = 1, io = 2 };

struct Options {
    std::string input;
    std::string output;
    std::string manifest;
    std::uint64_t seed = 0;
    int workers = 1;
    bool print_stats = false;

    std::string augment_mode = "both";
    AugmentConfig augment{};

    DefenseConfig defense{};
    std::string sketch_op = "dodge";
    std::string down = "110x50";
    std::string up = "384x128";

    std::string convert_op = "gray";
};

namespace detail {

inline void add_common(CLI::App& sub, Options& o) {
    sub.add_option("--input,-i", o.input, "Input dataset directory")->required();
    sub.add_option("--output,-o", o.output, "Output directory (PNG tree mirroring the input)")->required();
    sub.add_option("--seed", o.seed, "Master seed; each image draws from a stream keyed by (seed, ordinal)");
    sub.add_option("--workers,-j", o.workers, "Worker threads; results do not depend on this")
        ->check(CLI::PositiveNumber);
    sub.add_option("--manifest", o.manifest, "Write one JSON record per image to this file (default: none)");
    sub.add_flag("--print-stats", o.print_stats, "Print run statistics as JSON on stdout");
}

inline void add_sketch(CLI::App& sub, Options& o) {
    sub.add_option("--sketch-op", o.sketch_op, "Sketch operator")->check(CLI::IsMember({"dodge", "sobel"}));
    sub.add_option("--sketch-sigma", o.defense.sketch.sigma, "Blur sigma of the dodge sketch, in pixels")
        ->check(CLI::PositiveNumber);
}

inline int run_batch(const PipelineConfig& cfg, const Options& o, std::ostream& out, std::ostream& err) {
    namespace fs = std::filesystem;
    cfg.validate();
    const auto listing = walk_dataset(o.input);
    for (const auto& p : listing.problems) err << "warning: " << p << '\n';

    const auto result = process_batch(listing.entries, o.input, o.output, cfg, o.seed, o.workers);
    if (!o.manifest.empty()) {
        const fs::path mpath(o.manifest);
        if (mpath.has_parent_path()) fs::create_directories(mpath.parent_path());
        write_text_file(mpath, write_manifest(result.records));
    }
    for (const auto& r : result.records) {
        if (!r.ok()) err << "skipped " << r.path << ": " << *r.error << '\n';
    }
    err << "processed " << result.records.size() << " images, " << result.failed() << " skipped\n";
    if (o.print_stats) out << stats_to_json(compute_stats(result.records)).dump(2) << '\n';
    return static_cast<int>(Exit::ok);
}

} // namespace detail

/// Entry point of the `graypatch` tool. Returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Grayscale patch augmentation and multi-modal adversarial defense for ReID images", "graypatch"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_config("--config", "", "Optional TOML/INI file overriding the defaults");

    Options o;

    auto* augment = app.add_subcommand("augment", "GGPR / LGPR training-time augmentation over a dataset");
    augment->option_defaults()->always_capture_default();
    detail::add_common(*augment, o);
    augment->add_option("--mode", o.augment_mode, "ggpr, lgpr, or both (GGPR gate first, LGPR when it stays shut)")
        ->check(CLI::IsMember({"ggpr", "lgpr", "both"}));
    augment->add_option("--p-g", o.augment.p_global, "GGPR probability")->check(CLI::Range(0.0, 1.0));
    augment->add_option("--p-l", o.augment.p_local, "LGPR probability")->check(CLI::Range(0.0, 1.0));
    augment->add_option("--area-min", o.augment.area_min, "Smallest patch area as a fraction of the image");
    augment->add_option("--area-max", o.augment.area_max, "Largest patch area as a fraction of the image");
    augment->add_option("--aspect-min", o.augment.aspect_min, "Smallest patch height/width ratio");
    augment->add_option("--aspect-max", o.augment.aspect_max, "Largest patch height/width ratio");
    augment->add_option("--max-attempts", o.augment.max_attempts, "Rectangle draws before giving up on an image");

    auto* defend = app.add_subcommand("defend", "Multi-modal defense partition (gray / gray fusion / sketch fusion)");
    defend->option_defaults()->always_capture_default();
    detail::add_common(*defend, o);
    defend->add_option("--p-gray", o.defense.p_gray, "Whole-image grayscale share")->check(CLI::Range(0.0, 1.0));
    defend->add_option("--p-gray-fuse", o.defense.p_gray_fuse, "RGB/grayscale channel fusion share")
        ->check(CLI::Range(0.0, 1.0));
    defend->add_option("--p-sketch-fuse", o.defense.p_sketch_fuse, "RGB/sketch channel fusion share")
        ->check(CLI::Range(0.0, 1.0));
    defend->add_option("--two-channel-prob", o.defense.two_channel_prob,
                       "Probability a fusion overwrites two channels rather than one")
        ->check(CLI::Range(0.0, 1.0));
    detail::add_sketch(*defend, o);

    auto* resize = app.add_subcommand("resize-defense", "Inference-time downscale/upscale preprocessing");
    resize->option_defaults()->always_capture_default();
    detail::add_common(*resize, o);
    resize->add_option("--down", o.down, "Intermediate size, HEIGHTxWIDTH");
    resize->add_option("--up", o.up, "Final (model input) size, HEIGHTxWIDTH");

    auto* convert = app.add_subcommand("convert", "Convert a single image to its grayscale or sketch plane");
    convert->option_defaults()->always_capture_default();
    convert->add_option("--input,-i", o.input, "Input image file")->required();
    convert->add_option("--output,-o", o.output, "Output PNG file")->required();
    convert->add_option("--op", o.convert_op, "gray or sketch")->check(CLI::IsMember({"gray", "sketch"}));
    detail::add_sketch(*convert, o);

    auto* stats = app.add_subcommand("stats", "Summarise a manifest: outcome counts, frequencies, z-scores");
    stats->option_defaults()->always_capture_default();
    stats->add_option("--manifest", o.manifest, "Manifest file written by a batch run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(Exit::usage);
    }

    try {
        o.defense.sketch.op = parse_sketch_operator(o.sketch_op);
        if (augment->parsed()) {
            PipelineConfig cfg;
            cfg.mode = o.augment_mode == "ggpr" ? Mode::ggpr : o.augment_mode == "lgpr" ? Mode::lgpr : Mode::combined;
            cfg.augment = o.augment;
            return detail::run_batch(cfg, o, out, err);
        }
        if (defend->parsed()) {
            PipelineConfig cfg;
            cfg.mode = Mode::mmd;
            cfg.defense = o.defense;
            return detail::run_batch(cfg, o, out, err);
        }
        if (resize->parsed()) {
            PipelineConfig cfg;
            cfg.mode = Mode::resize_defense;
            cfg.defense = o.defense;
            const auto down = parse_geometry(o.down);
            const auto up = parse_geometry(o.up);
            cfg.defense.down_w = down.width;
            cfg.defense.down_h = down.height;
            cfg.defense.up_w = up.width;
            cfg.defense.up_h = up.height;
            return detail::run_batch(cfg, o, out, err);
        }
        if (convert->parsed()) {
            o.defense.sketch.validate();
            const ImageBuffer img = ensure_rgb(load_image(o.input));
            const ImageBuffer plane = o.convert_op == "gray" ? to_grayscale(img) : sketch(img, o.defense.sketch);
            save_png(o.output, plane);
            return static_cast<int>(Exit::ok);
        }
        if (stats->parsed()) {
            const auto bytes = read_file(o.manifest);
            const auto records = read_manifest(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
            out << stats_to_json(compute_stats(records)).dump(2) << '\n';
            return static_cast<int>(Exit::ok);
        }
    } catch (const config_error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(Exit::usage);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(Exit::io);
    }
    return static_cast<int>(Exit::usage);
}

} // namespace graypatch::cli
