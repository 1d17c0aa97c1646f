#pragma once

#include "graypatch/codec.hpp"
#include "graypatch/color.hpp"
#include "graypatch/dataset.hpp"
#include "graypatch/defense.hpp"
#include "graypatch/manifest.hpp"
#include "graypatch/random.hpp"
#include "graypatch/record.hpp"
#include "graypatch/transforms.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace graypatch {

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    Mode mode = Mode::combined;
    AugmentConfig augment{};
    DefenseConfig defense{};

    void validate() const {
        switch (mode) {
        case Mode::ggpr:
        case Mode::lgpr:
        case Mode::combined:
            augment.validate();
            break;
        case Mode::mmd:
            defense.validate_partition();
            break;
        case Mode::resize_defense:
            defense.validate_geometry();
            break;
        }
    }
};

struct Transformed {
    ImageBuffer image;
    TransformRecord record;
};

/// Runs one pipeline mode on one image with the stream owned by
/// (master_seed, ordinal). Single-channel sources are promoted to RGB first.
/// Combined mode evaluates the GGPR gate first and only runs LGPR when it
/// stays shut.
inline Transformed transform_image(const ImageBuffer& source, const PipelineConfig& cfg, std::uint64_t master_seed,
                                   std::uint64_t ordinal) {
    RandomStream rng = derive_stream(master_seed, ordinal);
    TransformRecord rec;
    rec.ordinal = ordinal;
    rec.mode = cfg.mode;
    rec.stream_key = rng.key();
    rec.width = source.width();
    rec.height = source.height();
    rec.channels = source.channels();

    ImageBuffer img = ensure_rgb(source);

    auto run_ggpr = [&]() -> bool {
        const double u = rng.uniform();
        auto res = ggpr_gate(img, u, cfg.augment.p_global);
        rec.ggpr = GgprTrace{cfg.augment.p_global, u, res.fired};
        img = std::move(res.image);
        return res.fired;
    };
    auto run_lgpr = [&]() {
        auto res = lgpr(img, cfg.augment, rng);
        rec.lgpr = LgprTrace{cfg.augment.p_local, res.gate, res.fired, res.attempts, res.rect};
        img = std::move(res.image);
    };

    switch (cfg.mode) {
    case Mode::ggpr:
        run_ggpr();
        break;
    case Mode::lgpr:
        run_lgpr();
        break;
    case Mode::combined:
        if (!run_ggpr()) run_lgpr();
        break;
    case Mode::mmd: {
        auto res = mmd_apply(img, cfg.defense, rng);
        const auto& d = cfg.defense;
        rec.mmd = MmdTrace{d.p_gray, d.p_gray_fuse, d.p_sketch_fuse, d.two_channel_prob, d.sketch, res.outcome};
        img = std::move(res.image);
        break;
    }
    case Mode::resize_defense: {
        const auto& d = cfg.defense;
        img = resize_defense(img, d);
        rec.resize = ResizeTrace{d.down_w, d.down_h, d.up_w, d.up_h};
        break;
    }
    }
    rec.draws = rng.position();
    return {std::move(img), std::move(rec)};
}

/// Rebuilds a record's output from its source image using only the audit
/// fields; the random stream is never consulted.
inline ImageBuffer replay(const TransformRecord& rec, const ImageBuffer& source) {
    if (!rec.ok()) throw image_error("cannot replay a failed record");
    ImageBuffer img = ensure_rgb(source);
    if (rec.ggpr && rec.ggpr->fired) img = grayscale_rgb(img);
    if (rec.lgpr && rec.lgpr->rect) apply_gray_patch(img, *rec.lgpr->rect);
    if (rec.mmd) img = apply_defense_outcome(img, rec.mmd->outcome.kind, rec.mmd->outcome.channels, rec.mmd->sketch);
    if (rec.resize) {
        img = resize_bilinear(resize_bilinear(img, rec.resize->down_w, rec.resize->down_h), rec.resize->up_w,
                              rec.resize->up_h);
    }
    return img;
}

// ---------------------------------------------------------------------------
// File-level helpers
// ---------------------------------------------------------------------------

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw io_error("cannot open '" + p.string() + "' for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw io_error("read error on '" + p.string() + "'");
    return bytes;
}

inline void write_file(const std::filesystem::path& p, std::span<const std::uint8_t> bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + p.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error("write error on '" + p.string() + "'");
}

inline void write_text_file(const std::filesystem::path& p, std::string_view text) {
    write_file(p, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

inline ImageBuffer load_image(const std::filesystem::path& p) { return decode_image(read_file(p)); }

inline void save_png(const std::filesystem::path& p, const ImageBuffer& img) { write_file(p, encode_image(img)); }

/// Output path for each entry: the input path with a `.png` extension. When
/// two entries would land on the same name (`a.jpg` beside `a.png`), the
/// non-PNG sources keep their full name and gain `.png` (`a.jpg.png`).
inline std::vector<std::string> output_paths(const std::vector<DatasetEntry>& entries) {
    namespace fs = std::filesystem;
    auto is_png = [](const std::string& path) {
        std::string ext = fs::path(path).extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        return ext == ".png";
    };
    std::vector<std::string> out;
    out.reserve(entries.size());
    std::map<std::string, int> claims;
    for (const auto& e : entries) {
        const std::string candidate = fs::path(e.path).replace_extension(".png").generic_string();
        out.push_back(candidate);
        ++claims[candidate];
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (claims[out[i]] > 1 && !is_png(entries[i].path)) out[i] = entries[i].path + ".png";
    }
    return out;
}

struct BatchResult {
    std::vector<TransformRecord> records; // in ordinal order

    [[nodiscard]] std::size_t failed() const {
        return static_cast<std::size_t>(
            std::count_if(records.begin(), records.end(), [](const TransformRecord& r) { return !r.ok(); }));
    }
};

/// Runs `task(i)` for i in [0, count) on `workers` threads. The first
/// exception stops further scheduling and is rethrown after joining.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    pool.reserve(n);
    for (std::size_t w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            while (!stop.load(std::memory_order_relaxed)) {
                const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= count) break;
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    stop = true;
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

/// Transforms every entry under `input_root` into a mirrored PNG tree under
/// `output_root`. Undecodable inputs become error records; failing to
/// create or write an output aborts the run with io_error.
inline BatchResult process_batch(const std::vector<DatasetEntry>& entries, const std::filesystem::path& input_root,
                                 const std::filesystem::path& output_root, const PipelineConfig& cfg,
                                 std::uint64_t master_seed, int workers) {
    namespace fs = std::filesystem;
    cfg.validate();
    if (workers < 1) throw config_error("worker count must be at least 1");

    const auto outputs = output_paths(entries);
    std::set<fs::path> dirs{output_root};
    for (const auto& o : outputs) dirs.insert((output_root / o).parent_path());
    for (const auto& d : dirs) {
        std::error_code ec;
        fs::create_directories(d, ec);
        if (ec) throw io_error("cannot create output directory '" + d.string() + "': " + ec.message());
    }

    BatchResult result;
    result.records.resize(entries.size());
    parallel_for(entries.size(), workers, [&](std::size_t i) {
        const auto& entry = entries[i];
        ImageBuffer source;
        try {
            source = load_image(input_root / entry.path);
        } catch (const std::exception& e) {
            TransformRecord rec;
            rec.ordinal = entry.ordinal;
            rec.path = entry.path;
            rec.output = outputs[i];
            rec.mode = cfg.mode;
            rec.stream_key = stream_key(master_seed, entry.ordinal);
            rec.error = e.what();
            result.records[i] = std::move(rec);
            return;
        }
        auto done = transform_image(source, cfg, master_seed, entry.ordinal);
        done.record.path = entry.path;
        done.record.output = outputs[i];
        save_png(output_root / outputs[i], done.image);
        result.records[i] = std::move(done.record);
    });
    return result;
}

} // namespace graypatch
