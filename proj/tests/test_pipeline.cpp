#include "test_support.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace graypatch;
using namespace graypatch::testing;

namespace {
const Mode all_modes[] = {Mode::ggpr, Mode::lgpr, Mode::combined, Mode::mmd, Mode::resize_defense};
}

TEST(TransformImage, DeterministicPerSeedAndOrdinal) {
    const auto img = random_image(64, 128, 3);
    for (Mode m : all_modes) {
        PipelineConfig cfg;
        cfg.mode = m;
        for (std::uint64_t ord = 0; ord < 10; ++ord) {
            const auto a = transform_image(img, cfg, 77, ord);
            const auto b = transform_image(img, cfg, 77, ord);
            EXPECT_EQ(a.image, b.image);
            EXPECT_EQ(a.record, b.record);
            EXPECT_EQ(a.record.stream_key, stream_key(77, ord));
        }
    }
}

TEST(TransformImage, ReplayReproducesEveryMode) {
    PipelineConfig cfg;
    cfg.augment.p_global = 0.3;
    cfg.augment.p_local = 0.8;
    cfg.defense.p_gray = cfg.defense.p_gray_fuse = cfg.defense.p_sketch_fuse = 0.25;
    for (Mode m : all_modes) {
        cfg.mode = m;
        for (std::uint64_t ord = 0; ord < 40; ++ord) {
            const auto img = random_image(32, 64, ord);
            const auto t = transform_image(img, cfg, 5, ord);
            ASSERT_EQ(replay(t.record, img), t.image) << to_string(m) << " " << ord;
        }
    }
}

TEST(TransformImage, CombinedRunsLgprOnlyWhenGgprMisses) {
    PipelineConfig cfg;
    cfg.mode = Mode::combined;
    cfg.augment.p_global = 0.5;
    cfg.augment.p_local = 1.0;
    const auto img = random_image(16, 32, 1);
    int fired = 0;
    for (std::uint64_t ord = 0; ord < 200; ++ord) {
        const auto t = transform_image(img, cfg, 6, ord);
        ASSERT_TRUE(t.record.ggpr.has_value());
        if (t.record.ggpr->fired) {
            ++fired;
            EXPECT_FALSE(t.record.lgpr.has_value());
            EXPECT_TRUE(all_channels_equal(t.image));
            EXPECT_EQ(t.record.draws, 1u);
        } else {
            ASSERT_TRUE(t.record.lgpr.has_value());
            EXPECT_TRUE(t.record.lgpr->fired);
        }
    }
    EXPECT_GT(fired, 0);
}

TEST(TransformImage, LgprAfterGgprIsANoOp) {
    // Ordering lemma: LGPR cannot change an image whose channels agree, so
    // running it after a fired GGPR gate would not alter the output.
    AugmentConfig cfg;
    cfg.p_local = 1.0;
    for (std::uint64_t ord = 0; ord < 100; ++ord) {
        const auto gray = grayscale_rgb(random_image(24, 48, ord));
        auto rng = derive_stream(8, ord);
        EXPECT_EQ(lgpr(gray, cfg, rng).image, gray);
    }
}

TEST(TransformImage, SinglePlaneSourcesArePromoted) {
    PipelineConfig cfg;
    cfg.mode = Mode::lgpr;
    const auto plane = random_image(16, 16, 2, 1);
    const auto t = transform_image(plane, cfg, 1, 1);
    EXPECT_EQ(t.image.channels(), 3);
    EXPECT_EQ(t.record.channels, 1);
    EXPECT_EQ(t.image, gray_to_rgb(plane));
    EXPECT_EQ(replay(t.record, plane), t.image);
}

TEST(TransformImage, CombinedGateFrequencies) {
    // 100,000 entries: GGPR within 4 sigma of 5,000; LGPR gate among the
    // remaining entries within 4 sigma of 0.4 of them.
    PipelineConfig cfg;
    cfg.mode = Mode::combined;
    const ImageBuffer tiny = random_image(4, 4, 0);
    std::uint64_t ggpr = 0, lgpr_trials = 0, lgpr_fired = 0;
    const std::uint64_t n = 100000;
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto t = transform_image(tiny, cfg, 31337, i);
        if (t.record.ggpr->fired) {
            ++ggpr;
        } else {
            ++lgpr_trials;
            lgpr_fired += t.record.lgpr->fired;
        }
    }
    EXPECT_NEAR(static_cast<double>(ggpr), 5000.0, four_sigma(n, 0.05));
    EXPECT_NEAR(static_cast<double>(lgpr_fired), 0.4 * static_cast<double>(lgpr_trials),
                four_sigma(static_cast<double>(lgpr_trials), 0.4));
}

TEST(OutputPaths, MirrorsAndResolvesCollisions) {
    const auto entries = make_entries({"a.jpg", "a.png", "b/c.JPEG", "d.jpg", "d.jpeg"});
    const auto out = output_paths(entries);
    const std::vector<std::string> expected = {"a.jpg.png", "a.png", "b/c.png", "d.jpeg.png", "d.jpg.png"};
    EXPECT_EQ(out, expected);
}

TEST(ProcessBatch, WorkerCountDoesNotMatter) {
    ScratchDir in("pb_in"), out1("pb_out1"), out2("pb_out2"), out8("pb_out8");
    write_corpus(in.path(), 30, 100);
    const auto entries = walk_dataset(in.path()).entries;
    for (Mode m : all_modes) {
        PipelineConfig cfg;
        cfg.mode = m;
        const auto r1 = process_batch(entries, in.path(), out1.path() / to_string(m), cfg, 9, 1);
        const auto r2 = process_batch(entries, in.path(), out2.path() / to_string(m), cfg, 9, 2);
        const auto r8 = process_batch(entries, in.path(), out8.path() / to_string(m), cfg, 9, 8);
        EXPECT_EQ(write_manifest(r1.records), write_manifest(r2.records));
        EXPECT_EQ(write_manifest(r1.records), write_manifest(r8.records));
        std::string diff;
        EXPECT_TRUE(same_tree(out1.path() / to_string(m), out8.path() / to_string(m), &diff)) << diff;
        EXPECT_TRUE(same_tree(out1.path() / to_string(m), out2.path() / to_string(m), &diff)) << diff;
    }
}

TEST(ProcessBatch, CertainGgprGraysEverything) {
    ScratchDir in("pb_gray_in"), out("pb_gray_out");
    write_corpus(in.path(), 12, 5);
    PipelineConfig cfg;
    cfg.mode = Mode::ggpr;
    cfg.augment.p_global = 1.0;
    const auto res = process_batch(walk_dataset(in.path()).entries, in.path(), out.path(), cfg, 1, 3);
    ASSERT_EQ(res.records.size(), 12u);
    for (const auto& r : res.records) {
        ASSERT_TRUE(r.ok());
        const auto img = load_image(out.path() / r.output);
        EXPECT_TRUE(all_channels_equal(img)) << r.output;
    }
    EXPECT_DOUBLE_EQ(compute_stats(res.records).frequency("ggpr"), 1.0);
}

TEST(ProcessBatch, UndecodableFilesAreSkipped) {
    ScratchDir in("pb_bad_in"), out("pb_bad_out");
    write_corpus(in.path(), 4, 1);
    write_text_file(in.path() / "zz_broken.png", "not a png");
    const auto entries = walk_dataset(in.path()).entries;
    PipelineConfig cfg;
    const auto res = process_batch(entries, in.path(), out.path(), cfg, 1, 2);
    ASSERT_EQ(res.records.size(), 5u);
    EXPECT_EQ(res.failed(), 1u);
    const auto& bad = res.records.back();
    EXPECT_FALSE(bad.ok());
    EXPECT_EQ(bad.path, "zz_broken.png");
    EXPECT_FALSE(std::filesystem::exists(out.path() / "zz_broken.png"));
    const auto stats = compute_stats(res.records);
    EXPECT_EQ(stats.failed, 1u);
    EXPECT_EQ(stats.outcomes.at("error"), 1u);
}

TEST(ProcessBatch, ReplayFromDiskMatchesOutputs) {
    ScratchDir in("pb_replay_in"), out("pb_replay_out");
    write_corpus(in.path(), 10, 3);
    PipelineConfig cfg;
    cfg.mode = Mode::mmd;
    cfg.defense.p_gray = cfg.defense.p_gray_fuse = cfg.defense.p_sketch_fuse = 0.3;
    const auto res = process_batch(walk_dataset(in.path()).entries, in.path(), out.path(), cfg, 4, 2);
    const auto records = read_manifest(write_manifest(res.records));
    for (const auto& r : records) {
        EXPECT_EQ(replay(r, load_image(in.path() / r.path)), load_image(out.path() / r.output));
    }
}

TEST(ProcessBatch, ConfigAndWriteFailures) {
    ScratchDir in("pb_fail_in"), out("pb_fail_out");
    write_corpus(in.path(), 2, 1);
    const auto entries = walk_dataset(in.path()).entries;

    PipelineConfig bad;
    bad.mode = Mode::lgpr;
    bad.augment.p_local = 2.0;
    EXPECT_THROW(process_batch(entries, in.path(), out.path() / "never", bad, 0, 1), config_error);
    EXPECT_FALSE(std::filesystem::exists(out.path() / "never"));

    EXPECT_THROW(process_batch(entries, in.path(), out.path(), PipelineConfig{}, 0, 0), config_error);

    write_text_file(out.path() / "blocker", "file where a directory should be");
    EXPECT_THROW(process_batch(entries, in.path(), out.path() / "blocker", PipelineConfig{}, 0, 2), io_error);
}

TEST(ParallelFor, PropagatesTheFirstFailure) {
    std::atomic<int> ran{0};
    EXPECT_THROW(parallel_for(100, 4,
                              [&](std::size_t i) {
                                  ++ran;
                                  if (i == 10) throw std::runtime_error("boom");
                              }),
                 std::runtime_error);
    EXPECT_GT(ran.load(), 0);
}
