// Applies LGPR to one image a few times with different seeds and writes the
// results next to it, printing the patch each run used.
//
//   lgpr_demo person.jpg [runs]

#include "graypatch/graypatch.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: lgpr_demo IMAGE [runs]\n";
        return 1;
    }
    const std::filesystem::path input = argv[1];
    const int runs = argc > 2 ? std::atoi(argv[2]) : 4;

    try {
        const auto img = graypatch::ensure_rgb(graypatch::load_image(input));
        graypatch::AugmentConfig cfg;
        cfg.p_local = 1.0; // always patch, so every run shows something

        for (int seed = 0; seed < runs; ++seed) {
            auto rng = graypatch::derive_stream(static_cast<std::uint64_t>(seed), 0);
            const auto res = graypatch::lgpr(img, cfg, rng);
            const auto out = input.parent_path() / (input.stem().string() + "_lgpr" + std::to_string(seed) + ".png");
            graypatch::save_png(out, res.image);
            std::cout << out.string() << ": ";
            if (res.rect) {
                std::cout << "patch " << res.rect->w << "x" << res.rect->h << " at (" << res.rect->x << ", "
                          << res.rect->y << ") after " << res.attempts << " draw(s)\n";
            } else {
                std::cout << "no patch fit in " << res.attempts << " draws\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
