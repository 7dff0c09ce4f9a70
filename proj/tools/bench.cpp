// Compares the serial (workers = 1) and OpenMP paths of the hot kernels:
// corpus generation, feature extraction, forest training and tile inference.

#include "gelmine/convnet.hpp"
#include "gelmine/features.hpp"
#include "gelmine/forest.hpp"
#include "gelmine/parallel.hpp"
#include "gelmine/pipeline.hpp"
#include "gelmine/synth.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>

namespace {

using namespace gelmine;
using Clock = std::chrono::steady_clock;

double seconds_of(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

template <typename Fn>
double timed(Fn&& fn) {
    const auto start = Clock::now();
    fn();
    return seconds_of(start, Clock::now());
}

void report(const char* kernel, double serial_s, double parallel_s) {
    std::printf("%-22s %10.3fs %10.3fs %8.2fx\n", kernel, serial_s, parallel_s,
                parallel_s > 0 ? serial_s / parallel_s : 0.0);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel kernel benchmark"};
    int n_figures = 40;
    int workers = 0;
    app.add_option("--n", n_figures, "figures to generate");
    app.add_option("--workers", workers, "parallel worker count (0 = all cores)");
    CLI11_PARSE(app, argc, argv);

    SynthSpec spec = SynthSpec::defaults();
    spec.n_figures = n_figures;
    spec.seed = 7;

    std::printf("%-22s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

    std::vector<Figure> figures;
    {
        std::vector<Figure> serial_figures(static_cast<std::size_t>(n_figures));
        const double serial = timed([&] {
            parallel_for(static_cast<std::size_t>(n_figures), 1, [&](std::size_t i) {
                serial_figures[i] = generate_figure(spec, static_cast<int>(i)).figure;
            });
        });
        figures.resize(static_cast<std::size_t>(n_figures));
        const double parallel = timed([&] {
            parallel_for(static_cast<std::size_t>(n_figures), workers, [&](std::size_t i) {
                figures[i] = generate_figure(spec, static_cast<int>(i)).figure;
            });
        });
        report("synth figures", serial, parallel);
    }

    SegmentDataset dataset;
    {
        const double serial = timed([&] { build_segment_dataset(figures, 1); });
        const double parallel = timed([&] { dataset = build_segment_dataset(figures, workers); });
        report("feature extraction", serial, parallel);
    }

    {
        ForestParams params;
        params.n_trees = 25;
        params.seed = 7;
        const double serial = timed([&] { train_forest(dataset.samples, params, 1); });
        const double parallel = timed([&] { train_forest(dataset.samples, params, workers); });
        report("forest training", serial, parallel);
    }

    {
        const ConvNetModel model = ConvNetModel::random_init(7);
        std::vector<Tile> tiles;
        for (std::size_t i = 0; i < figures.size() && tiles.size() < 400; ++i) {
            TileSet set = tile_image(figures[i]);
            for (Tile& t : set.tiles) {
                tiles.push_back(std::move(t));
                if (tiles.size() >= 400) break;
            }
        }
        std::vector<double> scores(tiles.size());
        const double serial = timed([&] {
            parallel_for(tiles.size(), 1,
                         [&](std::size_t i) { scores[i] = forward(model, tiles[i].pixels)[1]; });
        });
        const double parallel = timed([&] {
            parallel_for(tiles.size(), workers,
                         [&](std::size_t i) { scores[i] = forward(model, tiles[i].pixels)[1]; });
        });
        report("convnet inference", serial, parallel);
        std::cout.flush();
    }
    return 0;
}
