#pragma once

#include "gelmine/corpus.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gelmine {

inline constexpr int kTileSize = 48;
inline constexpr int kTileStride = 24;
inline constexpr double kTileGradThreshold = 2.0 / 255.0;

/// Three-conv-layer tile classifier. Valid convolutions and non-overlapping
/// average pooling give the spatial chain 48 -> 44 -> 22 -> 18 -> 6 -> 1;
/// tanh follows each convolution, softmax the final fully connected layer.
/// Weight layout is [out_channel][in_channel][ky][kx], flattened.
struct ConvNetModel {
    std::vector<double> conv1_w, conv1_b; // 8 x 1 x 5 x 5, 8
    std::vector<double> conv2_w, conv2_b; // 24 x 8 x 5 x 5, 24
    std::vector<double> conv3_w, conv3_b; // 72 x 24 x 6 x 6, 72
    std::vector<double> fc_w, fc_b;       // 2 x 72, 2

    static ConvNetModel zeros();
    /// Uniform init in +-1/sqrt(fan_in), layer by layer from the seed.
    static ConvNetModel random_init(std::uint64_t seed);

    std::size_t parameter_count() const;
    /// Flat view over all parameters, in declaration order.
    double& parameter(std::size_t index);
    double parameter(std::size_t index) const;
};

struct Tile {
    std::string figure_id;
    int x = 0;
    int y = 0;
    std::array<double, kTileSize * kTileSize> pixels{}; // grayscale in [0,1]
};

struct SkippedTile {
    int x = 0;
    int y = 0;
    std::string reason;
};

struct TileSet {
    std::vector<Tile> tiles;
    std::vector<int> labels; // empty, or one 0/1 (gel) entry per tile
    std::vector<SkippedTile> skipped;
    bool too_small = false; // figure smaller than one tile
};

/// Tiles the figure on a stride grid (last row/column shifted inward to stay
/// in bounds). Tiles whose mean Sobel gradient magnitude falls below
/// grad_threshold are skipped.
TileSet tile_image(const Figure& figure, int size = kTileSize, int stride = kTileStride,
                   double grad_threshold = kTileGradThreshold);
TileSet tile_image(const Image& image, const std::string& figure_id, int size = kTileSize,
                   int stride = kTileStride, double grad_threshold = kTileGradThreshold);

/// Softmax class probabilities [non-gel, gel] for one 48x48 tile.
std::array<double, 2> forward(const ConvNetModel& model, std::span<const double> tile);

/// Cross-entropy loss of one sample; fills `grad` (model-shaped) with
/// d(loss)/d(parameter).
double loss_and_gradient(const ConvNetModel& model, std::span<const double> tile, int label,
                         ConvNetModel& grad);

struct ConvNetHyper {
    double lr = 0.01;
    int epochs = 5;
    int batch = 1; // per-sample SGD; only 1 is supported
    std::uint64_t seed = 0;

    void validate() const;
};

/// Per-sample SGD on cross-entropy, visiting tiles in input order.
/// Deterministic given seed and input order.
ConvNetModel train_convnet(const TileSet& tileset, const ConvNetHyper& hyper);

struct TilePrediction {
    int x = 0;
    int y = 0;
    bool gel = false;
};

/// Paints each tile block green (0,128,0) for gel, brown (139,69,19) for
/// other; pixels covered only by skipped tiles (or not at all) stay white
/// (255,255,255). Overlapping strides resolve by majority, ties to gel.
Image reconstruct_mask(int width, int height, int size,
                       std::span<const TilePrediction> predictions,
                       std::span<const SkippedTile> skipped);

std::string convnet_to_json(const ConvNetModel& model);
ConvNetModel convnet_from_json(const std::string& text);
void save_convnet(const std::filesystem::path& path, const ConvNetModel& model);
ConvNetModel load_convnet(const std::filesystem::path& path);

} // namespace gelmine
