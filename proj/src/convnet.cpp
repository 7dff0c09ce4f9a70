#include "gelmine/convnet.hpp"

#include "gelmine/rng.hpp"
#include "gelmine/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace gelmine {

using nlohmann::json;

namespace {

// Layer geometry along the chain 48 -> 44 -> 22 -> 18 -> 6 -> 1.
constexpr int kIn = kTileSize;   // 48
constexpr int kC1 = 8, kK1 = 5;  // conv1: 8 filters 5x5 -> 44
constexpr int kA1 = kIn - kK1 + 1;
constexpr int kP1 = 2;           // pool1: 2x2 -> 22
constexpr int kS1 = kA1 / kP1;
constexpr int kC2 = 24, kK2 = 5; // conv2: 24 filters 5x5 -> 18
constexpr int kA2 = kS1 - kK2 + 1;
constexpr int kP2 = 3;           // pool2: 3x3 -> 6
constexpr int kS2 = kA2 / kP2;
constexpr int kC3 = 72, kK3 = 6; // conv3: 72 filters 6x6 -> 1
constexpr int kA3 = kS2 - kK3 + 1;
constexpr int kClasses = 2;

static_assert(kA1 == 44 && kS1 == 22 && kA2 == 18 && kS2 == 6 && kA3 == 1);

inline std::size_t at3(int c, int y, int x, int h, int w) {
    return (static_cast<std::size_t>(c) * h + y) * w + x;
}

inline std::size_t wat(int f, int c, int ky, int kx, int in_ch, int k) {
    return ((static_cast<std::size_t>(f) * in_ch + c) * k + ky) * k + kx;
}

void conv_forward(const double* in, int in_ch, int in_h, int in_w, const double* w,
                  const double* b, int out_ch, int k, double* out) {
    const int oh = in_h - k + 1;
    const int ow = in_w - k + 1;
    for (int f = 0; f < out_ch; ++f) {
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                double acc = b[f];
                for (int c = 0; c < in_ch; ++c) {
                    for (int ky = 0; ky < k; ++ky) {
                        for (int kx = 0; kx < k; ++kx) {
                            acc += w[wat(f, c, ky, kx, in_ch, k)] *
                                   in[at3(c, oy + ky, ox + kx, in_h, in_w)];
                        }
                    }
                }
                out[at3(f, oy, ox, oh, ow)] = acc;
            }
        }
    }
}

/// Accumulates dw/db and fills din for one valid convolution.
void conv_backward(const double* in, int in_ch, int in_h, int in_w, const double* w, int out_ch,
                   int k, const double* dout, double* dw, double* db, double* din) {
    const int oh = in_h - k + 1;
    const int ow = in_w - k + 1;
    if (din) {
        std::fill(din, din + static_cast<std::size_t>(in_ch) * in_h * in_w, 0.0);
    }
    for (int f = 0; f < out_ch; ++f) {
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                const double g = dout[at3(f, oy, ox, oh, ow)];
                db[f] += g;
                for (int c = 0; c < in_ch; ++c) {
                    for (int ky = 0; ky < k; ++ky) {
                        for (int kx = 0; kx < k; ++kx) {
                            dw[wat(f, c, ky, kx, in_ch, k)] +=
                                g * in[at3(c, oy + ky, ox + kx, in_h, in_w)];
                            if (din) {
                                din[at3(c, oy + ky, ox + kx, in_h, in_w)] +=
                                    g * w[wat(f, c, ky, kx, in_ch, k)];
                            }
                        }
                    }
                }
            }
        }
    }
}

void avgpool_forward(const double* in, int ch, int in_h, int in_w, int k, double* out) {
    const int oh = in_h / k;
    const int ow = in_w / k;
    const double inv = 1.0 / (k * k);
    for (int c = 0; c < ch; ++c) {
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                double acc = 0.0;
                for (int ky = 0; ky < k; ++ky) {
                    for (int kx = 0; kx < k; ++kx) {
                        acc += in[at3(c, oy * k + ky, ox * k + kx, in_h, in_w)];
                    }
                }
                out[at3(c, oy, ox, oh, ow)] = acc * inv;
            }
        }
    }
}

void avgpool_backward(const double* dout, int ch, int in_h, int in_w, int k, double* din) {
    const int oh = in_h / k;
    const int ow = in_w / k;
    const double inv = 1.0 / (k * k);
    for (int c = 0; c < ch; ++c) {
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                const double g = dout[at3(c, oy, ox, oh, ow)] * inv;
                for (int ky = 0; ky < k; ++ky) {
                    for (int kx = 0; kx < k; ++kx) {
                        din[at3(c, oy * k + ky, ox * k + kx, in_h, in_w)] = g;
                    }
                }
            }
        }
    }
}

void tanh_inplace(std::vector<double>& v) {
    for (double& x : v) x = std::tanh(x);
}

/// All intermediate activations of one forward pass (post-tanh for convs).
struct Activations {
    std::vector<double> a1 = std::vector<double>(static_cast<std::size_t>(kC1) * kA1 * kA1);
    std::vector<double> p1 = std::vector<double>(static_cast<std::size_t>(kC1) * kS1 * kS1);
    std::vector<double> a2 = std::vector<double>(static_cast<std::size_t>(kC2) * kA2 * kA2);
    std::vector<double> p2 = std::vector<double>(static_cast<std::size_t>(kC2) * kS2 * kS2);
    std::vector<double> a3 = std::vector<double>(static_cast<std::size_t>(kC3) * kA3 * kA3);
    std::array<double, kClasses> probs{};
};

void forward_cached(const ConvNetModel& m, std::span<const double> tile, Activations& acts) {
    conv_forward(tile.data(), 1, kIn, kIn, m.conv1_w.data(), m.conv1_b.data(), kC1, kK1,
                 acts.a1.data());
    tanh_inplace(acts.a1);
    avgpool_forward(acts.a1.data(), kC1, kA1, kA1, kP1, acts.p1.data());
    conv_forward(acts.p1.data(), kC1, kS1, kS1, m.conv2_w.data(), m.conv2_b.data(), kC2, kK2,
                 acts.a2.data());
    tanh_inplace(acts.a2);
    avgpool_forward(acts.a2.data(), kC2, kA2, kA2, kP2, acts.p2.data());
    conv_forward(acts.p2.data(), kC2, kS2, kS2, m.conv3_w.data(), m.conv3_b.data(), kC3, kK3,
                 acts.a3.data());
    tanh_inplace(acts.a3);

    std::array<double, kClasses> logits{};
    for (int c = 0; c < kClasses; ++c) {
        double acc = m.fc_b[static_cast<std::size_t>(c)];
        for (int k = 0; k < kC3; ++k) {
            acc += m.fc_w[static_cast<std::size_t>(c) * kC3 + k] * acts.a3[static_cast<std::size_t>(k)];
        }
        logits[static_cast<std::size_t>(c)] = acc;
    }
    const double mx = std::max(logits[0], logits[1]);
    const double e0 = std::exp(logits[0] - mx);
    const double e1 = std::exp(logits[1] - mx);
    acts.probs = {e0 / (e0 + e1), e1 / (e0 + e1)};
}

} // namespace

ConvNetModel ConvNetModel::zeros() {
    ConvNetModel m;
    m.conv1_w.assign(static_cast<std::size_t>(kC1) * 1 * kK1 * kK1, 0.0);
    m.conv1_b.assign(kC1, 0.0);
    m.conv2_w.assign(static_cast<std::size_t>(kC2) * kC1 * kK2 * kK2, 0.0);
    m.conv2_b.assign(kC2, 0.0);
    m.conv3_w.assign(static_cast<std::size_t>(kC3) * kC2 * kK3 * kK3, 0.0);
    m.conv3_b.assign(kC3, 0.0);
    m.fc_w.assign(static_cast<std::size_t>(kClasses) * kC3, 0.0);
    m.fc_b.assign(kClasses, 0.0);
    return m;
}

ConvNetModel ConvNetModel::random_init(std::uint64_t seed) {
    ConvNetModel m = zeros();
    std::mt19937_64 rng(seed);
    const auto fill = [&rng](std::vector<double>& v, int fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (double& x : v) x = rng_range(rng, -bound, bound);
    };
    fill(m.conv1_w, 1 * kK1 * kK1);
    fill(m.conv1_b, 1 * kK1 * kK1);
    fill(m.conv2_w, kC1 * kK2 * kK2);
    fill(m.conv2_b, kC1 * kK2 * kK2);
    fill(m.conv3_w, kC2 * kK3 * kK3);
    fill(m.conv3_b, kC2 * kK3 * kK3);
    fill(m.fc_w, kC3);
    fill(m.fc_b, kC3);
    return m;
}

std::size_t ConvNetModel::parameter_count() const {
    return conv1_w.size() + conv1_b.size() + conv2_w.size() + conv2_b.size() + conv3_w.size() +
           conv3_b.size() + fc_w.size() + fc_b.size();
}

namespace {

template <typename Model>
auto* parameter_at(Model& m, std::size_t index) {
    for (auto* v : {&m.conv1_w, &m.conv1_b, &m.conv2_w, &m.conv2_b, &m.conv3_w, &m.conv3_b,
                    &m.fc_w, &m.fc_b}) {
        if (index < v->size()) return &(*v)[index];
        index -= v->size();
    }
    throw ValidationError("parameter index out of range");
}

} // namespace

double& ConvNetModel::parameter(std::size_t index) { return *parameter_at(*this, index); }
double ConvNetModel::parameter(std::size_t index) const { return *parameter_at(*this, index); }

void ConvNetHyper::validate() const {
    if (lr <= 0.0) throw ValidationError("convnet.lr must be positive");
    if (epochs < 1) throw ValidationError("convnet.epochs must be >= 1");
    if (batch != 1) throw ValidationError("convnet.batch: only per-sample SGD (batch = 1) is supported");
}

TileSet tile_image(const Image& image, const std::string& figure_id, int size, int stride,
                   double grad_threshold) {
    TileSet set;
    if (image.width < size || image.height < size) {
        set.too_small = true;
        return set;
    }
    const GrayImage gray = to_gray(image);

    const auto positions = [&](int extent) {
        std::vector<int> xs;
        for (int x = 0; x + size <= extent; x += stride) xs.push_back(x);
        if (xs.back() != extent - size) xs.push_back(extent - size);
        return xs;
    };

    std::array<double, kTileSize * kTileSize> buffer{};
    for (int ty : positions(image.height)) {
        for (int tx : positions(image.width)) {
            for (int y = 0; y < size; ++y) {
                for (int x = 0; x < size; ++x) {
                    buffer[static_cast<std::size_t>(y) * size + x] =
                        gray.at(tx + x, ty + y) / 255.0;
                }
            }
            // Mean Sobel gradient magnitude over the tile interior.
            double total = 0.0;
            for (int y = 1; y < size - 1; ++y) {
                for (int x = 1; x < size - 1; ++x) {
                    const auto v = [&](int dx, int dy) {
                        return buffer[static_cast<std::size_t>(y + dy) * size + (x + dx)];
                    };
                    const double gx = v(1, -1) + 2 * v(1, 0) + v(1, 1) - v(-1, -1) -
                                      2 * v(-1, 0) - v(-1, 1);
                    const double gy = v(-1, 1) + 2 * v(0, 1) + v(1, 1) - v(-1, -1) -
                                      2 * v(0, -1) - v(1, -1);
                    total += std::sqrt(gx * gx + gy * gy);
                }
            }
            const double mean_grad = total / static_cast<double>((size - 2) * (size - 2));
            if (mean_grad < grad_threshold) {
                set.skipped.push_back({tx, ty, "low_gradient"});
                continue;
            }
            Tile tile;
            tile.figure_id = figure_id;
            tile.x = tx;
            tile.y = ty;
            tile.pixels = buffer;
            set.tiles.push_back(std::move(tile));
        }
    }
    return set;
}

TileSet tile_image(const Figure& figure, int size, int stride, double grad_threshold) {
    return tile_image(figure.image, figure.id, size, stride, grad_threshold);
}

std::array<double, 2> forward(const ConvNetModel& model, std::span<const double> tile) {
    if (tile.size() != static_cast<std::size_t>(kTileSize) * kTileSize) {
        throw SchemaError("tile must be 48x48 (got " + std::to_string(tile.size()) +
                          " values)");
    }
    Activations acts;
    forward_cached(model, tile, acts);
    return acts.probs;
}

double loss_and_gradient(const ConvNetModel& model, std::span<const double> tile, int label,
                         ConvNetModel& grad) {
    if (tile.size() != static_cast<std::size_t>(kTileSize) * kTileSize) {
        throw SchemaError("tile must be 48x48");
    }
    if (label != 0 && label != 1) throw ValidationError("tile label must be 0 or 1");

    Activations acts;
    forward_cached(model, tile, acts);
    const double loss = -std::log(std::max(acts.probs[static_cast<std::size_t>(label)], 1e-300));

    grad = ConvNetModel::zeros();

    // Softmax + cross-entropy: dL/dlogit = prob - onehot.
    std::array<double, kClasses> dlogits = acts.probs;
    dlogits[static_cast<std::size_t>(label)] -= 1.0;

    std::vector<double> da3(static_cast<std::size_t>(kC3), 0.0);
    for (int c = 0; c < kClasses; ++c) {
        grad.fc_b[static_cast<std::size_t>(c)] += dlogits[static_cast<std::size_t>(c)];
        for (int k = 0; k < kC3; ++k) {
            grad.fc_w[static_cast<std::size_t>(c) * kC3 + k] +=
                dlogits[static_cast<std::size_t>(c)] * acts.a3[static_cast<std::size_t>(k)];
            da3[static_cast<std::size_t>(k)] +=
                dlogits[static_cast<std::size_t>(c)] * model.fc_w[static_cast<std::size_t>(c) * kC3 + k];
        }
    }
    // tanh' = 1 - tanh^2, applied on the stored activations.
    for (int k = 0; k < kC3; ++k) {
        da3[static_cast<std::size_t>(k)] *=
            1.0 - acts.a3[static_cast<std::size_t>(k)] * acts.a3[static_cast<std::size_t>(k)];
    }

    std::vector<double> dp2(static_cast<std::size_t>(kC2) * kS2 * kS2);
    conv_backward(acts.p2.data(), kC2, kS2, kS2, model.conv3_w.data(), kC3, kK3, da3.data(),
                  grad.conv3_w.data(), grad.conv3_b.data(), dp2.data());

    std::vector<double> da2(static_cast<std::size_t>(kC2) * kA2 * kA2);
    avgpool_backward(dp2.data(), kC2, kA2, kA2, kP2, da2.data());
    for (std::size_t i = 0; i < da2.size(); ++i) da2[i] *= 1.0 - acts.a2[i] * acts.a2[i];

    std::vector<double> dp1(static_cast<std::size_t>(kC1) * kS1 * kS1);
    conv_backward(acts.p1.data(), kC1, kS1, kS1, model.conv2_w.data(), kC2, kK2, da2.data(),
                  grad.conv2_w.data(), grad.conv2_b.data(), dp1.data());

    std::vector<double> da1(static_cast<std::size_t>(kC1) * kA1 * kA1);
    avgpool_backward(dp1.data(), kC1, kA1, kA1, kP1, da1.data());
    for (std::size_t i = 0; i < da1.size(); ++i) da1[i] *= 1.0 - acts.a1[i] * acts.a1[i];

    conv_backward(tile.data(), 1, kIn, kIn, model.conv1_w.data(), kC1, kK1, da1.data(),
                  grad.conv1_w.data(), grad.conv1_b.data(), nullptr);

    return loss;
}

ConvNetModel train_convnet(const TileSet& tileset, const ConvNetHyper& hyper) {
    hyper.validate();
    if (tileset.labels.size() != tileset.tiles.size()) {
        throw ValidationError("tile set has no (or mismatched) labels");
    }
    long long pos = 0;
    for (int l : tileset.labels) pos += l;
    if (pos == 0 || pos == static_cast<long long>(tileset.labels.size())) {
        throw ValidationError("tile training data must contain both classes");
    }

    ConvNetModel model = ConvNetModel::random_init(hyper.seed);
    ConvNetModel grad = ConvNetModel::zeros();
    const std::size_t n_params = model.parameter_count();
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        for (std::size_t i = 0; i < tileset.tiles.size(); ++i) {
            loss_and_gradient(model, tileset.tiles[i].pixels, tileset.labels[i], grad);
            for (std::size_t p = 0; p < n_params; ++p) {
                model.parameter(p) -= hyper.lr * grad.parameter(p);
            }
        }
    }
    return model;
}

Image reconstruct_mask(int width, int height, int size,
                       std::span<const TilePrediction> predictions,
                       std::span<const SkippedTile> skipped) {
    (void)skipped; // skipped tiles abstain; uncovered pixels stay white
    Image mask = Image::filled(width, height, 255, 255, 255);
    std::vector<std::uint16_t> gel_votes(static_cast<std::size_t>(width) * height, 0);
    std::vector<std::uint16_t> other_votes(static_cast<std::size_t>(width) * height, 0);
    for (const TilePrediction& pred : predictions) {
        for (int y = pred.y; y < std::min(pred.y + size, height); ++y) {
            for (int x = pred.x; x < std::min(pred.x + size, width); ++x) {
                auto& v = pred.gel ? gel_votes : other_votes;
                ++v[static_cast<std::size_t>(y) * width + x];
            }
        }
    }
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            if (gel_votes[i] == 0 && other_votes[i] == 0) continue;
            if (gel_votes[i] >= other_votes[i]) {
                mask.set(x, y, 0, 128, 0);
            } else {
                mask.set(x, y, 139, 69, 19);
            }
        }
    }
    return mask;
}

namespace {

json layer_json(const std::vector<double>& v) { return json(v); }

std::vector<double> layer_from_json(const json& j, std::size_t expected, const char* name) {
    std::vector<double> v = j.get<std::vector<double>>();
    if (v.size() != expected) {
        throw SchemaError(std::string("convnet model: layer ") + name + " has " +
                          std::to_string(v.size()) + " values, expected " +
                          std::to_string(expected));
    }
    return v;
}

} // namespace

std::string convnet_to_json(const ConvNetModel& model) {
    json root;
    root["version"] = 1;
    root["arch"] = {{"input", kIn},
                    {"conv1", {kC1, 1, kK1}},
                    {"pool1", kP1},
                    {"conv2", {kC2, kC1, kK2}},
                    {"pool2", kP2},
                    {"conv3", {kC3, kC2, kK3}},
                    {"fc", {kClasses, kC3}}};
    root["conv1_w"] = layer_json(model.conv1_w);
    root["conv1_b"] = layer_json(model.conv1_b);
    root["conv2_w"] = layer_json(model.conv2_w);
    root["conv2_b"] = layer_json(model.conv2_b);
    root["conv3_w"] = layer_json(model.conv3_w);
    root["conv3_b"] = layer_json(model.conv3_b);
    root["fc_w"] = layer_json(model.fc_w);
    root["fc_b"] = layer_json(model.fc_b);
    return root.dump() + "\n";
}

ConvNetModel convnet_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("convnet model file is not valid JSON: ") + e.what());
    }
    if (root.value("version", 0) != 1) throw SchemaError("unsupported convnet model version");
    ConvNetModel m;
    m.conv1_w = layer_from_json(root.at("conv1_w"), static_cast<std::size_t>(kC1) * kK1 * kK1,
                                "conv1_w");
    m.conv1_b = layer_from_json(root.at("conv1_b"), kC1, "conv1_b");
    m.conv2_w = layer_from_json(root.at("conv2_w"),
                                static_cast<std::size_t>(kC2) * kC1 * kK2 * kK2, "conv2_w");
    m.conv2_b = layer_from_json(root.at("conv2_b"), kC2, "conv2_b");
    m.conv3_w = layer_from_json(root.at("conv3_w"),
                                static_cast<std::size_t>(kC3) * kC2 * kK3 * kK3, "conv3_w");
    m.conv3_b = layer_from_json(root.at("conv3_b"), kC3, "conv3_b");
    m.fc_w = layer_from_json(root.at("fc_w"), static_cast<std::size_t>(kClasses) * kC3, "fc_w");
    m.fc_b = layer_from_json(root.at("fc_b"), kClasses, "fc_b");
    return m;
}

void save_convnet(const std::filesystem::path& path, const ConvNetModel& model) {
    atomic_write_file(path, convnet_to_json(model));
}

ConvNetModel load_convnet(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) {
        throw ValidationError("convnet model file not found: " + path.string());
    }
    return convnet_from_json(read_text_file(path));
}

} // namespace gelmine
