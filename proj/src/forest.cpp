#include "gelmine/forest.hpp"

#include "gelmine/parallel.hpp"
#include "gelmine/rng.hpp"
#include "gelmine/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace gelmine {

using nlohmann::json;

void ForestParams::validate() const {
    if (n_trees < 1) throw ValidationError("forest.n_trees must be >= 1");
    if (features_per_split < 1 || features_per_split > kFeatureCount) {
        throw ValidationError("forest.features_per_split must be in [1, 39]");
    }
    if (min_leaf < 1) throw ValidationError("forest.min_leaf must be >= 1");
    if (max_depth < 0) throw ValidationError("forest.max_depth must be >= 0 (0 = unlimited)");
}

void Thresholds::validate() const {
    if (!(0.0 < high_recall && high_recall <= balanced && balanced <= high_precision &&
          high_precision < 1.0)) {
        throw ValidationError("thresholds must satisfy 0 < high_recall <= balanced <= "
                              "high_precision < 1");
    }
}

namespace {

double gini(long long pos, long long total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

struct TreeBuilder {
    const std::vector<LabeledSample>& data;
    const ForestParams& params;
    std::mt19937_64 rng;
    DecisionTree tree;

    TreeBuilder(const std::vector<LabeledSample>& d, const ForestParams& p, std::uint64_t seed)
        : data(d), params(p), rng(seed) {}

    int build(std::vector<int>& indices, int depth) {
        long long pos = 0;
        for (int idx : indices) pos += data[static_cast<std::size_t>(idx)].gel ? 1 : 0;
        const long long n = static_cast<long long>(indices.size());

        const bool pure = pos == 0 || pos == n;
        const bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;
        const bool too_small = n < 2 * params.min_leaf;
        if (pure || depth_capped || too_small) return make_leaf(pos, n);

        int best_f = -1;
        double best_t = 0.0;
        double best_decrease = 0.0;
        const double parent_impurity = gini(pos, n);

        const std::vector<int> feats =
            sample_without_replacement(rng, params.features_per_split, kFeatureCount);
        std::vector<std::pair<double, bool>> vals;
        vals.reserve(indices.size());
        for (int f : feats) {
            vals.clear();
            for (int idx : indices) {
                const LabeledSample& s = data[static_cast<std::size_t>(idx)];
                vals.emplace_back(s.fv[static_cast<std::size_t>(f)], s.gel);
            }
            std::sort(vals.begin(), vals.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            long long left_n = 0, left_pos = 0;
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                ++left_n;
                left_pos += vals[i].second ? 1 : 0;
                if (vals[i].first == vals[i + 1].first) continue;
                if (left_n < params.min_leaf || n - left_n < params.min_leaf) continue;
                const double t = 0.5 * (vals[i].first + vals[i + 1].first);
                // Guard against midpoints that collapse onto a value when
                // the neighbors are adjacent doubles.
                if (!(t > vals[i].first && t <= vals[i + 1].first)) continue;
                const double child_impurity =
                    (static_cast<double>(left_n) * gini(left_pos, left_n) +
                     static_cast<double>(n - left_n) * gini(pos - left_pos, n - left_n)) /
                    static_cast<double>(n);
                const double decrease = parent_impurity - child_impurity;
                if (decrease <= 0.0) continue;
                bool better;
                if (best_f < 0) {
                    better = true;
                } else if (decrease != best_decrease) {
                    better = decrease > best_decrease;
                } else {
                    better = f < best_f || (f == best_f && t < best_t);
                }
                if (better) {
                    best_f = f;
                    best_t = t;
                    best_decrease = decrease;
                }
            }
        }

        if (best_f < 0) return make_leaf(pos, n);

        std::vector<int> left_idx, right_idx;
        left_idx.reserve(indices.size());
        right_idx.reserve(indices.size());
        for (int idx : indices) {
            if (data[static_cast<std::size_t>(idx)].fv[static_cast<std::size_t>(best_f)] < best_t) {
                left_idx.push_back(idx);
            } else {
                right_idx.push_back(idx);
            }
        }

        const int node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{best_f, best_t, -1, -1, 0.0});
        const int left = build(left_idx, depth + 1);
        const int right = build(right_idx, depth + 1);
        tree.nodes[static_cast<std::size_t>(node_index)].left = left;
        tree.nodes[static_cast<std::size_t>(node_index)].right = right;
        return node_index;
    }

    int make_leaf(long long pos, long long n) {
        const int node_index = static_cast<int>(tree.nodes.size());
        TreeNode leaf;
        leaf.p = n > 0 ? static_cast<double>(pos) / static_cast<double>(n) : 0.0;
        tree.nodes.push_back(leaf);
        return node_index;
    }
};

DecisionTree train_tree(const std::vector<LabeledSample>& data, const ForestParams& params,
                        std::uint64_t seed) {
    TreeBuilder builder(data, params, seed);
    const std::size_t n = data.size();
    std::vector<int> indices(n);
    for (std::size_t i = 0; i < n; ++i) {
        indices[i] = static_cast<int>(rng_below(builder.rng, n));
    }
    builder.build(indices, 0);
    return std::move(builder.tree);
}

} // namespace

ForestModel train_forest(const std::vector<LabeledSample>& dataset, const ForestParams& params,
                         int workers) {
    params.validate();
    if (dataset.empty()) throw ValidationError("training dataset is empty");
    TrainingMeta meta;
    for (const LabeledSample& s : dataset) {
        (s.gel ? meta.n_pos : meta.n_neg) += 1;
        for (double v : s.fv) {
            if (!std::isfinite(v)) throw ValidationError("training dataset contains NaN/inf");
        }
    }
    if (meta.n_pos == 0 || meta.n_neg == 0) {
        throw ValidationError("training dataset must contain both classes");
    }

    ForestModel model;
    model.params = params;
    model.training_meta = meta;
    model.trees.resize(static_cast<std::size_t>(params.n_trees));
    parallel_for(static_cast<std::size_t>(params.n_trees), workers, [&](std::size_t t) {
        model.trees[t] = train_tree(dataset, params, params.seed + static_cast<std::uint64_t>(t));
    });
    return model;
}

double predict_proba(const ForestModel& model, const FeatureVector& fv) {
    if (model.feature_schema_version != kFeatureSchemaVersion) {
        throw SchemaError("model feature schema version " +
                          std::to_string(model.feature_schema_version) +
                          " does not match this build (" +
                          std::to_string(kFeatureSchemaVersion) + ")");
    }
    if (model.trees.empty()) throw SchemaError("model has no trees");
    double total = 0.0;
    for (const DecisionTree& tree : model.trees) total += tree.predict(fv);
    return total / static_cast<double>(model.trees.size());
}

bool classify(const ForestModel& model, const FeatureVector& fv, double threshold) {
    return predict_proba(model, fv) >= threshold;
}

namespace {

json node_to_json(const DecisionTree& tree, int index) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(index)];
    if (n.f < 0) return json{{"p", n.p}};
    json j;
    j["f"] = n.f;
    j["t"] = n.t;
    j["l"] = node_to_json(tree, n.left);
    j["r"] = node_to_json(tree, n.right);
    return j;
}

int node_from_json(const json& j, DecisionTree& tree) {
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (j.contains("p")) {
        tree.nodes[static_cast<std::size_t>(index)].p = j.at("p").get<double>();
        const double p = tree.nodes[static_cast<std::size_t>(index)].p;
        if (p < 0.0 || p > 1.0) throw SchemaError("leaf fraction out of [0,1] in model file");
        return index;
    }
    const int f = j.at("f").get<int>();
    if (f < 0 || f >= kFeatureCount) throw SchemaError("feature index out of range in model file");
    tree.nodes[static_cast<std::size_t>(index)].f = f;
    tree.nodes[static_cast<std::size_t>(index)].t = j.at("t").get<double>();
    const int left = node_from_json(j.at("l"), tree);
    const int right = node_from_json(j.at("r"), tree);
    tree.nodes[static_cast<std::size_t>(index)].left = left;
    tree.nodes[static_cast<std::size_t>(index)].right = right;
    return index;
}

} // namespace

std::string forest_to_json(const ForestModel& model) {
    json root;
    root["version"] = 1;
    root["feature_schema_version"] = model.feature_schema_version;
    root["params"] = {{"n_trees", model.params.n_trees},
                      {"features_per_split", model.params.features_per_split},
                      {"min_leaf", model.params.min_leaf},
                      {"max_depth", model.params.max_depth},
                      {"seed", model.params.seed}};
    root["training_meta"] = {{"n_pos", model.training_meta.n_pos},
                             {"n_neg", model.training_meta.n_neg}};
    json trees = json::array();
    for (const DecisionTree& t : model.trees) trees.push_back(node_to_json(t, 0));
    root["trees"] = std::move(trees);
    return root.dump() + "\n";
}

ForestModel forest_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("model file is not valid JSON: ") + e.what());
    }
    if (root.value("version", 0) != 1) throw SchemaError("unsupported forest model version");
    ForestModel model;
    model.feature_schema_version = root.at("feature_schema_version").get<int>();
    const json& jp = root.at("params");
    model.params.n_trees = jp.at("n_trees").get<int>();
    model.params.features_per_split = jp.at("features_per_split").get<int>();
    model.params.min_leaf = jp.at("min_leaf").get<int>();
    model.params.max_depth = jp.at("max_depth").get<int>();
    model.params.seed = jp.at("seed").get<std::uint64_t>();
    model.training_meta.n_pos = root.at("training_meta").at("n_pos").get<long long>();
    model.training_meta.n_neg = root.at("training_meta").at("n_neg").get<long long>();
    for (const json& jt : root.at("trees")) {
        DecisionTree tree;
        node_from_json(jt, tree);
        model.trees.push_back(std::move(tree));
    }
    if (model.trees.empty()) throw SchemaError("model file has no trees");
    return model;
}

void save_forest(const std::filesystem::path& path, const ForestModel& model) {
    atomic_write_file(path, forest_to_json(model));
}

ForestModel load_forest(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) {
        throw ValidationError("forest model file not found: " + path.string());
    }
    return forest_from_json(read_text_file(path));
}

} // namespace gelmine
