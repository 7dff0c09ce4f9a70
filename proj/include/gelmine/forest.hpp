#pragma once

#include "gelmine/features.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gelmine {

struct ForestParams {
    int n_trees = 75;
    int features_per_split = 6; // floor(sqrt(39))
    int min_leaf = 1;
    int max_depth = 0;          // 0 = unlimited
    std::uint64_t seed = 0;

    void validate() const;
};

/// Probability cutoffs used throughout the pipeline: the low one trades
/// precision for recall, the high one the other way around.
struct Thresholds {
    double high_recall = 0.15;
    double balanced = 0.30;
    double high_precision = 0.60;

    void validate() const;
};

/// Flat node storage; `f < 0` marks a leaf carrying the positive fraction.
struct TreeNode {
    int f = -1;
    double t = 0.0;
    int left = -1;
    int right = -1;
    double p = 0.0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    double predict(const FeatureVector& fv) const {
        int i = 0;
        while (nodes[static_cast<std::size_t>(i)].f >= 0) {
            const TreeNode& n = nodes[static_cast<std::size_t>(i)];
            i = fv[static_cast<std::size_t>(n.f)] < n.t ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(i)].p;
    }
};

struct TrainingMeta {
    long long n_pos = 0;
    long long n_neg = 0;
};

struct ForestModel {
    ForestParams params;
    int feature_schema_version = kFeatureSchemaVersion;
    TrainingMeta training_meta;
    std::vector<DecisionTree> trees;
};

struct LabeledSample {
    FeatureVector fv{};
    bool gel = false;
};

/// Trains n_trees trees, each on a bootstrap sample drawn from a stream
/// seeded with params.seed + tree index, so results do not depend on worker
/// count. Splits minimize Gini impurity over midpoints of sorted distinct
/// values; ties break toward the lowest feature index, then lowest
/// threshold. Row order is part of the deterministic input.
ForestModel train_forest(const std::vector<LabeledSample>& dataset, const ForestParams& params,
                         int workers = 1);

/// Mean over trees of the leaf positive-fraction reached by fv.
double predict_proba(const ForestModel& model, const FeatureVector& fv);

/// predict_proba(model, fv) >= threshold.
bool classify(const ForestModel& model, const FeatureVector& fv, double threshold);

std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const std::string& text);
void save_forest(const std::filesystem::path& path, const ForestModel& model);
ForestModel load_forest(const std::filesystem::path& path);

} // namespace gelmine
