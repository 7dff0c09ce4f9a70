#pragma once

#include "gelmine/geometry.hpp"

#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gelmine {

struct Metrics {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    long long tn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    bool precision_defined = true; // tp + fp > 0
    bool recall_defined = true;    // tp + fn > 0

    static Metrics from_counts(long long tp, long long fp, long long fn, long long tn = 0);
};

/// Harmonic mean of precision and recall; 0 when both are 0.
double f_score_of(double precision, double recall);

/// Set-based precision/recall/F over predicted vs. truth id sets.
template <typename T>
Metrics precision_recall_f(const std::set<T>& predicted, const std::set<T>& truth) {
    long long tp = 0;
    for (const T& v : predicted) tp += truth.count(v) ? 1 : 0;
    return Metrics::from_counts(tp, static_cast<long long>(predicted.size()) - tp,
                                static_cast<long long>(truth.size()) - tp);
}

/// Area under the ROC curve via the Mann-Whitney statistic; tied scores
/// count one half. Labels are 0/1. Throws on single-class input.
double roc_auc(std::span<const std::pair<double, int>> scores);

/// Greedy one-to-one matching of detected vs. truth regions by descending
/// IoU; pairs at or above iou_min are true positives.
Metrics match_panels(std::span<const BoundingBox> detected, std::span<const BoundingBox> truth,
                     double iou_min = 0.5);

struct PipelineCounts {
    long long figures_processed = 0;
    long long panels_detected = 0;
    long long labels_detected = 0;
    long long gene_tokens_total = 0;     // mentions over all text segments
    long long gene_tokens_in_labels = 0; // mentions inside attributed labels
    long long tokens_total = 0;
    long long tokens_in_labels = 0;
};

struct StatsReport {
    PipelineCounts counts;
    double panels_per_figure = 0.0;
    double labels_per_panel = 0.0;
    double gene_ratio_all = 0.0;
    double gene_ratio_labels = 0.0;
    std::vector<std::string> warnings; // zero-denominator flags
};

StatsReport corpus_stats(const PipelineCounts& counts);

std::string stats_to_text(const StatsReport& report);
std::string stats_to_json(const StatsReport& report);

} // namespace gelmine
