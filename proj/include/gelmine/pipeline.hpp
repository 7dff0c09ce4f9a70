#pragma once

#include "gelmine/convnet.hpp"
#include "gelmine/corpus.hpp"
#include "gelmine/evalstats.hpp"
#include "gelmine/forest.hpp"
#include "gelmine/ner.hpp"
#include "gelmine/panels.hpp"
#include "gelmine/segmentation.hpp"

namespace gelmine {

struct DetectParams {
    SegmentationParams segmentation;
    Thresholds thresholds;
    PanelParams panels;
};

/// Everything the pixel pipeline produced for one figure: its own
/// segmentation, forest scores, grouped panels and panel-label mentions.
struct FigureDetection {
    std::string figure_id;
    std::vector<Segment> detected_graphics; // ids continue after sidecar ids
    std::map<int, double> proba;
    std::vector<GelPanel> panels;
    std::vector<GeneMention> mentions;
    long long tokens_all = 0;
    long long tokens_labels = 0;
    long long gene_tokens_all = 0;
    long long gene_tokens_labels = 0;
};

/// Runs segmentation -> features -> forest -> panel grouping -> NER on one
/// figure. Text segments come from the figure's sidecar; lexicon may be
/// null to skip the NER step.
FigureDetection detect_figure(const Figure& figure, const ForestModel& model,
                              const DetectParams& params, const Lexicon* lexicon,
                              const StopLists* stops);

struct DetectRun {
    std::vector<FigureDetection> detections; // aligned with the input figures
    PipelineCounts counts;
    StatsReport stats;
};

DetectRun run_detect(const std::vector<Figure>& figures, const ForestModel& model,
                     const DetectParams& params, const Lexicon* lexicon, const StopLists* stops,
                     int workers);

/// One JSON line per panel: figure_id, panel_id, region, members, labels.
std::string panels_to_jsonl(const Figure& figure, const FigureDetection& detection);
std::string mentions_to_jsonl(const FigureDetection& detection);

/// Feature vectors plus gel labels for every sidecar Graphic segment of
/// figures that carry ground truth.
struct SegmentDataset {
    std::vector<LabeledSample> samples;
    std::vector<std::pair<std::string, int>> keys; // (figure_id, segment_id)
    long long figures_used = 0;
    long long figures_without_truth = 0;
};

SegmentDataset build_segment_dataset(const std::vector<Figure>& figures, int workers);

struct ThresholdMetrics {
    double threshold = 0.0;
    Metrics metrics;
};

struct SegmentEval {
    double auc = 0.0;
    long long n_pos = 0;
    long long n_neg = 0;
    std::vector<ThresholdMetrics> at_threshold;
    std::vector<std::pair<double, int>> scores; // (probability, label)
};

/// Scores sidecar Graphic segments of ground-truthed figures against the
/// model: ROC AUC plus precision/recall/F at each configured threshold.
SegmentEval evaluate_segments(const std::vector<Figure>& figures, const ForestModel& model,
                              const Thresholds& thresholds, int workers);

/// Matches detected panel regions against ground-truth panel regions
/// (union bbox of member segments), figure by figure.
Metrics evaluate_panels(const std::vector<Figure>& figures,
                        const std::vector<FigureDetection>& detections, double iou_min);

/// Tiles ground-truthed figures and labels each tile by whether its center
/// falls inside a gel segment. Each class is capped at max_tiles / 2 by
/// deterministic striding.
TileSet build_tile_dataset(const std::vector<Figure>& figures, int max_tiles);

std::string segment_eval_to_json(const SegmentEval& eval, const Metrics& panel_metrics,
                                 double iou_min);

} // namespace gelmine
