#include "gelmine/pipeline.hpp"

#include "gelmine/features.hpp"
#include "gelmine/parallel.hpp"
#include "gelmine/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace gelmine {

using nlohmann::json;

FigureDetection detect_figure(const Figure& figure, const ForestModel& model,
                              const DetectParams& params, const Lexicon* lexicon,
                              const StopLists* stops) {
    FigureDetection out;
    out.figure_id = figure.id;

    const GrayImage gray = to_gray(figure.image);
    const std::vector<Segment> components = detect_components(gray, params.segmentation);
    const std::vector<Segment> rectangles =
        detect_low_contrast_rectangles(gray, params.segmentation);
    std::vector<Segment> merged =
        merge_segment_sets(components, rectangles, params.segmentation.merge_iou);

    // Detected ids continue after the sidecar's so the two never collide.
    const int id_base = figure.max_segment_id() + 1;
    for (Segment& s : merged) s.id += id_base;
    out.detected_graphics = std::move(merged);

    for (const Segment& s : out.detected_graphics) {
        const FeatureVector fv = extract_features(figure.image, gray, figure.segments, s);
        out.proba[s.id] = predict_proba(model, fv);
    }

    // Panel grouping sees the detected graphics plus the sidecar texts.
    std::vector<Segment> grouping_input;
    for (const Segment& s : figure.segments) {
        if (s.kind == SegmentKind::Text) grouping_input.push_back(s);
    }
    grouping_input.insert(grouping_input.end(), out.detected_graphics.begin(),
                          out.detected_graphics.end());

    const std::vector<GelRegion> regions =
        group_gel_segments(grouping_input, out.proba, params.panels);
    out.panels = attach_labels(regions, grouping_input, params.panels);

    if (lexicon && stops) {
        std::set<int> label_ids;
        for (const GelPanel& p : out.panels) {
            label_ids.insert(p.label_segment_ids.begin(), p.label_segment_ids.end());
        }
        std::map<int, int> panel_of_label;
        for (const GelPanel& p : out.panels) {
            for (int id : p.label_segment_ids) panel_of_label[id] = p.id;
        }
        for (const Segment& s : figure.segments) {
            if (s.kind != SegmentKind::Text) continue;
            const std::vector<std::string> tokens = tokenize(s.text);
            const std::vector<GeneMention> found = match_genes(tokens, *lexicon, *stops);
            out.tokens_all += static_cast<long long>(tokens.size());
            out.gene_tokens_all += static_cast<long long>(found.size());
            if (label_ids.count(s.id)) {
                out.tokens_labels += static_cast<long long>(tokens.size());
                out.gene_tokens_labels += static_cast<long long>(found.size());
                for (GeneMention m : found) {
                    m.figure_id = figure.id;
                    m.panel_id = panel_of_label.at(s.id);
                    m.label_segment_id = s.id;
                    out.mentions.push_back(std::move(m));
                }
            }
        }
    }
    return out;
}

DetectRun run_detect(const std::vector<Figure>& figures, const ForestModel& model,
                     const DetectParams& params, const Lexicon* lexicon, const StopLists* stops,
                     int workers) {
    DetectRun run;
    run.detections.resize(figures.size());
    parallel_for(figures.size(), workers, [&](std::size_t i) {
        run.detections[i] = detect_figure(figures[i], model, params, lexicon, stops);
    });

    run.counts.figures_processed = static_cast<long long>(figures.size());
    for (const FigureDetection& d : run.detections) {
        run.counts.panels_detected += static_cast<long long>(d.panels.size());
        for (const GelPanel& p : d.panels) {
            run.counts.labels_detected += static_cast<long long>(p.label_segment_ids.size());
        }
        run.counts.gene_tokens_total += d.gene_tokens_all;
        run.counts.gene_tokens_in_labels += d.gene_tokens_labels;
        run.counts.tokens_total += d.tokens_all;
        run.counts.tokens_in_labels += d.tokens_labels;
    }
    run.stats = corpus_stats(run.counts);
    return run;
}

std::string panels_to_jsonl(const Figure& figure, const FigureDetection& detection) {
    std::string out;
    for (const GelPanel& p : detection.panels) {
        json record;
        record["figure_id"] = detection.figure_id;
        record["panel_id"] = p.id;
        record["region"] = {p.region.x0, p.region.y0, p.region.x1, p.region.y1};
        record["members"] = p.member_segment_ids;
        json labels = json::array();
        for (int id : p.label_segment_ids) {
            const Segment* s = figure.find_segment(id);
            labels.push_back({{"segment_id", id}, {"text", s ? s->text : ""}});
        }
        record["labels"] = std::move(labels);
        out += record.dump();
        out += "\n";
    }
    return out;
}

std::string mentions_to_jsonl(const FigureDetection& detection) {
    std::string out;
    for (const GeneMention& m : detection.mentions) {
        json record;
        record["figure_id"] = m.figure_id;
        record["panel_id"] = m.panel_id;
        record["label_segment_id"] = m.label_segment_id;
        record["token"] = m.token;
        record["lexicon_id"] = m.lexicon_id;
        record["partial"] = m.partial;
        out += record.dump();
        out += "\n";
    }
    return out;
}

SegmentDataset build_segment_dataset(const std::vector<Figure>& figures, int workers) {
    struct Slot {
        std::vector<LabeledSample> samples;
        std::vector<std::pair<std::string, int>> keys;
        bool has_truth = false;
    };
    std::vector<Slot> slots(figures.size());
    parallel_for(figures.size(), workers, [&](std::size_t i) {
        const Figure& figure = figures[i];
        if (!figure.ground_truth) return;
        slots[i].has_truth = true;
        const GrayImage gray = to_gray(figure.image);
        for (const Segment& s : figure.segments) {
            if (s.kind != SegmentKind::Graphic) continue;
            LabeledSample sample;
            sample.fv = extract_features(figure.image, gray, figure.segments, s);
            sample.gel = figure.ground_truth->gel_segment_ids.count(s.id) > 0;
            slots[i].samples.push_back(std::move(sample));
            slots[i].keys.emplace_back(figure.id, s.id);
        }
    });
    SegmentDataset dataset;
    for (Slot& slot : slots) {
        if (slot.has_truth) {
            ++dataset.figures_used;
        } else {
            ++dataset.figures_without_truth;
        }
        std::move(slot.samples.begin(), slot.samples.end(), std::back_inserter(dataset.samples));
        std::move(slot.keys.begin(), slot.keys.end(), std::back_inserter(dataset.keys));
    }
    return dataset;
}

SegmentEval evaluate_segments(const std::vector<Figure>& figures, const ForestModel& model,
                              const Thresholds& thresholds, int workers) {
    const SegmentDataset dataset = build_segment_dataset(figures, workers);
    if (dataset.samples.empty()) {
        throw ValidationError("no ground-truthed segments to evaluate");
    }
    SegmentEval eval;
    eval.scores.resize(dataset.samples.size());
    parallel_for(dataset.samples.size(), workers, [&](std::size_t i) {
        eval.scores[i] = {predict_proba(model, dataset.samples[i].fv),
                          dataset.samples[i].gel ? 1 : 0};
    });
    for (const auto& [score, label] : eval.scores) {
        (label ? eval.n_pos : eval.n_neg) += 1;
    }
    eval.auc = roc_auc(eval.scores);
    for (double t : {thresholds.high_recall, thresholds.balanced, thresholds.high_precision}) {
        long long tp = 0, fp = 0, fn = 0, tn = 0;
        for (const auto& [score, label] : eval.scores) {
            const bool predicted = score >= t;
            if (predicted && label) {
                ++tp;
            } else if (predicted) {
                ++fp;
            } else if (label) {
                ++fn;
            } else {
                ++tn;
            }
        }
        eval.at_threshold.push_back({t, Metrics::from_counts(tp, fp, fn, tn)});
    }
    return eval;
}

Metrics evaluate_panels(const std::vector<Figure>& figures,
                        const std::vector<FigureDetection>& detections, double iou_min) {
    if (figures.size() != detections.size()) {
        throw ValidationError("figure/detection lists differ in length");
    }
    long long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < figures.size(); ++i) {
        std::vector<BoundingBox> detected;
        for (const GelPanel& p : detections[i].panels) detected.push_back(p.region);
        std::vector<BoundingBox> truth;
        if (figures[i].ground_truth) {
            for (const PanelTruth& p : figures[i].ground_truth->panels) {
                BoundingBox region;
                bool first = true;
                for (int id : p.member_segment_ids) {
                    const Segment* s = figures[i].find_segment(id);
                    if (!s) continue;
                    region = first ? s->bbox : box_union(region, s->bbox);
                    first = false;
                }
                if (!first) truth.push_back(region);
            }
        }
        const Metrics m = match_panels(detected, truth, iou_min);
        tp += m.tp;
        fp += m.fp;
        fn += m.fn;
    }
    return Metrics::from_counts(tp, fp, fn);
}

TileSet build_tile_dataset(const std::vector<Figure>& figures, int max_tiles) {
    TileSet positives, negatives;
    for (const Figure& figure : figures) {
        if (!figure.ground_truth) continue;
        TileSet tiles = tile_image(figure);
        for (Tile& tile : tiles.tiles) {
            const int cx = tile.x + kTileSize / 2;
            const int cy = tile.y + kTileSize / 2;
            bool gel = false;
            for (int id : figure.ground_truth->gel_segment_ids) {
                const Segment* s = figure.find_segment(id);
                if (s && s->bbox.contains(cx, cy)) {
                    gel = true;
                    break;
                }
            }
            TileSet& bucket = gel ? positives : negatives;
            bucket.tiles.push_back(std::move(tile));
            bucket.labels.push_back(gel ? 1 : 0);
        }
    }
    const auto cap = [](TileSet& set, std::size_t limit) {
        if (set.tiles.size() <= limit || limit == 0) return;
        const std::size_t stride = (set.tiles.size() + limit - 1) / limit;
        TileSet reduced;
        for (std::size_t i = 0; i < set.tiles.size(); i += stride) {
            reduced.tiles.push_back(std::move(set.tiles[i]));
            reduced.labels.push_back(set.labels[i]);
        }
        set = std::move(reduced);
    };
    cap(positives, static_cast<std::size_t>(std::max(1, max_tiles / 2)));
    cap(negatives, static_cast<std::size_t>(std::max(1, max_tiles / 2)));

    TileSet combined;
    // Interleave so per-sample SGD sees both classes early.
    const std::size_t n = std::max(positives.tiles.size(), negatives.tiles.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (i < positives.tiles.size()) {
            combined.tiles.push_back(std::move(positives.tiles[i]));
            combined.labels.push_back(1);
        }
        if (i < negatives.tiles.size()) {
            combined.tiles.push_back(std::move(negatives.tiles[i]));
            combined.labels.push_back(0);
        }
    }
    return combined;
}

std::string segment_eval_to_json(const SegmentEval& eval, const Metrics& panel_metrics,
                                 double iou_min) {
    json root;
    root["version"] = 1;
    json seg;
    seg["auc"] = eval.auc;
    seg["n_pos"] = eval.n_pos;
    seg["n_neg"] = eval.n_neg;
    json at = json::object();
    for (const ThresholdMetrics& tm : eval.at_threshold) {
        at[format_double(tm.threshold)] = {{"precision", tm.metrics.precision},
                                           {"recall", tm.metrics.recall},
                                           {"f_score", tm.metrics.f_score},
                                           {"tp", tm.metrics.tp},
                                           {"fp", tm.metrics.fp},
                                           {"fn", tm.metrics.fn},
                                           {"tn", tm.metrics.tn}};
    }
    seg["thresholds"] = std::move(at);
    root["segments"] = std::move(seg);
    root["panels"] = {{"precision", panel_metrics.precision},
                      {"recall", panel_metrics.recall},
                      {"f_score", panel_metrics.f_score},
                      {"tp", panel_metrics.tp},
                      {"fp", panel_metrics.fp},
                      {"fn", panel_metrics.fn},
                      {"iou_min", iou_min}};
    return root.dump(2) + "\n";
}

} // namespace gelmine
