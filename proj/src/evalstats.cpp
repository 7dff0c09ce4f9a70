#include "gelmine/evalstats.hpp"

#include "gelmine/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace gelmine {

using nlohmann::json;

double f_score_of(double precision, double recall) {
    const double denom = precision + recall;
    if (denom <= 0.0) return 0.0;
    return 2.0 * precision * recall / denom;
}

Metrics Metrics::from_counts(long long tp, long long fp, long long fn, long long tn) {
    Metrics m;
    m.tp = tp;
    m.fp = fp;
    m.fn = fn;
    m.tn = tn;
    if (tp + fp > 0) {
        m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    } else {
        m.precision_defined = false;
    }
    if (tp + fn > 0) {
        m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    } else {
        m.recall_defined = false;
    }
    m.f_score = f_score_of(m.precision, m.recall);
    return m;
}

double roc_auc(std::span<const std::pair<double, int>> scores) {
    long long n_pos = 0, n_neg = 0;
    for (const auto& [score, label] : scores) {
        (label ? n_pos : n_neg) += 1;
    }
    if (n_pos == 0 || n_neg == 0) {
        throw ValidationError("roc_auc needs both classes present");
    }
    std::vector<std::pair<double, int>> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // Mann-Whitney U: for every positive, count negatives scoring below it,
    // ties counting one half. Walk groups of equal scores.
    double u = 0.0;
    long long neg_below = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        long long group_pos = 0, group_neg = 0;
        while (j < sorted.size() && sorted[j].first == sorted[i].first) {
            (sorted[j].second ? group_pos : group_neg) += 1;
            ++j;
        }
        u += static_cast<double>(group_pos) *
             (static_cast<double>(neg_below) + 0.5 * static_cast<double>(group_neg));
        neg_below += group_neg;
        i = j;
    }
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

Metrics match_panels(std::span<const BoundingBox> detected, std::span<const BoundingBox> truth,
                     double iou_min) {
    struct Pair {
        double iou;
        std::size_t det;
        std::size_t tru;
    };
    std::vector<Pair> pairs;
    for (std::size_t d = 0; d < detected.size(); ++d) {
        for (std::size_t t = 0; t < truth.size(); ++t) {
            const double iou = box_iou(detected[d], truth[t]);
            if (iou >= iou_min) pairs.push_back({iou, d, t});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.det != b.det) return a.det < b.det;
        return a.tru < b.tru;
    });
    std::vector<bool> det_used(detected.size(), false);
    std::vector<bool> tru_used(truth.size(), false);
    long long tp = 0;
    for (const Pair& p : pairs) {
        if (det_used[p.det] || tru_used[p.tru]) continue;
        det_used[p.det] = true;
        tru_used[p.tru] = true;
        ++tp;
    }
    return Metrics::from_counts(tp, static_cast<long long>(detected.size()) - tp,
                                static_cast<long long>(truth.size()) - tp);
}

StatsReport corpus_stats(const PipelineCounts& counts) {
    StatsReport report;
    report.counts = counts;
    const auto ratio = [&report](long long num, long long denom, const char* name) {
        if (denom > 0) return static_cast<double>(num) / static_cast<double>(denom);
        report.warnings.push_back(std::string(name) + ": zero denominator");
        return 0.0;
    };
    report.panels_per_figure =
        ratio(counts.panels_detected, counts.figures_processed, "panels_per_figure");
    report.labels_per_panel =
        ratio(counts.labels_detected, counts.panels_detected, "labels_per_panel");
    report.gene_ratio_all = ratio(counts.gene_tokens_total, counts.tokens_total, "gene_ratio_all");
    report.gene_ratio_labels =
        ratio(counts.gene_tokens_in_labels, counts.tokens_in_labels, "gene_ratio_labels");
    return report;
}

std::string stats_to_text(const StatsReport& r) {
    std::ostringstream out;
    const auto row = [&out](const std::string& name, const std::string& value) {
        out << std::left << std::setw(36) << name << std::right << std::setw(12) << value << "\n";
    };
    const auto num = [](long long v) { return std::to_string(v); };
    const auto rat = [](double v) {
        std::ostringstream ss;
        ss << std::fixed << std::setprecision(3) << v;
        return ss.str();
    };
    row("Processed figures", num(r.counts.figures_processed));
    row("Detected gel panels", num(r.counts.panels_detected));
    row("Detected gel panels per figure", rat(r.panels_per_figure));
    row("Detected gel labels", num(r.counts.labels_detected));
    row("Detected gel labels per panel", rat(r.labels_per_panel));
    row("Detected gene tokens", num(r.counts.gene_tokens_total));
    row("Detected gene tokens in gel labels", num(r.counts.gene_tokens_in_labels));
    row("Gene token ratio", rat(r.gene_ratio_all));
    row("Gene token ratio in gel labels", rat(r.gene_ratio_labels));
    for (const std::string& w : r.warnings) out << "warning: " << w << "\n";
    return out.str();
}

std::string stats_to_json(const StatsReport& r) {
    json root;
    root["version"] = 1;
    root["counts"] = {{"figures_processed", r.counts.figures_processed},
                      {"panels_detected", r.counts.panels_detected},
                      {"labels_detected", r.counts.labels_detected},
                      {"gene_tokens_total", r.counts.gene_tokens_total},
                      {"gene_tokens_in_labels", r.counts.gene_tokens_in_labels},
                      {"tokens_total", r.counts.tokens_total},
                      {"tokens_in_labels", r.counts.tokens_in_labels}};
    root["panels_per_figure"] = r.panels_per_figure;
    root["labels_per_panel"] = r.labels_per_panel;
    root["gene_ratio_all"] = r.gene_ratio_all;
    root["gene_ratio_labels"] = r.gene_ratio_labels;
    root["warnings"] = r.warnings;
    return root.dump(2) + "\n";
}

} // namespace gelmine
