#include "gelmine/config.hpp"

#include "gelmine/util.hpp"

#include <charconv>
#include <sstream>

namespace gelmine {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

int to_int(const std::string& key, const std::string& v) {
    int out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw ValidationError("config key " + key + ": not an integer: '" + v + "'");
    }
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw ValidationError("config key " + key + ": not an unsigned integer: '" + v + "'");
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw ValidationError("config key " + key + ": not a number: '" + v + "'");
    }
    return out;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ",";
        out += items[i];
    }
    return out;
}

} // namespace

PipelineConfig PipelineConfig::defaults() {
    PipelineConfig config;
    config.synth = SynthSpec::defaults();
    return config;
}

PipelineConfig PipelineConfig::parse(const std::string& text) {
    PipelineConfig config = defaults();
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) +
                                  " is not 'key = value'");
        }
        config.apply(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    config.finalize();
    return config;
}

void PipelineConfig::apply(const std::string& key, const std::string& value) {
    if (key == "seed") {
        seed = to_u64(key, value);
    } else if (key == "workers") {
        workers = to_int(key, value);
    } else if (key == "eval.iou_min") {
        eval_iou_min = to_double(key, value);
    } else if (key == "paths.corpus_root") {
        paths.corpus_root = value;
    } else if (key == "paths.forest_model") {
        paths.forest_model = value;
    } else if (key == "paths.convnet_model") {
        paths.convnet_model = value;
    } else if (key == "paths.lexicon") {
        paths.lexicon = value;
    } else if (key == "paths.frequent_words") {
        paths.frequent_words = value;
    } else if (key == "paths.domain_words") {
        paths.domain_words = value;
    } else if (key == "paths.output_dir") {
        paths.output_dir = value;
    } else if (key == "segmentation.binarize_threshold") {
        segmentation.binarize_threshold = to_int(key, value);
    } else if (key == "segmentation.min_area") {
        segmentation.min_area = to_int(key, value);
    } else if (key == "segmentation.rect_uniformity_sigma") {
        segmentation.rect_uniformity_sigma = to_double(key, value);
    } else if (key == "segmentation.rect_min_side") {
        segmentation.rect_min_side = to_int(key, value);
    } else if (key == "segmentation.merge_iou") {
        segmentation.merge_iou = to_double(key, value);
    } else if (key == "forest.n_trees") {
        forest.n_trees = to_int(key, value);
    } else if (key == "forest.features_per_split") {
        forest.features_per_split = to_int(key, value);
    } else if (key == "forest.min_leaf") {
        forest.min_leaf = to_int(key, value);
    } else if (key == "forest.max_depth") {
        forest.max_depth = to_int(key, value);
    } else if (key == "forest.seed") {
        forest.seed = to_u64(key, value);
        forest_seed_set_ = true;
    } else if (key == "thresholds.high_recall") {
        thresholds.high_recall = to_double(key, value);
    } else if (key == "thresholds.balanced") {
        thresholds.balanced = to_double(key, value);
    } else if (key == "thresholds.high_precision") {
        thresholds.high_precision = to_double(key, value);
    } else if (key == "panels.seed_threshold") {
        panels.seed_threshold = to_double(key, value);
    } else if (key == "panels.expand_threshold") {
        panels.expand_threshold = to_double(key, value);
    } else if (key == "panels.max_gap") {
        panels.max_gap = to_double(key, value);
    } else if (key == "panels.label_near") {
        panels.label_near = to_double(key, value);
    } else if (key == "panels.label_far") {
        panels.label_far = to_double(key, value);
    } else if (key == "convnet.lr") {
        convnet.lr = to_double(key, value);
    } else if (key == "convnet.epochs") {
        convnet.epochs = to_int(key, value);
    } else if (key == "convnet.batch") {
        convnet.batch = to_int(key, value);
    } else if (key == "convnet.seed") {
        convnet.seed = to_u64(key, value);
        convnet_seed_set_ = true;
    } else if (key == "convnet.max_tiles") {
        convnet_max_tiles = to_int(key, value);
    } else if (key == "synth.n_figures") {
        synth.n_figures = to_int(key, value);
    } else if (key == "synth.first_index") {
        synth.first_index = to_int(key, value);
    } else if (key == "synth.min_width") {
        synth.min_width = to_int(key, value);
    } else if (key == "synth.max_width") {
        synth.max_width = to_int(key, value);
    } else if (key == "synth.min_height") {
        synth.min_height = to_int(key, value);
    } else if (key == "synth.max_height") {
        synth.max_height = to_int(key, value);
    } else if (key == "synth.panel_probability") {
        synth.panel_probability = to_double(key, value);
    } else if (key == "synth.second_panel_probability") {
        synth.second_panel_probability = to_double(key, value);
    } else if (key == "synth.min_rows") {
        synth.min_rows = to_int(key, value);
    } else if (key == "synth.max_rows") {
        synth.max_rows = to_int(key, value);
    } else if (key == "synth.min_lanes") {
        synth.min_lanes = to_int(key, value);
    } else if (key == "synth.max_lanes") {
        synth.max_lanes = to_int(key, value);
    } else if (key == "synth.light_on_dark_probability") {
        synth.light_on_dark_probability = to_double(key, value);
    } else if (key == "synth.blob_strength") {
        synth.blob_strength = to_double(key, value);
    } else if (key == "synth.blob_jitter") {
        synth.blob_jitter = to_double(key, value);
    } else if (key == "synth.blob_presence") {
        synth.blob_presence = to_double(key, value);
    } else if (key == "synth.ocr_noise_rate") {
        synth.ocr_noise_rate = to_double(key, value);
    } else if (key == "synth.gene_symbols") {
        synth.gene_symbols = split_list(value);
    } else if (key == "synth.other_words") {
        synth.other_words = split_list(value);
    } else if (key == "synth.seed") {
        synth.seed = to_u64(key, value);
        synth_seed_set_ = true;
    } else {
        throw ValidationError("unknown config key: " + key);
    }
}

void PipelineConfig::finalize() {
    if (!forest_seed_set_) forest.seed = seed;
    if (!convnet_seed_set_) convnet.seed = seed;
    if (!synth_seed_set_) synth.seed = seed;
    forest_seed_set_ = convnet_seed_set_ = synth_seed_set_ = true;
}

std::string PipelineConfig::serialize() const {
    std::ostringstream out;
    out << "seed = " << seed << "\n";
    out << "workers = " << workers << "\n";
    out << "eval.iou_min = " << format_double(eval_iou_min) << "\n";
    out << "paths.corpus_root = " << paths.corpus_root << "\n";
    out << "paths.forest_model = " << paths.forest_model << "\n";
    out << "paths.convnet_model = " << paths.convnet_model << "\n";
    out << "paths.lexicon = " << paths.lexicon << "\n";
    out << "paths.frequent_words = " << paths.frequent_words << "\n";
    out << "paths.domain_words = " << paths.domain_words << "\n";
    out << "paths.output_dir = " << paths.output_dir << "\n";
    out << "segmentation.binarize_threshold = " << segmentation.binarize_threshold << "\n";
    out << "segmentation.min_area = " << segmentation.min_area << "\n";
    out << "segmentation.rect_uniformity_sigma = "
        << format_double(segmentation.rect_uniformity_sigma) << "\n";
    out << "segmentation.rect_min_side = " << segmentation.rect_min_side << "\n";
    out << "segmentation.merge_iou = " << format_double(segmentation.merge_iou) << "\n";
    out << "forest.n_trees = " << forest.n_trees << "\n";
    out << "forest.features_per_split = " << forest.features_per_split << "\n";
    out << "forest.min_leaf = " << forest.min_leaf << "\n";
    out << "forest.max_depth = " << forest.max_depth << "\n";
    out << "forest.seed = " << forest.seed << "\n";
    out << "thresholds.high_recall = " << format_double(thresholds.high_recall) << "\n";
    out << "thresholds.balanced = " << format_double(thresholds.balanced) << "\n";
    out << "thresholds.high_precision = " << format_double(thresholds.high_precision) << "\n";
    out << "panels.seed_threshold = " << format_double(panels.seed_threshold) << "\n";
    out << "panels.expand_threshold = " << format_double(panels.expand_threshold) << "\n";
    out << "panels.max_gap = " << format_double(panels.max_gap) << "\n";
    out << "panels.label_near = " << format_double(panels.label_near) << "\n";
    out << "panels.label_far = " << format_double(panels.label_far) << "\n";
    out << "convnet.lr = " << format_double(convnet.lr) << "\n";
    out << "convnet.epochs = " << convnet.epochs << "\n";
    out << "convnet.batch = " << convnet.batch << "\n";
    out << "convnet.seed = " << convnet.seed << "\n";
    out << "convnet.max_tiles = " << convnet_max_tiles << "\n";
    out << "synth.n_figures = " << synth.n_figures << "\n";
    out << "synth.first_index = " << synth.first_index << "\n";
    out << "synth.min_width = " << synth.min_width << "\n";
    out << "synth.max_width = " << synth.max_width << "\n";
    out << "synth.min_height = " << synth.min_height << "\n";
    out << "synth.max_height = " << synth.max_height << "\n";
    out << "synth.panel_probability = " << format_double(synth.panel_probability) << "\n";
    out << "synth.second_panel_probability = " << format_double(synth.second_panel_probability)
        << "\n";
    out << "synth.min_rows = " << synth.min_rows << "\n";
    out << "synth.max_rows = " << synth.max_rows << "\n";
    out << "synth.min_lanes = " << synth.min_lanes << "\n";
    out << "synth.max_lanes = " << synth.max_lanes << "\n";
    out << "synth.light_on_dark_probability = " << format_double(synth.light_on_dark_probability)
        << "\n";
    out << "synth.blob_strength = " << format_double(synth.blob_strength) << "\n";
    out << "synth.blob_jitter = " << format_double(synth.blob_jitter) << "\n";
    out << "synth.blob_presence = " << format_double(synth.blob_presence) << "\n";
    out << "synth.ocr_noise_rate = " << format_double(synth.ocr_noise_rate) << "\n";
    out << "synth.gene_symbols = " << join_list(synth.gene_symbols) << "\n";
    out << "synth.other_words = " << join_list(synth.other_words) << "\n";
    out << "synth.seed = " << synth.seed << "\n";
    return out.str();
}

} // namespace gelmine
