#pragma once

#include "gelmine/convnet.hpp"
#include "gelmine/forest.hpp"
#include "gelmine/panels.hpp"
#include "gelmine/segmentation.hpp"
#include "gelmine/synth.hpp"

#include <string>

namespace gelmine {

struct PipelinePaths {
    std::string corpus_root;
    std::string forest_model = "forest.json";
    std::string convnet_model = "convnet.json";
    std::string lexicon = "data/lexicon.tsv";
    std::string frequent_words = "data/stoplists/frequent_words.txt";
    std::string domain_words; // empty = the built-in 22-word list
    std::string output_dir = "out";
};

/// Every tunable of the pipeline, parsed from a `key = value` text file.
/// Module seeds default to the global seed unless set explicitly.
struct PipelineConfig {
    PipelinePaths paths;
    SegmentationParams segmentation;
    ForestParams forest;
    Thresholds thresholds;
    PanelParams panels;
    ConvNetHyper convnet;
    int convnet_max_tiles = 4000; // training tile cap per run
    SynthSpec synth;
    double eval_iou_min = 0.5;
    std::uint64_t seed = 0;
    int workers = 0; // 0 = all cores

    static PipelineConfig defaults();
    static PipelineConfig parse(const std::string& text);

    /// Applies one `key = value` override (same keys as the file).
    void apply(const std::string& key, const std::string& value);

    /// Copies the global seed into module seeds that were never set.
    void finalize();

    std::string serialize() const;

private:
    bool forest_seed_set_ = false;
    bool convnet_seed_set_ = false;
    bool synth_seed_set_ = false;
};

} // namespace gelmine
