#pragma once

#include "gelmine/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gelmine {

/// Parameters of the synthetic figure generator. The seed fully determines
/// every figure; figure `index` draws from a stream derived from
/// (seed, index), so corpora can be generated in disjoint index ranges.
struct SynthSpec {
    int n_figures = 100;
    int first_index = 0;

    int min_width = 420;
    int max_width = 780;
    int min_height = 320;
    int max_height = 600;

    double panel_probability = 0.6;        // chance of a first gel panel
    double second_panel_probability = 0.2; // chance of a second one
    int min_rows = 1;
    int max_rows = 3;
    int min_lanes = 2;
    int max_lanes = 8;
    double light_on_dark_probability = 0.15;
    double blob_strength = 1.0;  // scales spot darkness
    double blob_jitter = 2.0;    // spot center jitter, pixels
    double blob_presence = 0.9;  // chance a lane shows a spot

    double ocr_noise_rate = 0.0; // sidecar text character mutation rate

    std::vector<std::string> gene_symbols; // defaults on empty, see defaults()
    std::vector<std::string> other_words;

    std::uint64_t seed = 0;

    static SynthSpec defaults();
    void validate() const;
};

/// Tokens the default generator uses; both lists ship in the repo lexicon /
/// stop lists as well.
const std::vector<std::string>& default_gene_symbols();
const std::vector<std::string>& default_other_words();

struct SynthFigure {
    Figure figure; // segments and ground truth attached
    std::string sidecar_json;
    int blob_count = 0;
    std::vector<std::pair<int, int>> blob_centers; // for verification
};

SynthFigure generate_figure(const SynthSpec& spec, int index);

struct SynthFigureSummary {
    std::string id;
    int width = 0;
    int height = 0;
    int segments = 0;
    int graphic_segments = 0;
    int text_segments = 0;
    int gel_segments = 0;
    int panels = 0;
    int gene_tokens = 0;
    int blobs = 0;
};

struct SynthManifest {
    int n_figures = 0;
    int first_index = 0;
    std::uint64_t seed = 0;
    std::vector<SynthFigureSummary> figures;
    long long total_segments = 0;
    long long total_gel_segments = 0;
    long long total_panels = 0;
    long long total_gene_tokens = 0;
    double gel_segment_ratio = 0.0;
};

/// Writes `<id>.png` + `<id>.sidecar.json` per figure plus `manifest.json`.
/// On failure the files written by this run are removed before rethrowing.
SynthManifest generate_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir,
                              int workers = 1);

std::string manifest_to_json(const SynthManifest& manifest);

} // namespace gelmine
