// gelmine: gel panel detection and label mining on figure corpora.
//
// Subcommands: synth, features, train-forest, detect, train-convnet, mask,
// eval. Logs go to stderr, machine-readable output to files or stdout.

#include "gelmine/config.hpp"
#include "gelmine/corpus.hpp"
#include "gelmine/features.hpp"
#include "gelmine/parallel.hpp"
#include "gelmine/pipeline.hpp"
#include "gelmine/synth.hpp"
#include "gelmine/util.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace gelmine;

struct CommonOptions {
    std::string config_path;
    std::string corpus;
    std::string out;
    std::string model;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = -1;
    int n_figures = -1;
    int first_index = -1;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config_path, "configuration file (key = value lines)");
    cmd->add_option("--corpus", opt.corpus, "corpus root directory");
    cmd->add_option("--out", opt.out, "output directory or file");
    cmd->add_option("--model", opt.model, "model file path");
    cmd->add_option("--seed", opt.seed, "global seed")->each([&opt](const std::string&) {
        opt.seed_given = true;
    });
    cmd->add_option("--workers", opt.workers, "worker threads (0 = all cores)");
    cmd->add_option("--set", opt.overrides, "extra key=value config override")
        ->type_name("KEY=VALUE");
}

PipelineConfig make_config(const CommonOptions& opt) {
    PipelineConfig config = opt.config_path.empty()
                                ? PipelineConfig::defaults()
                                : PipelineConfig::parse(read_text_file(opt.config_path));
    if (opt.seed_given) config.seed = opt.seed;
    for (const std::string& kv : opt.overrides) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("--set expects key=value, got '" + kv + "'");
        }
        config.apply(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opt.workers >= 0) config.workers = opt.workers;
    if (!opt.corpus.empty()) config.paths.corpus_root = opt.corpus;
    if (!opt.out.empty()) config.paths.output_dir = opt.out;
    if (!opt.model.empty()) config.paths.forest_model = opt.model;
    if (opt.n_figures >= 0) config.synth.n_figures = opt.n_figures;
    if (opt.first_index >= 0) config.synth.first_index = opt.first_index;
    config.finalize();
    return config;
}

std::vector<Figure> load_corpus_figures(const PipelineConfig& config) {
    if (config.paths.corpus_root.empty()) {
        throw ValidationError("no corpus directory given (--corpus or paths.corpus_root)");
    }
    const CorpusIndex index = load_corpus(config.paths.corpus_root);
    CorpusLoadReport report = load_figures(index, config.workers);
    for (const SkippedEntry& s : report.skipped) {
        std::cerr << "warning: skipped figure " << s.id << ": " << s.reason << "\n";
    }
    std::cerr << "loaded " << report.figures.size() << " figures from "
              << config.paths.corpus_root << " (" << report.skipped.size() << " skipped)\n";
    return std::move(report.figures);
}

Lexicon load_lexicon_for(const PipelineConfig& config) {
    return Lexicon::load(config.paths.lexicon);
}

StopLists load_stoplists_for(const PipelineConfig& config) {
    StopLists stops = StopLists::defaults();
    if (!config.paths.frequent_words.empty()) {
        stops.frequent_words = StopLists::load_word_list(config.paths.frequent_words);
    }
    if (!config.paths.domain_words.empty()) {
        stops.domain_words = StopLists::load_word_list(config.paths.domain_words);
    }
    return stops;
}

DetectParams detect_params_of(const PipelineConfig& config) {
    return DetectParams{config.segmentation, config.thresholds, config.panels};
}

int cmd_synth(const CommonOptions& opt) {
    const PipelineConfig config = make_config(opt);
    config.synth.validate();
    const SynthManifest manifest =
        generate_corpus(config.synth, config.paths.output_dir, config.workers);
    std::cerr << "generated " << manifest.n_figures << " figures in " << config.paths.output_dir
              << " (gel segment ratio " << manifest.gel_segment_ratio << ")\n";
    return 0;
}

int cmd_features(const CommonOptions& opt) {
    const PipelineConfig config = make_config(opt);
    const std::vector<Figure> figures = load_corpus_figures(config);

    std::string csv = feature_csv_header() + "\n";
    for (const Figure& figure : figures) {
        std::vector<Segment> graphics;
        for (const Segment& s : figure.segments) {
            if (s.kind == SegmentKind::Graphic) graphics.push_back(s);
        }
        const std::vector<FeatureVector> fvs =
            extract_all_features(figure, graphics, config.workers);
        for (std::size_t i = 0; i < graphics.size(); ++i) {
            std::string label;
            if (figure.ground_truth) {
                label = figure.ground_truth->gel_segment_ids.count(graphics[i].id) ? "gel"
                                                                                   : "non-gel";
            }
            csv += feature_csv_row(figure.id, graphics[i].id, fvs[i], label) + "\n";
        }
    }
    std::filesystem::create_directories(config.paths.output_dir);
    const std::filesystem::path out =
        std::filesystem::path(config.paths.output_dir) / "features.csv";
    atomic_write_file(out, csv);
    std::cerr << "wrote " << out.string() << "\n";
    return 0;
}

int cmd_train_forest(const CommonOptions& opt) {
    const PipelineConfig config = make_config(opt);
    const std::vector<Figure> figures = load_corpus_figures(config);
    const SegmentDataset dataset = build_segment_dataset(figures, config.workers);
    if (dataset.figures_without_truth > 0) {
        std::cerr << "warning: " << dataset.figures_without_truth
                  << " figures without ground truth were ignored\n";
    }
    std::cerr << "training on " << dataset.samples.size() << " segments from "
              << dataset.figures_used << " figures\n";
    const ForestModel model = train_forest(dataset.samples, config.forest, config.workers);
    save_forest(config.paths.forest_model, model);
    std::cerr << "wrote " << config.paths.forest_model << " (" << model.trees.size()
              << " trees, " << model.training_meta.n_pos << " gel / "
              << model.training_meta.n_neg << " non-gel)\n";
    return 0;
}

int cmd_detect(const CommonOptions& opt) {
    const PipelineConfig config = make_config(opt);
    const ForestModel model = load_forest(config.paths.forest_model);
    const std::vector<Figure> figures = load_corpus_figures(config);
    const Lexicon lexicon = load_lexicon_for(config);
    const StopLists stops = load_stoplists_for(config);

    const DetectRun run =
        run_detect(figures, model, detect_params_of(config), &lexicon, &stops, config.workers);

    std::filesystem::create_directories(config.paths.output_dir);
    std::string panels_jsonl, mentions_jsonl;
    for (std::size_t i = 0; i < figures.size(); ++i) {
        panels_jsonl += panels_to_jsonl(figures[i], run.detections[i]);
        mentions_jsonl += mentions_to_jsonl(run.detections[i]);
    }
    const std::filesystem::path out_dir(config.paths.output_dir);
    atomic_write_file(out_dir / "panels.jsonl", panels_jsonl);
    atomic_write_file(out_dir / "mentions.jsonl", mentions_jsonl);
    atomic_write_file(out_dir / "stats.json", stats_to_json(run.stats));
    atomic_write_file(out_dir / "stats.txt", stats_to_text(run.stats));
    std::cout << stats_to_text(run.stats);
    std::cerr << "wrote panels.jsonl, mentions.jsonl, stats.json, stats.txt to "
              << config.paths.output_dir << "\n";
    return 0;
}

int cmd_train_convnet(const CommonOptions& opt) {
    const PipelineConfig config = make_config(opt);
    const std::vector<Figure> figures = load_corpus_figures(config);
    const TileSet tiles = build_tile_dataset(figures, config.convnet_max_tiles);
    std::cerr << "training on " << tiles.tiles.size() << " tiles\n";
    const ConvNetModel model = train_convnet(tiles, config.convnet);
    save_convnet(config.paths.convnet_model, model);
    std::cerr << "wrote " << config.paths.convnet_model << "\n";
    return 0;
}

int cmd_mask(const CommonOptions& opt) {
    const PipelineConfig config = make_config(opt);
    const ConvNetModel model = load_convnet(config.paths.convnet_model);
    const std::vector<Figure> figures = load_corpus_figures(config);
    std::filesystem::create_directories(config.paths.output_dir);

    for (const Figure& figure : figures) {
        const TileSet tiles = tile_image(figure);
        std::vector<TilePrediction> predictions(tiles.tiles.size());
        parallel_for(tiles.tiles.size(), config.workers, [&](std::size_t i) {
            const std::array<double, 2> probs = forward(model, tiles.tiles[i].pixels);
            predictions[i] = {tiles.tiles[i].x, tiles.tiles[i].y, probs[1] >= probs[0]};
        });
        const Image mask = reconstruct_mask(figure.image.width, figure.image.height, kTileSize,
                                            predictions, tiles.skipped);
        const std::filesystem::path out =
            std::filesystem::path(config.paths.output_dir) / (figure.id + ".mask.png");
        std::filesystem::create_directories(out.parent_path());
        save_png(out, mask);
    }
    std::cerr << "wrote " << figures.size() << " masks to " << config.paths.output_dir << "\n";
    return 0;
}

int cmd_eval(const CommonOptions& opt) {
    const PipelineConfig config = make_config(opt);
    const ForestModel model = load_forest(config.paths.forest_model);
    const std::vector<Figure> figures = load_corpus_figures(config);

    const SegmentEval seg_eval =
        evaluate_segments(figures, model, config.thresholds, config.workers);
    const DetectRun run = run_detect(figures, model, detect_params_of(config), nullptr, nullptr,
                                     config.workers);
    const Metrics panel_metrics = evaluate_panels(figures, run.detections, config.eval_iou_min);

    const std::string report = segment_eval_to_json(seg_eval, panel_metrics, config.eval_iou_min);
    std::filesystem::create_directories(config.paths.output_dir);
    atomic_write_file(std::filesystem::path(config.paths.output_dir) / "metrics.json", report);
    std::cout << report;
    std::cerr << "segment AUC " << seg_eval.auc << ", panel precision " << panel_metrics.precision
              << ", recall " << panel_metrics.recall << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gel panel detection and label mining"};
    app.require_subcommand(1);

    CommonOptions opt;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic figure corpus");
    synth->add_option("--n", opt.n_figures, "number of figures");
    synth->add_option("--first-index", opt.first_index, "index of the first figure");
    CLI::App* features = app.add_subcommand("features", "dump segment features as CSV");
    CLI::App* train_forest = app.add_subcommand("train-forest", "train the segment classifier");
    CLI::App* detect = app.add_subcommand("detect", "detect panels and extract gene mentions");
    CLI::App* train_convnet = app.add_subcommand("train-convnet", "train the tile classifier");
    CLI::App* mask = app.add_subcommand("mask", "write tile classification masks");
    CLI::App* eval = app.add_subcommand("eval", "evaluate against ground truth");
    for (CLI::App* cmd : {synth, features, train_forest, detect, train_convnet, mask, eval}) {
        add_common(cmd, opt);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Usage problems exit 1; --help exits 0.
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            return app.exit(e);
        }
        app.exit(e);
        return 1;
    }

    try {
        if (synth->parsed()) return cmd_synth(opt);
        if (features->parsed()) return cmd_features(opt);
        if (train_forest->parsed()) return cmd_train_forest(opt);
        if (detect->parsed()) return cmd_detect(opt);
        if (train_convnet->parsed()) return cmd_train_convnet(opt);
        if (mask->parsed()) return cmd_mask(opt);
        if (eval->parsed()) return cmd_eval(opt);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
