// Command-line entry point. All options live on the root app and mirror the
// PipelineConfig keys, so a flat key=value config file (--config) and
// per-flag overrides address the same names. Unknown keys are hard errors.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lungsound/cli.hpp"
#include "lungsound/config.hpp"

int main(int argc, char** argv) {
    using namespace lungsound;

    PipelineConfig cfg;
    std::vector<std::string> predict_inputs;
    std::string report_path;

    CLI::App app{"lung sound cycle classification toolkit"};
    app.set_config("--config", "", "flat key=value config file");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.fallthrough();
    app.require_subcommand(1);

    app.add_option("--data_dir", cfg.data_dir, "directory of WAV + annotation pairs");
    app.add_option("--cache_dir", cfg.cache_dir, "feature cache directory");
    app.add_option("--out_dir", cfg.out_dir, "output directory for reports / synth corpora");
    app.add_option("--model_path", cfg.model_path, "classifier bundle file (LSWT)");
    app.add_option("--colormap_path", cfg.colormap_path, "256-line 'r g b' colormap file");
    app.add_option("--duration_s", cfg.duration_s, "cycle duration after padding (s)");
    app.add_option("--sample_rate", cfg.sample_rate, "pipeline sample rate (Hz)");
    app.add_option("--frame_ms", cfg.frame_ms, "analysis frame length (ms)");
    app.add_option("--hop_ms", cfg.hop_ms, "frame hop (ms)");
    app.add_option("--n_mels", cfg.n_mels, "mel bands");
    app.add_option("--n_mfcc", cfg.n_mfcc, "MFCC coefficients kept");
    app.add_option("--fmin", cfg.fmin, "filterbank low edge (Hz)");
    app.add_option("--fmax", cfg.fmax, "filterbank high edge (Hz, 0 = Nyquist)");
    app.add_option("--log_floor", cfg.log_floor, "power floor before log");
    app.add_option("--image_size", cfg.image_size, "feature image side length");
    app.add_option("--feature_source", cfg.feature_source,
                   "mfcc | logmel | colormapped-logmel");
    app.add_option("--extractor_weights", cfg.extractor_weights,
                   "extractor weight file (empty: seeded random)");
    app.add_option("--extractor_seed", cfg.extractor_seed, "seed for the random extractor");
    app.add_option("--channels", cfg.channels, "per-block channel widths, 5 comma-separated");
    app.add_option("--learning_rate", cfg.learning_rate, "head SGD learning rate");
    app.add_option("--batch_size", cfg.batch_size, "head SGD batch size");
    app.add_option("--epochs", cfg.epochs, "head SGD epochs");
    app.add_option("--l2", cfg.l2, "head L2 penalty");
    app.add_option("--k", cfg.k, "cross-validation folds");
    app.add_option("--seed", cfg.seed, "global seed (folds, training, synth)");
    app.add_option("--per_class", cfg.per_class, "synth cycles per class");
    app.add_option("--synth_sample_rate", cfg.synth_sample_rate, "synth corpus rate (Hz)");
    app.add_option("--cycle_s", cfg.cycle_s, "synth cycle duration (s)");
    app.add_option("--wheeze_low", cfg.wheeze_low, "synth wheeze band low edge (Hz)");
    app.add_option("--wheeze_high", cfg.wheeze_high, "synth wheeze band high edge (Hz)");
    app.add_option("--crackle_rate", cfg.crackle_rate, "synth crackle events per second");
    app.add_option("--snr_db", cfg.snr_db, "synth event-to-noise ratio (dB)");
    app.add_option("--threads", cfg.threads, "worker threads (0 = hardware)");

    auto* summarize = app.add_subcommand("summarize", "class counts for a data directory");
    auto* featurize = app.add_subcommand("featurize", "build the feature cache");
    auto* train = app.add_subcommand("train", "train the softmax head, save the bundle");
    auto* predict = app.add_subcommand("predict", "per-cycle predictions for WAV inputs");
    predict->add_option("inputs", predict_inputs, "WAV files (default: data_dir)");
    auto* cv = app.add_subcommand("cv", "patient-disjoint k-fold cross-validation");
    auto* synth = app.add_subcommand("synth", "emit a synthetic labeled corpus");
    auto* report = app.add_subcommand("report", "render a report.json as text");
    report->add_option("report_json", report_path, "path (default: <out_dir>/report.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : lungsound::cli::kExitUsage;
    }

    if (summarize->parsed()) return cli::cmd_summarize(cfg);
    if (featurize->parsed()) return cli::cmd_featurize(cfg);
    if (train->parsed()) return cli::cmd_train(cfg);
    if (predict->parsed()) return cli::cmd_predict(cfg, predict_inputs);
    if (cv->parsed()) return cli::cmd_cv(cfg);
    if (synth->parsed()) return cli::cmd_synth(cfg);
    if (report->parsed()) return cli::cmd_report(cfg, report_path);
    return cli::kExitUsage;
}
