#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lungsound/cache.hpp"
#include "lungsound/config.hpp"
#include "lungsound/dataset.hpp"
#include "lungsound/dsp.hpp"
#include "lungsound/eval.hpp"
#include "lungsound/imaging.hpp"
#include "lungsound/model.hpp"
#include "lungsound/wav.hpp"

namespace lungsound::pipeline {

struct CycleRecord {
    std::string identity;  // "<recording stem>#<cycle index>"
    LabeledCycle cycle;
};

struct LoadResult {
    std::vector<CycleRecord> records;
    std::vector<std::string> errors;  // one line per unusable file
};

// Scans a directory of WAV + annotation pairs (same stem, .txt) and extracts
// every annotated cycle. File problems are collected, not thrown, so the CLI
// can list all of them at once.
inline LoadResult load_directory(const std::string& data_dir) {
    namespace fs = std::filesystem;
    LoadResult result;
    if (!fs::is_directory(data_dir)) {
        result.errors.push_back(data_dir + ": not a directory");
        return result;
    }
    std::vector<fs::path> wavs;
    for (const auto& de : fs::directory_iterator(data_dir)) {
        if (!de.is_regular_file()) continue;
        auto ext = de.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        if (ext == ".wav") wavs.push_back(de.path());
    }
    std::sort(wavs.begin(), wavs.end());

    for (const auto& wav_path : wavs) {
        const std::string stem = wav_path.stem().string();
        fs::path ann_path = wav_path;
        ann_path.replace_extension(".txt");
        try {
            if (!fs::exists(ann_path)) throw io_error("missing annotation file " + ann_path.string());
            const auto meta = dataset::parse_recording_filename(stem);
            const auto clip = wav::read_file(wav_path.string());
            std::ifstream ann(ann_path);
            if (!ann) throw io_error("cannot open " + ann_path.string());
            const auto anns = dataset::parse_annotation_file(ann);
            auto cycles = dataset::extract_cycles(clip, meta, anns);
            for (std::size_t i = 0; i < cycles.size(); ++i) {
                result.records.push_back(
                    {stem + "#" + std::to_string(i), std::move(cycles[i])});
            }
        } catch (const std::exception& e) {
            result.errors.push_back(wav_path.filename().string() + ": " + e.what());
        }
    }
    return result;
}

namespace detail {

// Runs fn(i) for i in [0, n) across worker threads. Each index writes only
// its own output slot, so results do not depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

inline imaging::ImageConfig image_config(const PipelineConfig& cfg) {
    imaging::ImageConfig ic;
    ic.height = cfg.image_size;
    ic.width = cfg.image_size;
    ic.use_colormap = cfg.feature_source == "colormapped-logmel";
    if (ic.use_colormap && !cfg.colormap_path.empty())
        ic.colormap = imaging::load_colormap_file(cfg.colormap_path);
    return ic;
}

// DSP chain for one cycle, then the configured source matrix rendered as a
// fixed-size image.
inline imaging::FeatureImage featurize_to_image(
    const LabeledCycle& cycle, const PipelineConfig& cfg, const imaging::ImageConfig& ic,
    const std::vector<std::vector<double>>& shared_bank = {}) {
    const auto features = dsp::featurize_cycle(cycle, cfg.dsp_settings(), shared_bank);
    const auto& matrix =
        cfg.feature_source == "mfcc" ? features.mfcc.values : features.log_mel.values;
    return imaging::to_feature_image(matrix, ic);
}

// Images for every record, in input order.
inline std::vector<imaging::FeatureImage> build_images(const std::vector<CycleRecord>& records,
                                                       const PipelineConfig& cfg) {
    const auto ic = image_config(cfg);
    const auto settings = cfg.dsp_settings();
    const auto bank = dsp::mel_filterbank(settings.mel, dsp::pipeline_n_fft(settings),
                                          settings.sample_rate);
    std::vector<imaging::FeatureImage> images(records.size());
    detail::parallel_for(records.size(), cfg.threads, [&](std::size_t i) {
        images[i] = featurize_to_image(records[i].cycle, cfg, ic, bank);
    });
    return images;
}

inline model::FeatureExtractor build_extractor(const PipelineConfig& cfg) {
    const auto plan = model::channel_plan(cfg.channel_widths());
    if (!cfg.extractor_weights.empty()) return model::load_extractor(cfg.extractor_weights, plan);
    return model::build_extractor_seeded(cfg.extractor_seed, plan);
}

inline std::vector<std::vector<double>> extract_all_features(
    const std::vector<imaging::FeatureImage>& images, const model::FeatureExtractor& fx,
    int threads) {
    std::vector<std::vector<double>> out(images.size());
    detail::parallel_for(images.size(), threads, [&](std::size_t i) {
        out[i] = model::extract_features(images[i], fx);
    });
    return out;
}

inline std::vector<eval::Sample> samples_from_features(
    const std::vector<CycleRecord>& records, std::vector<std::vector<double>>&& features) {
    std::vector<eval::Sample> samples(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        samples[i].patient_id = records[i].cycle.patient_id;
        samples[i].label = records[i].cycle.label;
        samples[i].features = std::move(features[i]);
    }
    return samples;
}

// Full resolved config, embedded in every report for provenance.
inline nlohmann::json config_to_json(const PipelineConfig& c) {
    return {{"data_dir", c.data_dir},
            {"cache_dir", c.cache_dir},
            {"out_dir", c.out_dir},
            {"model_path", c.model_path},
            {"colormap_path", c.colormap_path},
            {"duration_s", c.duration_s},
            {"sample_rate", c.sample_rate},
            {"frame_ms", c.frame_ms},
            {"hop_ms", c.hop_ms},
            {"n_mels", c.n_mels},
            {"n_mfcc", c.n_mfcc},
            {"fmin", c.fmin},
            {"fmax", c.fmax},
            {"log_floor", c.log_floor},
            {"image_size", c.image_size},
            {"feature_source", c.feature_source},
            {"extractor_weights", c.extractor_weights},
            {"extractor_seed", c.extractor_seed},
            {"channels", c.channels},
            {"learning_rate", c.learning_rate},
            {"batch_size", c.batch_size},
            {"epochs", c.epochs},
            {"l2", c.l2},
            {"k", c.k},
            {"seed", c.seed},
            {"per_class", c.per_class},
            {"synth_sample_rate", c.synth_sample_rate},
            {"cycle_s", c.cycle_s},
            {"wheeze_low", c.wheeze_low},
            {"wheeze_high", c.wheeze_high},
            {"crackle_rate", c.crackle_rate},
            {"snr_db", c.snr_db},
            {"threads", c.threads}};
}

}  // namespace lungsound::pipeline
