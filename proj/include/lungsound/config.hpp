#pragma once

#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "lungsound/common.hpp"
#include "lungsound/dsp.hpp"
#include "lungsound/model.hpp"
#include "lungsound/synth.hpp"

namespace lungsound {

// Everything a run needs, resolvable from defaults, a flat key=value config
// file, and command-line overrides. Field names double as config keys.
struct PipelineConfig {
    std::string data_dir;
    std::string cache_dir;
    std::string out_dir = ".";
    std::string model_path = "model.lswt";
    std::string colormap_path;  // empty: grayscale ramp

    double duration_s = 6.0;
    int sample_rate = 22050;
    double frame_ms = 25.0;
    double hop_ms = 10.0;
    int n_mels = 128;
    int n_mfcc = 40;
    double fmin = 0.0;
    double fmax = 0.0;  // 0: sample_rate / 2
    double log_floor = 1e-10;

    int image_size = 256;
    std::string feature_source = "colormapped-logmel";  // mfcc | logmel | colormapped-logmel

    std::string extractor_weights;  // LSWT path; empty: seeded random
    std::uint64_t extractor_seed = 7;
    std::string channels = "8,16,32,64,64";

    double learning_rate = 0.01;
    int batch_size = 32;
    int epochs = 30;
    double l2 = 1e-4;

    int k = 5;
    std::uint64_t seed = 42;

    // synth corpus knobs
    int per_class = 100;
    int synth_sample_rate = 8000;
    double cycle_s = 3.0;
    double wheeze_low = 200.0;
    double wheeze_high = 800.0;
    double crackle_rate = 8.0;
    double snr_db = 10.0;

    int threads = 0;  // 0: hardware concurrency

    dsp::PipelineSettings dsp_settings() const {
        dsp::PipelineSettings s;
        s.sample_rate = sample_rate;
        s.duration_s = duration_s;
        s.frame.frame_len_ms = frame_ms;
        s.frame.hop_ms = hop_ms;
        s.mel.n_mels = n_mels;
        s.mel.n_mfcc = n_mfcc;
        s.mel.fmin = fmin;
        s.mel.fmax = fmax;
        s.mel.log_floor = log_floor;
        return s;
    }

    model::TrainConfig train_config() const {
        model::TrainConfig t;
        t.learning_rate = learning_rate;
        t.batch_size = batch_size;
        t.epochs = epochs;
        t.seed = seed;
        t.l2 = l2;
        return t;
    }

    synth::SynthConfig synth_config() const {
        synth::SynthConfig s;
        s.seed = seed;
        s.sample_rate = synth_sample_rate;
        s.cycle_s = cycle_s;
        s.per_class = per_class;
        s.wheeze_low_hz = wheeze_low;
        s.wheeze_high_hz = wheeze_high;
        s.crackle_rate = crackle_rate;
        s.snr_db = snr_db;
        return s;
    }

    std::array<int, 5> channel_widths() const {
        std::array<int, 5> widths{};
        std::istringstream in(channels);
        std::string tok;
        std::size_t i = 0;
        while (std::getline(in, tok, ',')) {
            if (i >= 5) throw data_error("channels: expected 5 comma-separated widths");
            try {
                std::size_t used = 0;
                widths[i] = std::stoi(tok, &used);
                if (used != tok.size() || widths[i] < 1) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw data_error("channels: bad width '" + tok + "'");
            }
            ++i;
        }
        if (i != 5) throw data_error("channels: expected 5 comma-separated widths");
        return widths;
    }

    void validate() const {
        dsp_settings().frame.validate();
        dsp_settings().mel.validate();
        train_config().validate();
        if (!(duration_s > 0.0)) throw data_error("config: duration_s must be positive");
        if (sample_rate <= 0) throw data_error("config: sample_rate must be positive");
        if (image_size < 1) throw data_error("config: image_size must be >= 1");
        if (feature_source != "mfcc" && feature_source != "logmel" &&
            feature_source != "colormapped-logmel")
            throw data_error("config: feature_source must be mfcc | logmel | colormapped-logmel");
        if (k < 2) throw data_error("config: k must be >= 2");
        channel_widths();
    }
};

}  // namespace lungsound
