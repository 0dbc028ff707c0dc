#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lungsound/common.hpp"
#include "lungsound/dataset.hpp"
#include "lungsound/wav.hpp"

namespace lungsound::synth {

struct SynthConfig {
    std::uint64_t seed = 42;
    int sample_rate = 8000;
    double cycle_s = 3.0;
    int per_class = 100;
    double wheeze_low_hz = 200.0;
    double wheeze_high_hz = 800.0;
    double crackle_rate = 8.0;  // events per second
    double snr_db = 10.0;

    void validate() const {
        if (per_class < 1) throw data_error("synth: per_class must be >= 1");
        if (sample_rate <= 0) throw data_error("synth: sample rate must be positive");
        if (!(cycle_s > 0.0)) throw data_error("synth: cycle_s must be positive");
        if (!(wheeze_low_hz > 0.0) || !(wheeze_high_hz > wheeze_low_hz) ||
            wheeze_high_hz >= sample_rate / 2.0)
            throw data_error("synth: wheeze band must lie inside (0, Nyquist)");
        if (!(crackle_rate > 0.0)) throw data_error("synth: crackle_rate must be positive");
    }
};

namespace detail {

// Paul Kellet's three-pole pink noise approximation.
inline std::vector<double> pink_noise(Rng& rng, std::size_t n) {
    std::vector<double> out(n);
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double white = rng.normal();
        b0 = 0.99765 * b0 + white * 0.0990460;
        b1 = 0.96300 * b1 + white * 0.2965164;
        b2 = 0.57000 * b2 + white * 1.0526913;
        out[i] = 0.25 * (b0 + b1 + b2 + white * 0.1848);
    }
    return out;
}

inline double rms(const std::vector<double>& xs) {
    double acc = 0.0;
    for (double v : xs) acc += v * v;
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

inline void add_wheeze(Rng& rng, std::vector<double>& xs, const SynthConfig& cfg,
                       double noise_rms) {
    const double freq = rng.uniform(cfg.wheeze_low_hz, cfg.wheeze_high_hz);
    const double phase = rng.uniform(0.0, 2.0 * 3.141592653589793);
    // Tone amplitude set so tone power is snr_db above the noise floor.
    const double amp = noise_rms * std::pow(10.0, cfg.snr_db / 20.0) * std::sqrt(2.0);
    const double step = 2.0 * 3.141592653589793 * freq / cfg.sample_rate;
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] += amp * std::sin(phase + step * static_cast<double>(i));
}

inline void add_crackles(Rng& rng, std::vector<double>& xs, const SynthConfig& cfg,
                         double noise_rms) {
    const double amp = noise_rms * std::pow(10.0, cfg.snr_db / 20.0) * 4.0;
    const double tau_s = 0.003;  // decay constant of one click
    double t = 0.0;
    while (true) {
        double u = rng.uniform();
        while (u <= 0.0) u = rng.uniform();
        t += -std::log(u) / cfg.crackle_rate;  // exponential inter-arrival
        if (t >= cfg.cycle_s) break;
        const double f = rng.uniform(600.0, std::min(1600.0, cfg.sample_rate / 2.0 - 100.0));
        const auto start = static_cast<std::size_t>(t * cfg.sample_rate);
        const auto span = static_cast<std::size_t>(6.0 * tau_s * cfg.sample_rate);
        for (std::size_t i = start; i < std::min(xs.size(), start + span); ++i) {
            const double dt = static_cast<double>(i - start) / cfg.sample_rate;
            xs[i] += amp * std::exp(-dt / tau_s) * std::sin(2.0 * 3.141592653589793 * f * dt);
        }
    }
}

inline void peak_normalize(std::vector<double>& xs) {
    double peak = 0.0;
    for (double v : xs) peak = std::max(peak, std::abs(v));
    if (peak > 0.0)
        for (double& v : xs) v /= peak;
}

}  // namespace detail

// Deliberately caricatured class signals: Normal is low-level pink-ish
// noise, Wheezes adds a continuous tone in the wheeze band, Crackles adds
// Poisson-timed damped clicks, Both adds both. Cycles come in groups of four
// (one per label) sharing a synthetic patient id, so patient-level folds
// stay meaningful. Deterministic per seed; samples are peak-normalized.
inline std::vector<LabeledCycle> generate_corpus(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const auto n = static_cast<std::size_t>(std::llround(cfg.cycle_s * cfg.sample_rate));
    std::vector<LabeledCycle> out;
    out.reserve(static_cast<std::size_t>(cfg.per_class) * kNumClasses);
    for (int group = 0; group < cfg.per_class; ++group) {
        const int patient_id = group + 1;
        for (std::size_t li = 0; li < kNumClasses; ++li) {
            const auto label = static_cast<ClassLabel>(li);
            std::vector<double> xs = detail::pink_noise(rng, n);
            const double noise_rms = detail::rms(xs);
            if (label == ClassLabel::wheezes || label == ClassLabel::both)
                detail::add_wheeze(rng, xs, cfg, noise_rms);
            if (label == ClassLabel::crackles || label == ClassLabel::both)
                detail::add_crackles(rng, xs, cfg, noise_rms);
            detail::peak_normalize(xs);

            LabeledCycle cycle;
            cycle.patient_id = patient_id;
            cycle.clip.sample_rate = cfg.sample_rate;
            cycle.clip.samples = std::move(xs);
            cycle.label = label;
            cycle.source_annotation = {cfg.cycle_s * static_cast<double>(li),
                                       cfg.cycle_s * static_cast<double>(li + 1),
                                       label == ClassLabel::crackles || label == ClassLabel::both,
                                       label == ClassLabel::wheezes || label == ClassLabel::both};
            out.push_back(std::move(cycle));
        }
    }
    return out;
}

// Emits the corpus as one recording per patient (its four cycles
// concatenated) in the ingestion formats: float32 WAV plus a 4-column
// annotation file, named by the ICBHI convention.
inline std::vector<std::string> write_corpus_files(const std::vector<LabeledCycle>& corpus,
                                                   const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> stems;
    for (std::size_t i = 0; i < corpus.size(); i += kNumClasses) {
        const int patient_id = corpus[i].patient_id;
        AudioClip joined;
        joined.sample_rate = corpus[i].clip.sample_rate;
        std::vector<CycleAnnotation> anns;
        for (std::size_t j = i; j < std::min(corpus.size(), i + kNumClasses); ++j) {
            if (corpus[j].patient_id != patient_id)
                throw std::logic_error("write_corpus_files: corpus not grouped by patient");
            const double start =
                static_cast<double>(joined.samples.size()) / joined.sample_rate;
            joined.samples.insert(joined.samples.end(), corpus[j].clip.samples.begin(),
                                  corpus[j].clip.samples.end());
            const double end = static_cast<double>(joined.samples.size()) / joined.sample_rate;
            anns.push_back({start, end, corpus[j].source_annotation.crackles,
                            corpus[j].source_annotation.wheezes});
        }
        const std::string stem = std::to_string(patient_id) + "_1s1_Tc_sn_Synth";
        wav::write_file((fs::path(out_dir) / (stem + ".wav")).string(), joined,
                        wav::Encoding::float32);
        std::ofstream ann((fs::path(out_dir) / (stem + ".txt")).string(),
                          std::ios::trunc);
        if (!ann) throw io_error("cannot write annotations for " + stem);
        dataset::write_annotations(ann, anns);
        stems.push_back(stem);
    }
    return stems;
}

}  // namespace lungsound::synth
