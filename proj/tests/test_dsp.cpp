#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "lungsound/dsp.hpp"
#include "lungsound/synth.hpp"
#include "oracles.hpp"

using namespace lungsound;

namespace {

AudioClip make_clip(std::vector<double> samples, int rate) {
    AudioClip c;
    c.samples = std::move(samples);
    c.sample_rate = rate;
    return c;
}

double max_rel_err(const std::vector<double>& got, const std::vector<double>& want) {
    double worst = 0.0;
    double scale = 0.0;
    for (double v : want) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < got.size(); ++i)
        worst = std::max(worst, std::abs(got[i] - want[i]) / std::max(scale, 1e-300));
    return worst;
}

}  // namespace

TEST(PadOrTruncate, PadTruncateIdentity) {
    auto clip = make_clip(std::vector<double>(3 * 8000, 0.7), 8000);
    const auto padded = dsp::pad_or_truncate(clip, 6.0);
    ASSERT_EQ(padded.samples.size(), 48000u);
    for (std::size_t i = 0; i < 24000; ++i) EXPECT_EQ(padded.samples[i], 0.7);
    for (std::size_t i = 24000; i < 48000; ++i) EXPECT_EQ(padded.samples[i], 0.0);

    const auto same = dsp::pad_or_truncate(padded, 6.0);
    EXPECT_EQ(same.samples, padded.samples);  // idempotent at the target

    auto longer = make_clip(std::vector<double>(10 * 8000, 1.0), 8000);
    EXPECT_EQ(dsp::pad_or_truncate(longer, 6.0).samples.size(), 48000u);
}

TEST(HannWindow, ClosedFormsAndSymmetry) {
    const auto w3 = dsp::hann_window(3);
    ASSERT_EQ(w3.size(), 3u);
    EXPECT_NEAR(w3[0], 0.0, 1e-15);
    EXPECT_NEAR(w3[1], 1.0, 1e-15);
    EXPECT_NEAR(w3[2], 0.0, 1e-15);

    const auto w5 = dsp::hann_window(5);
    const double want[] = {0.0, 0.5, 1.0, 0.5, 0.0};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(w5[i], want[i], 1e-15);

    for (std::size_t len : {2u, 17u, 200u}) {
        const auto w = dsp::hann_window(len);
        for (std::size_t n = 0; n < len; ++n) EXPECT_DOUBLE_EQ(w[n], w[len - 1 - n]);
    }
    EXPECT_THROW(dsp::hann_window(1), data_error);
}

TEST(FrameSignal, CountsAndWindowing) {
    dsp::FrameConfig cfg;  // 25 ms / 10 ms
    const auto clip = make_clip(std::vector<double>(48000, 1.0), 8000);
    const auto frames = dsp::frame_signal(clip, cfg);  // L=200, H=80
    EXPECT_EQ(frames.size(), 598u);
    // constant-1 input: every frame is the window itself
    const auto window = dsp::hann_window(200);
    EXPECT_EQ(frames.front(), window);
    EXPECT_EQ(frames.back(), window);

    const auto one = dsp::frame_signal(make_clip(std::vector<double>(200, 1.0), 8000), cfg);
    EXPECT_EQ(one.size(), 1u);

    EXPECT_THROW(dsp::frame_signal(make_clip(std::vector<double>(100, 1.0), 8000), cfg),
                 data_error);
}

TEST(PowerSpectrum, ZeroAndToneAndOracle) {
    const std::vector<double> zeros(512, 0.0);
    for (double v : dsp::power_spectrum(zeros, 512)) EXPECT_EQ(v, 0.0);

    // unwindowed cosine exactly on bin 37
    std::vector<double> tone(1024);
    for (std::size_t i = 0; i < tone.size(); ++i)
        tone[i] = std::cos(2.0 * dsp::kPi * 37.0 * static_cast<double>(i) / 1024.0);
    const auto ps = dsp::power_spectrum(tone, 1024);
    std::size_t argmax = 0;
    for (std::size_t k = 1; k < ps.size(); ++k)
        if (ps[k] > ps[argmax]) argmax = k;
    EXPECT_EQ(argmax, 37u);

    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> frame(256);
        for (double& v : frame) v = rng.uniform(-1.0, 1.0);
        EXPECT_LT(max_rel_err(dsp::power_spectrum(frame, 256), oracle::dft_power_half(frame)),
                  1e-6);
    }

    EXPECT_THROW(dsp::power_spectrum(zeros, 500), data_error);  // not a power of two
}

TEST(Fft, MatchesBruteForceAcrossLengths) {
    Rng rng(23);
    for (std::size_t len : {256u, 512u, 1024u, 2048u, 4096u}) {
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> x(len);
            for (double& v : x) v = rng.uniform(-1.0, 1.0);
            std::vector<std::complex<double>> buf(len);
            for (std::size_t i = 0; i < len; ++i) buf[i] = {x[i], 0.0};
            dsp::fft(buf);
            const auto want = oracle::dft(x);
            double scale = 0.0;
            for (const auto& v : want) scale = std::max(scale, std::abs(v));
            double worst = 0.0;
            for (std::size_t k = 0; k < len; ++k)
                worst = std::max(worst, std::abs(buf[k] - want[k]) / scale);
            EXPECT_LT(worst, 1e-6) << "len " << len;
        }
    }
}

TEST(Fft, ParsevalIdentity) {
    Rng rng(31);
    for (std::size_t len : {256u, 1024u}) {
        std::vector<double> x(len);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        double time_energy = 0.0;
        for (double v : x) time_energy += v * v;
        std::vector<std::complex<double>> buf(len);
        for (std::size_t i = 0; i < len; ++i) buf[i] = {x[i], 0.0};
        dsp::fft(buf);
        double freq_energy = 0.0;
        for (const auto& v : buf) freq_energy += std::norm(v);
        freq_energy /= static_cast<double>(len);
        EXPECT_NEAR(freq_energy, time_energy, 1e-6 * time_energy);
    }
}

TEST(MelScale, ClosedFormAndInverse) {
    EXPECT_EQ(dsp::mel_scale(0.0), 0.0);
    EXPECT_NEAR(dsp::mel_scale(700.0), 2595.0 * std::log10(2.0), 1e-9);
    EXPECT_NEAR(dsp::mel_scale(700.0), 781.1728, 1e-3);
    for (double f : {50.0, 440.0, 4000.0})
        EXPECT_NEAR(dsp::mel_to_hz(dsp::mel_scale(f)), f, 1e-9 * f);
}

TEST(MelFilterbank, PeaksNonNegativityOrdering) {
    dsp::MelConfig cfg;
    cfg.n_mels = 40;
    const std::size_t n_fft = 1024;
    const int sr = 22050;
    const auto bank = dsp::mel_filterbank(cfg, n_fft, sr);
    ASSERT_EQ(bank.size(), 40u);
    ASSERT_EQ(bank.front().size(), n_fft / 2 + 1);

    // recompute the mel-spaced centers analytically
    const double mel_hi = dsp::mel_scale(sr / 2.0);
    const double bin_hz = static_cast<double>(sr) / n_fft;
    std::size_t prev_peak = 0;
    for (std::size_t m = 0; m < bank.size(); ++m) {
        std::size_t peak = 0;
        for (std::size_t k = 1; k < bank[m].size(); ++k) {
            EXPECT_GE(bank[m][k], 0.0);
            if (bank[m][k] > bank[m][peak]) peak = k;
        }
        const double center_hz =
            dsp::mel_to_hz(mel_hi * static_cast<double>(m + 1) / (40.0 + 1.0));
        EXPECT_NEAR(static_cast<double>(peak) * bin_hz, center_hz, bin_hz + 1e-9) << "filter " << m;
        EXPECT_GE(peak, prev_peak);
        prev_peak = peak;
    }

    // 128 mels over an 8-bin spectrum cannot be resolved
    dsp::MelConfig tight;
    tight.n_mels = 128;
    tight.n_mfcc = 40;
    EXPECT_THROW(dsp::mel_filterbank(tight, 16, 8000), data_error);
}

TEST(LogMel, FloorSingleToneScaling) {
    dsp::MelConfig cfg;
    cfg.n_mels = 32;
    cfg.n_mfcc = 13;
    const std::size_t n_fft = 512;
    const int sr = 8000;
    const auto bank = dsp::mel_filterbank(cfg, n_fft, sr);

    dsp::PowerSpectrogram zero;
    zero.sample_rate = sr;
    zero.n_fft = static_cast<int>(n_fft);
    zero.values.assign(3, std::vector<double>(n_fft / 2 + 1, 0.0));
    const auto lmz = dsp::log_mel_spectrogram(zero, bank, cfg);
    for (const auto& row : lmz.values)
        for (double v : row) EXPECT_DOUBLE_EQ(v, std::log(1e-10));

    // a tone at filter 10's peak: that filter dominates its frame
    std::size_t peak10 = 0;
    for (std::size_t k = 1; k < bank[10].size(); ++k)
        if (bank[10][k] > bank[10][peak10]) peak10 = k;
    dsp::PowerSpectrogram tone = zero;
    tone.values.assign(1, std::vector<double>(n_fft / 2 + 1, 0.0));
    tone.values[0][peak10] = 5.0;
    const auto lmt = dsp::log_mel_spectrogram(tone, bank, cfg);
    std::size_t best = 0;
    for (std::size_t m = 1; m < lmt.values[0].size(); ++m)
        if (lmt.values[0][m] > lmt.values[0][best]) best = m;
    EXPECT_EQ(best, 10u);
    // brute-force the filter application for that frame
    for (std::size_t m = 0; m < bank.size(); ++m) {
        double acc = 0.0;
        for (std::size_t k = 0; k < bank[m].size(); ++k) acc += bank[m][k] * tone.values[0][k];
        EXPECT_NEAR(lmt.values[0][m], std::log(std::max(acc, 1e-10)), 1e-12);
    }

    // scaling the waveform by 2 scales power by 4: adds ln(4) beyond the floor
    Rng rng(5);
    dsp::PowerSpectrogram ps = zero;
    ps.values.assign(2, std::vector<double>(n_fft / 2 + 1, 0.0));
    for (auto& row : ps.values)
        for (double& v : row) v = rng.uniform(0.1, 2.0);
    auto scaled = ps;
    for (auto& row : scaled.values)
        for (double& v : row) v *= 4.0;
    const auto a = dsp::log_mel_spectrogram(ps, bank, cfg);
    const auto b = dsp::log_mel_spectrogram(scaled, bank, cfg);
    for (std::size_t t = 0; t < a.values.size(); ++t)
        for (std::size_t m = 0; m < a.values[t].size(); ++m)
            EXPECT_NEAR(b.values[t][m] - a.values[t][m], std::log(4.0), 1e-9);
}

TEST(Dct, ConstantOrthonormalOracle) {
    // constant row: coefficient 0 is c * sqrt(N), the rest vanish
    const int n_mels = 32;
    dsp::LogMelSpectrogram lm;
    lm.values.assign(1, std::vector<double>(n_mels, 1.7));
    const auto mf = dsp::mfcc(lm, n_mels);
    EXPECT_NEAR(mf.values[0][0], 1.7 * std::sqrt(32.0), 1e-9);
    for (int k = 1; k < n_mels; ++k) EXPECT_NEAR(mf.values[0][k], 0.0, 1e-9);

    // full-rank DCT reconstructs the input (orthonormality)
    Rng rng(9);
    std::vector<double> row(n_mels);
    for (double& v : row) v = rng.uniform(-3.0, 3.0);
    lm.values = {row};
    const auto coeffs = dsp::mfcc(lm, n_mels);
    const auto basis = dsp::dct2_basis(n_mels, n_mels);
    for (int n = 0; n < n_mels; ++n) {
        double acc = 0.0;
        for (int k = 0; k < n_mels; ++k)
            acc += basis[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] *
                   coeffs.values[0][static_cast<std::size_t>(k)];
        EXPECT_NEAR(acc, row[static_cast<std::size_t>(n)], 1e-9);
    }

    // brute-force double loop agrees
    const auto want = oracle::dct2(row, 13);
    const auto got = dsp::mfcc(lm, 13);
    for (std::size_t k = 0; k < 13; ++k) EXPECT_NEAR(got.values[0][k], want[k], 1e-9);
}

TEST(Dct, BasisOrthonormal128) {
    const int n = 128;
    const auto g = dsp::dct2_basis(n, n);
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double acc = 0.0;
            for (int t = 0; t < n; ++t)
                acc += g[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)] *
                       g[static_cast<std::size_t>(b)][static_cast<std::size_t>(t)];
            worst = std::max(worst, std::abs(acc - (a == b ? 1.0 : 0.0)));
        }
    EXPECT_LT(worst, 1e-9);
}

TEST(FeaturizeCycle, DeterministicAndPaddingInvariant) {
    synth::SynthConfig scfg;
    scfg.per_class = 1;
    scfg.seed = 77;
    const auto corpus = synth::generate_corpus(scfg);
    dsp::PipelineSettings settings;
    settings.sample_rate = 8000;
    settings.duration_s = 6.0;
    settings.mel.n_mels = 64;
    settings.mel.n_mfcc = 20;

    const auto a = dsp::featurize_cycle(corpus[0], settings);
    const auto b = dsp::featurize_cycle(corpus[0], settings);
    EXPECT_EQ(a.log_mel.values, b.log_mel.values);
    EXPECT_EQ(a.mfcc.values, b.mfcc.values);

    // pre-padding to the target duration changes nothing
    auto padded = corpus[0];
    padded.clip = dsp::pad_or_truncate(padded.clip, settings.duration_s);
    const auto c = dsp::featurize_cycle(padded, settings);
    EXPECT_EQ(a.log_mel.values, c.log_mel.values);
    EXPECT_EQ(a.mfcc.values, c.mfcc.values);

    for (const auto& row : a.log_mel.values)
        for (double v : row) EXPECT_TRUE(std::isfinite(v));
    for (const auto& row : a.mfcc.values)
        for (double v : row) EXPECT_TRUE(std::isfinite(v));
}

TEST(FeaturizeCycle, WheezeBandHotterThanNormal) {
    synth::SynthConfig scfg;
    scfg.per_class = 4;
    scfg.seed = 13;
    const auto corpus = synth::generate_corpus(scfg);

    dsp::PipelineSettings settings;
    settings.sample_rate = 8000;
    settings.duration_s = 3.0;
    settings.mel.n_mels = 64;
    settings.mel.n_mfcc = 20;
    const auto bank =
        dsp::mel_filterbank(settings.mel, dsp::pipeline_n_fft(settings), settings.sample_rate);

    // mel band indices covering 200-800 Hz
    const double mel_hi = dsp::mel_scale(8000.0 / 2.0);
    auto band_mean = [&](const LabeledCycle& cycle) {
        const auto f = dsp::featurize_cycle(cycle, settings, bank);
        double acc = 0.0;
        std::size_t count = 0;
        for (const auto& row : f.log_mel.values)
            for (std::size_t m = 0; m < row.size(); ++m) {
                const double center =
                    dsp::mel_to_hz(mel_hi * static_cast<double>(m + 1) / (64.0 + 1.0));
                if (center < 200.0 || center > 800.0) continue;
                acc += row[m];
                ++count;
            }
        return acc / static_cast<double>(count);
    };

    double wheeze_mean = 0.0, normal_mean = 0.0;
    int wheeze_n = 0, normal_n = 0;
    for (const auto& c : corpus) {
        if (c.label == ClassLabel::wheezes) {
            wheeze_mean += band_mean(c);
            ++wheeze_n;
        } else if (c.label == ClassLabel::normal) {
            normal_mean += band_mean(c);
            ++normal_n;
        }
    }
    EXPECT_GT(wheeze_mean / wheeze_n, normal_mean / normal_n);
}
