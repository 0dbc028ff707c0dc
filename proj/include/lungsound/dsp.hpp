#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "lungsound/common.hpp"
#include "lungsound/dataset.hpp"

namespace lungsound::dsp {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

struct FrameConfig {
    double frame_len_ms = 25.0;
    double hop_ms = 10.0;
    // Window: Hann. Kept as an explicit field so configs echo it.
    enum class Window { hann } window = Window::hann;

    void validate() const {
        if (!(hop_ms > 0.0) || hop_ms > frame_len_ms)
            throw data_error("frame config: need 0 < hop_ms <= frame_len_ms");
    }
};

struct MelConfig {
    int n_mels = 128;
    int n_mfcc = 40;
    double fmin = 0.0;
    double fmax = 0.0;  // 0 means sample_rate / 2, resolved when the bank is built
    double log_floor = 1e-10;

    void validate() const {
        if (n_mels < 1 || n_mfcc < 1 || n_mfcc > n_mels)
            throw data_error("mel config: need 1 <= n_mfcc <= n_mels");
        if (fmin < 0.0 || (fmax != 0.0 && fmax <= fmin))
            throw data_error("mel config: need 0 <= fmin < fmax");
        if (!(log_floor > 0.0)) throw data_error("mel config: log_floor must be positive");
    }
};

struct PowerSpectrogram {
    std::vector<std::vector<double>> values;  // [n_frames][n_fft/2 + 1]
    int sample_rate = 0;
    int n_fft = 0;
};

struct LogMelSpectrogram {
    std::vector<std::vector<double>> values;  // [n_frames][n_mels]
};

struct MfccMatrix {
    std::vector<std::vector<double>> values;  // [n_frames][n_mfcc]
};

// Zero-pads (at the end) or truncates to exactly round(target_s * rate) samples.
inline AudioClip pad_or_truncate(const AudioClip& clip, double target_s) {
    if (!(target_s > 0.0)) throw data_error("pad_or_truncate: target must be positive");
    if (clip.sample_rate <= 0) throw data_error("pad_or_truncate: clip has no sample rate");
    const auto target = static_cast<std::size_t>(std::llround(target_s * clip.sample_rate));
    AudioClip out;
    out.sample_rate = clip.sample_rate;
    out.samples = clip.samples;
    out.samples.resize(target, 0.0);
    return out;
}

// Symmetric Hann: w[n] = 0.5 * (1 - cos(2*pi*n / (L-1))), w[0] = w[L-1] = 0.
inline std::vector<double> hann_window(std::size_t length) {
    if (length < 2) throw data_error("hann_window: length must be >= 2");
    std::vector<double> w(length);
    for (std::size_t n = 0; n < length; ++n)
        w[n] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(n) /
                                     static_cast<double>(length - 1)));
    return w;
}

// Splits into 1 + floor((N - L) / H) frames, each multiplied by the Hann window.
inline std::vector<std::vector<double>> frame_signal(const AudioClip& clip,
                                                     const FrameConfig& cfg) {
    cfg.validate();
    if (clip.sample_rate <= 0) throw data_error("frame_signal: clip has no sample rate");
    const auto frame_len =
        static_cast<std::size_t>(std::llround(cfg.frame_len_ms * 1e-3 * clip.sample_rate));
    const auto hop = static_cast<std::size_t>(std::llround(cfg.hop_ms * 1e-3 * clip.sample_rate));
    if (frame_len < 2 || hop < 1) throw data_error("frame_signal: degenerate frame geometry");
    if (clip.samples.size() < frame_len)
        throw data_error("frame_signal: clip shorter than one frame");

    const std::size_t n_frames = 1 + (clip.samples.size() - frame_len) / hop;
    const auto window = hann_window(frame_len);
    std::vector<std::vector<double>> frames(n_frames);
    for (std::size_t t = 0; t < n_frames; ++t) {
        frames[t].resize(frame_len);
        const double* src = clip.samples.data() + t * hop;
        for (std::size_t n = 0; n < frame_len; ++n) frames[t][n] = src[n] * window[n];
    }
    return frames;
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// In-place iterative radix-2 Cooley-Tukey. Size must be a power of two.
inline void fft(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw data_error("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * kPi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// |DFT_k|^2 for k = 0 .. n_fft/2, frame zero-padded to n_fft.
inline std::vector<double> power_spectrum(const std::vector<double>& frame, std::size_t n_fft) {
    if (!is_power_of_two(n_fft)) throw data_error("power_spectrum: n_fft must be a power of two");
    if (frame.size() > n_fft) throw data_error("power_spectrum: frame longer than n_fft");
    std::vector<std::complex<double>> buf(n_fft, {0.0, 0.0});
    for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = {frame[i], 0.0};
    fft(buf);
    std::vector<double> out(n_fft / 2 + 1);
    for (std::size_t k = 0; k <= n_fft / 2; ++k) out[k] = std::norm(buf[k]);
    return out;
}

inline PowerSpectrogram power_spectrogram(const AudioClip& clip, const FrameConfig& cfg) {
    const auto frames = frame_signal(clip, cfg);
    const std::size_t n_fft = next_power_of_two(frames.front().size());
    PowerSpectrogram ps;
    ps.sample_rate = clip.sample_rate;
    ps.n_fft = static_cast<int>(n_fft);
    ps.values.resize(frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t) ps.values[t] = power_spectrum(frames[t], n_fft);
    return ps;
}

// HTK mel scale.
inline double mel_scale(double f_hz) { return 2595.0 * std::log10(1.0 + f_hz / 700.0); }

inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular filterbank with peaks at mel-equally-spaced centers in
// [fmin, fmax], evaluated at the FFT bin frequencies. Rows are [n_mels] x
// [n_fft/2 + 1]; every row has at least one positive entry or the bank is
// rejected as unresolvable at this FFT size.
inline std::vector<std::vector<double>> mel_filterbank(const MelConfig& cfg, std::size_t n_fft,
                                                       int sample_rate) {
    cfg.validate();
    if (sample_rate <= 0) throw data_error("mel_filterbank: bad sample rate");
    const double fmax = cfg.fmax > 0.0 ? cfg.fmax : sample_rate / 2.0;
    if (fmax > sample_rate / 2.0 + 1e-9)
        throw data_error("mel_filterbank: fmax exceeds Nyquist");
    if (!(cfg.fmin < fmax)) throw data_error("mel_filterbank: need fmin < fmax");

    const std::size_t n_bins = n_fft / 2 + 1;
    const double mel_lo = mel_scale(cfg.fmin);
    const double mel_hi = mel_scale(fmax);
    std::vector<double> edges_hz(static_cast<std::size_t>(cfg.n_mels) + 2);
    for (std::size_t i = 0; i < edges_hz.size(); ++i)
        edges_hz[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                             static_cast<double>(cfg.n_mels + 1));

    std::vector<std::vector<double>> bank(static_cast<std::size_t>(cfg.n_mels),
                                          std::vector<double>(n_bins, 0.0));
    const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(n_fft);
    for (int m = 0; m < cfg.n_mels; ++m) {
        const double left = edges_hz[static_cast<std::size_t>(m)];
        const double center = edges_hz[static_cast<std::size_t>(m) + 1];
        const double right = edges_hz[static_cast<std::size_t>(m) + 2];
        bool any = false;
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double f = static_cast<double>(k) * bin_hz;
            double w = 0.0;
            if (f > left && f < right)
                w = f <= center ? (f - left) / (center - left) : (right - f) / (right - center);
            if (w > 0.0) any = true;
            bank[static_cast<std::size_t>(m)][k] = w;
        }
        if (!any)
            throw data_error("mel_filterbank: filter " + std::to_string(m) +
                             " covers no FFT bin; too few bins for " +
                             std::to_string(cfg.n_mels) + " mels");
    }
    return bank;
}

// value[t][m] = ln(max(sum_k fb[m][k] * ps[t][k], log_floor)).
inline LogMelSpectrogram log_mel_spectrogram(const PowerSpectrogram& ps,
                                             const std::vector<std::vector<double>>& bank,
                                             const MelConfig& cfg) {
    if (!bank.empty() && !ps.values.empty() && bank.front().size() != ps.values.front().size())
        throw data_error("log_mel_spectrogram: filterbank/spectrogram bin mismatch");
    LogMelSpectrogram lm;
    lm.values.resize(ps.values.size());
    for (std::size_t t = 0; t < ps.values.size(); ++t) {
        lm.values[t].resize(bank.size());
        for (std::size_t m = 0; m < bank.size(); ++m) {
            double acc = 0.0;
            const auto& row = bank[m];
            const auto& p = ps.values[t];
            for (std::size_t k = 0; k < row.size(); ++k)
                if (row[k] != 0.0) acc += row[k] * p[k];
            lm.values[t][m] = std::log(std::max(acc, cfg.log_floor));
        }
    }
    return lm;
}

// Orthonormal DCT-II basis, rows 0..n_out-1 over inputs of length n_in.
inline std::vector<std::vector<double>> dct2_basis(int n_out, int n_in) {
    if (n_out < 1 || n_in < 1 || n_out > n_in) throw data_error("dct2_basis: bad sizes");
    std::vector<std::vector<double>> g(static_cast<std::size_t>(n_out),
                                       std::vector<double>(static_cast<std::size_t>(n_in)));
    const double s0 = std::sqrt(1.0 / n_in);
    const double sk = std::sqrt(2.0 / n_in);
    for (int k = 0; k < n_out; ++k)
        for (int n = 0; n < n_in; ++n)
            g[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] =
                (k == 0 ? s0 : sk) * std::cos(kPi * (n + 0.5) * k / n_in);
    return g;
}

inline MfccMatrix mfcc(const LogMelSpectrogram& lm, int n_mfcc) {
    if (lm.values.empty()) return {};
    const int n_mels = static_cast<int>(lm.values.front().size());
    if (n_mfcc > n_mels) throw data_error("mfcc: n_mfcc exceeds n_mels");
    const auto basis = dct2_basis(n_mfcc, n_mels);
    MfccMatrix out;
    out.values.resize(lm.values.size());
    for (std::size_t t = 0; t < lm.values.size(); ++t) {
        out.values[t].resize(static_cast<std::size_t>(n_mfcc));
        for (int k = 0; k < n_mfcc; ++k) {
            double acc = 0.0;
            const auto& row = basis[static_cast<std::size_t>(k)];
            for (int n = 0; n < n_mels; ++n)
                acc += row[static_cast<std::size_t>(n)] * lm.values[t][static_cast<std::size_t>(n)];
            out.values[t][static_cast<std::size_t>(k)] = acc;
        }
    }
    return out;
}

struct PipelineSettings {
    int sample_rate = 22050;
    double duration_s = 6.0;
    FrameConfig frame;
    MelConfig mel;
};

struct CycleFeatures {
    LogMelSpectrogram log_mel;
    MfccMatrix mfcc;
};

// resample -> pad_or_truncate -> frame -> power spectrum -> log-mel -> MFCC.
// A prebuilt filterbank for (mel cfg, n_fft, rate) may be passed in so many
// cycles can share it; pass empty to build one on the fly.
inline CycleFeatures featurize_cycle(const LabeledCycle& cycle, const PipelineSettings& cfg,
                                     const std::vector<std::vector<double>>& shared_bank = {}) {
    cfg.frame.validate();
    cfg.mel.validate();
    const AudioClip at_rate = dataset::resample(cycle.clip, cfg.sample_rate);
    const AudioClip fixed = pad_or_truncate(at_rate, cfg.duration_s);
    const PowerSpectrogram ps = power_spectrogram(fixed, cfg.frame);
    std::vector<std::vector<double>> local_bank;
    if (shared_bank.empty())
        local_bank = mel_filterbank(cfg.mel, static_cast<std::size_t>(ps.n_fft), ps.sample_rate);
    const auto& bank = shared_bank.empty() ? local_bank : shared_bank;
    CycleFeatures out;
    out.log_mel = log_mel_spectrogram(ps, bank, cfg.mel);
    out.mfcc = mfcc(out.log_mel, cfg.mel.n_mfcc);
    return out;
}

// FFT size the pipeline will use for these settings, for prebuilding banks.
inline std::size_t pipeline_n_fft(const PipelineSettings& cfg) {
    return next_power_of_two(
        static_cast<std::size_t>(std::llround(cfg.frame.frame_len_ms * 1e-3 * cfg.sample_rate)));
}

}  // namespace lungsound::dsp
