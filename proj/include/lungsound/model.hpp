#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "lungsound/common.hpp"
#include "lungsound/dataset.hpp"
#include "lungsound/imaging.hpp"

namespace lungsound::model {

struct Tensor3 {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> values;  // [(y * width + x) * channels + c]

    Tensor3() = default;
    Tensor3(int h, int w, int c)
        : height(h), width(w), channels(c),
          values(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) *
                 static_cast<std::size_t>(c)) {}

    double& at(int y, int x, int c) {
        return values[static_cast<std::size_t>((y * width + x) * channels + c)];
    }
    double at(int y, int x, int c) const {
        return values[static_cast<std::size_t>((y * width + x) * channels + c)];
    }
};

inline Tensor3 tensor_from_image(const imaging::FeatureImage& img) {
    Tensor3 t(img.height, img.width, img.channels);
    for (std::size_t i = 0; i < t.values.size(); ++i)
        t.values[i] = static_cast<double>(img.values[i]);
    return t;
}

// 3x3 kernel weights for one conv layer, plus per-output-channel bias.
// Kernel layout matches its file shape [3, 3, in, out], row-major.
struct ConvWeights {
    int in_channels = 0;
    int out_channels = 0;
    std::vector<double> kernel;  // [((dy * 3 + dx) * in + ci) * out + co]
    std::vector<double> bias;    // [out]
};

// Cross-correlation, "same" zero padding, stride 1.
inline Tensor3 conv2d(const Tensor3& input, const ConvWeights& w) {
    if (input.channels != w.in_channels)
        throw data_error("conv2d: input has " + std::to_string(input.channels) +
                         " channels, kernel expects " + std::to_string(w.in_channels));
    if (w.kernel.size() != static_cast<std::size_t>(9) * w.in_channels * w.out_channels ||
        w.bias.size() != static_cast<std::size_t>(w.out_channels))
        throw data_error("conv2d: kernel/bias storage does not match declared channels");

    const int h = input.height, wd = input.width;
    const int cin = w.in_channels, cout = w.out_channels;
    Tensor3 out(h, wd, cout);
    std::vector<double> acc(static_cast<std::size_t>(cout));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < wd; ++x) {
            std::memcpy(acc.data(), w.bias.data(), sizeof(double) * static_cast<std::size_t>(cout));
            for (int dy = 0; dy < 3; ++dy) {
                const int yy = y + dy - 1;
                if (yy < 0 || yy >= h) continue;
                for (int dx = 0; dx < 3; ++dx) {
                    const int xx = x + dx - 1;
                    if (xx < 0 || xx >= wd) continue;
                    const double* px = &input.values[static_cast<std::size_t>((yy * wd + xx) * cin)];
                    const double* kk =
                        &w.kernel[static_cast<std::size_t>((dy * 3 + dx) * cin) *
                                  static_cast<std::size_t>(cout)];
                    for (int ci = 0; ci < cin; ++ci) {
                        const double v = px[ci];
                        const double* krow = kk + static_cast<std::size_t>(ci) * cout;
                        for (int co = 0; co < cout; ++co) acc[static_cast<std::size_t>(co)] += v * krow[co];
                    }
                }
            }
            std::memcpy(&out.values[static_cast<std::size_t>((y * wd + x) * cout)], acc.data(),
                        sizeof(double) * static_cast<std::size_t>(cout));
        }
    }
    return out;
}

inline void relu_inplace(Tensor3& t) {
    for (double& v : t.values)
        if (v < 0.0) v = 0.0;
}

// 2x2 max pooling, stride 2, ceil output dims; odd edges replicate.
inline Tensor3 maxpool2(const Tensor3& t) {
    if (t.height < 1 || t.width < 1) throw data_error("maxpool2: empty tensor");
    const int oh = (t.height + 1) / 2;
    const int ow = (t.width + 1) / 2;
    Tensor3 out(oh, ow, t.channels);
    for (int y = 0; y < oh; ++y) {
        const int y0 = 2 * y;
        const int y1 = std::min(2 * y + 1, t.height - 1);
        for (int x = 0; x < ow; ++x) {
            const int x0 = 2 * x;
            const int x1 = std::min(2 * x + 1, t.width - 1);
            for (int c = 0; c < t.channels; ++c) {
                double m = t.at(y0, x0, c);
                m = std::max(m, t.at(y0, x1, c));
                m = std::max(m, t.at(y1, x0, c));
                m = std::max(m, t.at(y1, x1, c));
                out.at(y, x, c) = m;
            }
        }
    }
    return out;
}

struct ConvBlockSpec {
    int n_convs = 2;
    int out_channels = 8;
};

struct ConvBlock {
    std::vector<ConvWeights> convs;
};

// VGG16 block layout at configurable width. The default desk-scale plan
// keeps the five-block, 3x3-kernel structure cheap enough for a laptop; the
// full plan is [64, 128, 256, 512, 512].
inline std::vector<ConvBlockSpec> channel_plan(const std::array<int, 5>& widths) {
    constexpr std::array<int, 5> convs_per_block = {2, 2, 3, 3, 3};
    std::vector<ConvBlockSpec> plan(5);
    for (std::size_t i = 0; i < 5; ++i) {
        if (widths[i] < 1) throw data_error("channel plan: widths must be positive");
        plan[i] = {convs_per_block[i], widths[i]};
    }
    return plan;
}

inline std::vector<ConvBlockSpec> default_channel_plan() {
    return channel_plan({8, 16, 32, 64, 64});
}

struct FeatureExtractor {
    std::vector<ConvBlock> blocks;  // exactly 5
    bool frozen = true;
    std::string source;  // "seed:<n>" or the weight-file path
    int input_channels = 3;

    // Flattened feature size for a square input of the given side.
    std::size_t feature_dim(int input_side) const {
        int side = input_side;
        for (std::size_t i = 0; i < blocks.size(); ++i) side = (side + 1) / 2;
        const int last = blocks.back().convs.back().out_channels;
        return static_cast<std::size_t>(side) * static_cast<std::size_t>(side) *
               static_cast<std::size_t>(last);
    }
};

// He-uniform fan-in init. The extra gain keeps downstream feature norms
// small enough that the default head learning rate is stable.
inline constexpr double kInitGain = 1.0;

inline FeatureExtractor build_extractor_seeded(std::uint64_t seed,
                                               const std::vector<ConvBlockSpec>& plan,
                                               int input_channels = 3) {
    if (plan.size() != 5) throw data_error("extractor: plan must have exactly 5 blocks");
    FeatureExtractor fx;
    fx.source = "seed:" + std::to_string(seed);
    fx.input_channels = input_channels;
    Rng rng(seed);
    int cin = input_channels;
    for (const auto& spec : plan) {
        if (spec.n_convs < 1 || spec.out_channels < 1)
            throw data_error("extractor: bad block spec");
        ConvBlock block;
        for (int i = 0; i < spec.n_convs; ++i) {
            ConvWeights w;
            w.in_channels = cin;
            w.out_channels = spec.out_channels;
            const double limit = kInitGain * std::sqrt(6.0 / (9.0 * cin));
            w.kernel.resize(static_cast<std::size_t>(9) * cin * spec.out_channels);
            for (double& v : w.kernel) v = rng.uniform(-limit, limit);
            w.bias.assign(static_cast<std::size_t>(spec.out_channels), 0.0);
            block.convs.push_back(std::move(w));
            cin = spec.out_channels;
        }
        fx.blocks.push_back(std::move(block));
    }
    return fx;
}

// Runs the five (convs + relu) + maxpool blocks and flattens row-major.
inline std::vector<double> extract_features(const imaging::FeatureImage& img,
                                            const FeatureExtractor& fx) {
    if (img.channels != fx.input_channels)
        throw data_error("extract_features: image has " + std::to_string(img.channels) +
                         " channels, extractor expects " + std::to_string(fx.input_channels));
    Tensor3 t = tensor_from_image(img);
    for (const auto& block : fx.blocks) {
        for (const auto& conv : block.convs) {
            t = conv2d(t, conv);
            relu_inplace(t);
        }
        t = maxpool2(t);
    }
    return std::move(t.values);
}

struct ClassifierHead {
    std::size_t dim = 0;
    std::vector<double> weights;          // [4 x dim], row-major by class
    std::array<double, kNumClasses> bias{};
};

inline ClassifierHead zero_head(std::size_t dim) {
    ClassifierHead h;
    h.dim = dim;
    h.weights.assign(kNumClasses * dim, 0.0);
    return h;
}

// Numerically stable softmax over the 4 class logits.
inline std::array<double, kNumClasses> softmax(const std::array<double, kNumClasses>& z) {
    double zmax = z[0];
    for (double v : z) zmax = std::max(zmax, v);
    std::array<double, kNumClasses> p{};
    double sum = 0.0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        p[k] = std::exp(z[k] - zmax);
        sum += p[k];
    }
    for (double& v : p) v /= sum;
    return p;
}

inline std::array<double, kNumClasses> head_logits(const ClassifierHead& head,
                                                   const std::vector<double>& x) {
    if (x.size() != head.dim) throw data_error("head: feature dimension mismatch");
    std::array<double, kNumClasses> z{};
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        const double* row = head.weights.data() + k * head.dim;
        double acc = 0.0;
        for (std::size_t i = 0; i < head.dim; ++i) acc += row[i] * x[i];
        z[k] = acc + head.bias[k];
    }
    return z;
}

inline double cross_entropy(const std::array<double, kNumClasses>& p, ClassLabel y) {
    return -std::log(std::max(p[static_cast<std::size_t>(y)], 1e-12));
}

struct HeadGradient {
    std::vector<double> d_weights;  // [4 x dim]
    std::array<double, kNumClasses> d_bias{};
};

// Gradient of cross_entropy(softmax(Wx + b), y) + (l2/2) * ||W||^2.
inline HeadGradient head_gradient(const std::vector<double>& x, ClassLabel y,
                                  const ClassifierHead& head, double l2) {
    const auto p = softmax(head_logits(head, x));
    HeadGradient g;
    g.d_weights.resize(head.weights.size());
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        const double err = p[k] - (k == static_cast<std::size_t>(y) ? 1.0 : 0.0);
        g.d_bias[k] = err;
        double* grow = g.d_weights.data() + k * head.dim;
        const double* wrow = head.weights.data() + k * head.dim;
        for (std::size_t i = 0; i < head.dim; ++i) grow[i] = err * x[i] + l2 * wrow[i];
    }
    return g;
}

struct TrainConfig {
    double learning_rate = 0.01;
    int batch_size = 32;
    int epochs = 30;
    std::uint64_t seed = 0;
    double l2 = 1e-4;

    void validate() const {
        if (!(learning_rate > 0.0)) throw data_error("train config: learning_rate must be > 0");
        if (batch_size < 1) throw data_error("train config: batch_size must be >= 1");
        if (epochs < 0) throw data_error("train config: epochs must be >= 0");
        if (l2 < 0.0) throw data_error("train config: l2 must be >= 0");
    }
};

struct TrainResult {
    ClassifierHead head;
    std::vector<double> epoch_mean_loss;
};

// Mini-batch SGD from a zero head, epoch-shuffled by cfg.seed. The reported
// loss is the mean cross-entropy at the weights each batch was scored with.
inline TrainResult train_head(const std::vector<std::vector<double>>& features,
                              const std::vector<ClassLabel>& labels, const TrainConfig& cfg) {
    cfg.validate();
    if (features.empty() || features.size() != labels.size())
        throw data_error("train_head: empty or mismatched training set");
    const std::size_t dim = features.front().size();
    for (const auto& f : features)
        if (f.size() != dim) throw data_error("train_head: inconsistent feature dimensions");

    TrainResult result;
    result.head = zero_head(dim);
    auto& head = result.head;

    Rng rng(cfg.seed);
    std::vector<std::uint32_t> order(features.size());
    std::iota(order.begin(), order.end(), 0u);
    std::vector<double> grad_w(kNumClasses * dim);
    std::array<double, kNumClasses> grad_b{};

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            const double inv_n = 1.0 / static_cast<double>(stop - start);
            std::fill(grad_w.begin(), grad_w.end(), 0.0);
            grad_b.fill(0.0);
            for (std::size_t s = start; s < stop; ++s) {
                const auto& x = features[order[s]];
                const auto y = static_cast<std::size_t>(labels[order[s]]);
                const auto p = softmax(head_logits(head, x));
                loss_sum += cross_entropy(p, labels[order[s]]);
                for (std::size_t k = 0; k < kNumClasses; ++k) {
                    const double err = p[k] - (k == y ? 1.0 : 0.0);
                    grad_b[k] += err;
                    double* grow = grad_w.data() + k * dim;
                    for (std::size_t i = 0; i < dim; ++i) grow[i] += err * x[i];
                }
            }
            for (std::size_t k = 0; k < kNumClasses; ++k) {
                double* wrow = head.weights.data() + k * dim;
                const double* grow = grad_w.data() + k * dim;
                for (std::size_t i = 0; i < dim; ++i)
                    wrow[i] -= cfg.learning_rate * (grow[i] * inv_n + cfg.l2 * wrow[i]);
                head.bias[k] -= cfg.learning_rate * grad_b[k] * inv_n;
            }
        }
        result.epoch_mean_loss.push_back(loss_sum / static_cast<double>(order.size()));
    }
    return result;
}

struct Prediction {
    ClassLabel label = ClassLabel::normal;
    std::array<double, kNumClasses> probabilities{};
};

inline Prediction classify_features(const std::vector<double>& features,
                                    const ClassifierHead& head) {
    Prediction pred;
    pred.probabilities = softmax(head_logits(head, features));
    std::size_t best = 0;
    for (std::size_t k = 1; k < kNumClasses; ++k)
        if (pred.probabilities[k] > pred.probabilities[best]) best = k;  // ties keep lowest index
    pred.label = static_cast<ClassLabel>(best);
    return pred;
}

inline Prediction predict(const imaging::FeatureImage& img, const FeatureExtractor& fx,
                          const ClassifierHead& head) {
    return classify_features(extract_features(img, fx), head);
}

// ---------------------------------------------------------------------------
// Weight files: magic "LSWT", version u32 LE, tensor count u32, then per
// tensor: name length u16 + UTF-8 name, rank u8, dims u32 each, f32 LE
// row-major values.
// ---------------------------------------------------------------------------

struct NamedTensor {
    std::string name;
    std::vector<std::uint32_t> dims;
    std::vector<float> values;
};

namespace detail {

inline void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Reader {
    const unsigned char* p;
    std::size_t left;
    std::string origin;

    void need(std::size_t n) const {
        if (left < n) throw parse_error(origin + ": truncated weight file");
    }
    std::uint16_t u16() {
        need(2);
        const std::uint16_t v = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
        p += 2;
        left -= 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        const std::uint32_t v = static_cast<std::uint32_t>(p[0]) |
                                (static_cast<std::uint32_t>(p[1]) << 8) |
                                (static_cast<std::uint32_t>(p[2]) << 16) |
                                (static_cast<std::uint32_t>(p[3]) << 24);
        p += 4;
        left -= 4;
        return v;
    }
};

}  // namespace detail

inline constexpr std::uint32_t kWeightFileVersion = 1;

inline std::string serialize_tensors(const std::vector<NamedTensor>& tensors) {
    std::string out = "LSWT";
    detail::put_u32(out, kWeightFileVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
        detail::put_u16(out, static_cast<std::uint16_t>(t.name.size()));
        out += t.name;
        out.push_back(static_cast<char>(t.dims.size()));
        std::size_t count = 1;
        for (auto d : t.dims) {
            detail::put_u32(out, d);
            count *= d;
        }
        if (count != t.values.size())
            throw std::logic_error("tensor '" + t.name + "': dims do not match value count");
        for (float f : t.values) {
            std::uint32_t u;
            std::memcpy(&u, &f, 4);
            detail::put_u32(out, u);
        }
    }
    return out;
}

inline std::vector<NamedTensor> deserialize_tensors(const std::string& bytes,
                                                    const std::string& origin = "weights") {
    detail::Reader r{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), origin};
    r.need(4);
    if (std::memcmp(r.p, "LSWT", 4) != 0) throw parse_error(origin + ": bad magic, not LSWT");
    r.p += 4;
    r.left -= 4;
    const std::uint32_t version = r.u32();
    if (version != kWeightFileVersion)
        throw parse_error(origin + ": unsupported version " + std::to_string(version));
    const std::uint32_t n = r.u32();
    std::vector<NamedTensor> tensors(n);
    for (auto& t : tensors) {
        const std::uint16_t name_len = r.u16();
        r.need(name_len);
        t.name.assign(reinterpret_cast<const char*>(r.p), name_len);
        r.p += name_len;
        r.left -= name_len;
        r.need(1);
        const std::uint8_t rank = *r.p;
        ++r.p;
        --r.left;
        t.dims.resize(rank);
        std::size_t count = 1;
        for (auto& d : t.dims) {
            d = r.u32();
            count *= d;
        }
        t.values.resize(count);
        for (auto& f : t.values) {
            const std::uint32_t u = r.u32();
            std::memcpy(&f, &u, 4);
        }
    }
    if (r.left != 0) throw parse_error(origin + ": trailing bytes after last tensor");
    return tensors;
}

inline void write_tensor_file(const std::string& path, const std::vector<NamedTensor>& tensors) {
    const std::string bytes = serialize_tensors(tensors);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error("short write to " + path);
}

inline std::vector<NamedTensor> read_tensor_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_tensors(bytes, path);
}

inline std::vector<NamedTensor> extractor_tensors(const FeatureExtractor& fx) {
    std::vector<NamedTensor> out;
    for (std::size_t b = 0; b < fx.blocks.size(); ++b) {
        for (std::size_t c = 0; c < fx.blocks[b].convs.size(); ++c) {
            const auto& w = fx.blocks[b].convs[c];
            const std::string base =
                "block" + std::to_string(b) + ".conv" + std::to_string(c) + ".";
            NamedTensor kt;
            kt.name = base + "kernel";
            kt.dims = {3, 3, static_cast<std::uint32_t>(w.in_channels),
                       static_cast<std::uint32_t>(w.out_channels)};
            kt.values.assign(w.kernel.begin(), w.kernel.end());
            out.push_back(std::move(kt));
            NamedTensor bt;
            bt.name = base + "bias";
            bt.dims = {static_cast<std::uint32_t>(w.out_channels)};
            bt.values.assign(w.bias.begin(), w.bias.end());
            out.push_back(std::move(bt));
        }
    }
    return out;
}

inline std::vector<NamedTensor> head_tensors(const ClassifierHead& head) {
    NamedTensor wt;
    wt.name = "head.weight";
    wt.dims = {static_cast<std::uint32_t>(kNumClasses), static_cast<std::uint32_t>(head.dim)};
    wt.values.assign(head.weights.begin(), head.weights.end());
    NamedTensor bt;
    bt.name = "head.bias";
    bt.dims = {static_cast<std::uint32_t>(kNumClasses)};
    bt.values.assign(head.bias.begin(), head.bias.end());
    return {std::move(wt), std::move(bt)};
}

namespace detail {

inline const NamedTensor& find_tensor(const std::vector<NamedTensor>& tensors,
                                      const std::string& name, const std::string& origin) {
    for (const auto& t : tensors)
        if (t.name == name) return t;
    throw parse_error(origin + ": missing tensor '" + name + "'");
}

inline void check_dims(const NamedTensor& t, const std::vector<std::uint32_t>& want,
                       const std::string& origin) {
    if (t.dims != want) {
        std::string msg = origin + ": tensor '" + t.name + "' has shape [";
        for (std::size_t i = 0; i < t.dims.size(); ++i)
            msg += (i ? "," : "") + std::to_string(t.dims[i]);
        msg += "], expected [";
        for (std::size_t i = 0; i < want.size(); ++i)
            msg += (i ? "," : "") + std::to_string(want[i]);
        msg += "]";
        throw parse_error(msg);
    }
}

}  // namespace detail

// Loads extractor weights, validating every tensor against the plan.
inline FeatureExtractor extractor_from_tensors(const std::vector<NamedTensor>& tensors,
                                               const std::vector<ConvBlockSpec>& plan,
                                               const std::string& origin,
                                               int input_channels = 3) {
    if (plan.size() != 5) throw data_error("extractor: plan must have exactly 5 blocks");
    FeatureExtractor fx;
    fx.source = origin;
    fx.input_channels = input_channels;
    int cin = input_channels;
    for (std::size_t b = 0; b < plan.size(); ++b) {
        ConvBlock block;
        for (int c = 0; c < plan[b].n_convs; ++c) {
            const std::string base =
                "block" + std::to_string(b) + ".conv" + std::to_string(c) + ".";
            const auto& kt = detail::find_tensor(tensors, base + "kernel", origin);
            const auto& bt = detail::find_tensor(tensors, base + "bias", origin);
            const auto cout = static_cast<std::uint32_t>(plan[b].out_channels);
            detail::check_dims(kt, {3, 3, static_cast<std::uint32_t>(cin), cout}, origin);
            detail::check_dims(bt, {cout}, origin);
            ConvWeights w;
            w.in_channels = cin;
            w.out_channels = plan[b].out_channels;
            w.kernel.assign(kt.values.begin(), kt.values.end());
            w.bias.assign(bt.values.begin(), bt.values.end());
            block.convs.push_back(std::move(w));
            cin = plan[b].out_channels;
        }
        fx.blocks.push_back(std::move(block));
    }
    return fx;
}

inline FeatureExtractor load_extractor(const std::string& path,
                                       const std::vector<ConvBlockSpec>& plan,
                                       int input_channels = 3) {
    return extractor_from_tensors(read_tensor_file(path), plan, path, input_channels);
}

inline ClassifierHead head_from_tensors(const std::vector<NamedTensor>& tensors,
                                        const std::string& origin) {
    const auto& wt = detail::find_tensor(tensors, "head.weight", origin);
    const auto& bt = detail::find_tensor(tensors, "head.bias", origin);
    if (wt.dims.size() != 2 || wt.dims[0] != kNumClasses)
        throw parse_error(origin + ": tensor 'head.weight' must be [4, D]");
    detail::check_dims(bt, {static_cast<std::uint32_t>(kNumClasses)}, origin);
    ClassifierHead head;
    head.dim = wt.dims[1];
    head.weights.assign(wt.values.begin(), wt.values.end());
    for (std::size_t k = 0; k < kNumClasses; ++k) head.bias[k] = bt.values[k];
    return head;
}

// A bundle file holds the frozen extractor and the trained head together.
struct ClassifierBundle {
    FeatureExtractor extractor;
    ClassifierHead head;
};

inline void save_bundle(const std::string& path, const ClassifierBundle& bundle) {
    auto tensors = extractor_tensors(bundle.extractor);
    auto head = head_tensors(bundle.head);
    tensors.insert(tensors.end(), std::make_move_iterator(head.begin()),
                   std::make_move_iterator(head.end()));
    write_tensor_file(path, tensors);
}

inline ClassifierBundle load_bundle(const std::string& path,
                                    const std::vector<ConvBlockSpec>& plan,
                                    int input_channels = 3) {
    const auto tensors = read_tensor_file(path);
    ClassifierBundle bundle;
    bundle.extractor = extractor_from_tensors(tensors, plan, path, input_channels);
    bundle.head = head_from_tensors(tensors, path);
    return bundle;
}

}  // namespace lungsound::model
