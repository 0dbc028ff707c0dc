#pragma once

#include <array>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lungsound/common.hpp"
#include "lungsound/dsp.hpp"

namespace lungsound::imaging {

// H x W x C image with entries in [0, 1], stored row-major as float so disk
// caches round-trip bit-exactly.
struct FeatureImage {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<float> values;  // [(y * width + x) * channels + c]

    float at(int y, int x, int c) const {
        return values[static_cast<std::size_t>((y * width + x) * channels + c)];
    }
};

struct ColormapTable {
    std::array<std::array<double, 3>, 256> rgb{};
};

inline ColormapTable grayscale_colormap() {
    ColormapTable t;
    for (int i = 0; i < 256; ++i) {
        const double v = static_cast<double>(i) / 255.0;
        t.rgb[static_cast<std::size_t>(i)] = {v, v, v};
    }
    return t;
}

// 256 lines of "r g b", each channel in [0, 1].
inline ColormapTable load_colormap(std::istream& in, const std::string& origin = "colormap") {
    ColormapTable t;
    std::string line;
    std::size_t row = 0;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        double r, g, b;
        if (!(ls >> r)) continue;  // blank line
        std::string extra;
        if (!(ls >> g >> b) || (ls >> extra))
            throw parse_error(origin + " line " + std::to_string(line_no) +
                              ": expected 3 reals");
        if (row >= 256) throw parse_error(origin + ": more than 256 entries");
        for (double v : {r, g, b})
            if (!(v >= 0.0 && v <= 1.0))
                throw parse_error(origin + " line " + std::to_string(line_no) +
                                  ": channel outside [0, 1]");
        t.rgb[row++] = {r, g, b};
    }
    if (row != 256)
        throw parse_error(origin + ": expected 256 entries, got " + std::to_string(row));
    return t;
}

inline ColormapTable load_colormap_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    return load_colormap(in, path);
}

using Matrix = std::vector<std::vector<double>>;

// (x - min) / (max - min); a constant matrix maps to all zeros.
inline Matrix normalize_minmax(const Matrix& m) {
    Matrix out(m.size());
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& row : m)
        for (double v : row) {
            if (first) {
                lo = hi = v;
                first = false;
            } else {
                if (v < lo) lo = v;
                if (v > hi) hi = v;
            }
        }
    const double span = hi - lo;
    for (std::size_t i = 0; i < m.size(); ++i) {
        out[i].resize(m[i].size());
        for (std::size_t j = 0; j < m[i].size(); ++j)
            out[i][j] = span > 0.0 ? (m[i][j] - lo) / span : 0.0;
    }
    return out;
}

// Corner-aligned bilinear resize. The four-corner blend is summed in a
// transpose-symmetric order so resize(M^T) == resize(M)^T bit-exactly on
// square outputs.
inline Matrix resize_bilinear(const Matrix& m, int out_h, int out_w) {
    if (m.empty() || m.front().empty()) throw data_error("resize_bilinear: empty input");
    if (out_h < 1 || out_w < 1) throw data_error("resize_bilinear: zero output dims");
    const int in_h = static_cast<int>(m.size());
    const int in_w = static_cast<int>(m.front().size());

    Matrix out(static_cast<std::size_t>(out_h),
               std::vector<double>(static_cast<std::size_t>(out_w)));
    for (int i = 0; i < out_h; ++i) {
        double y = out_h > 1 ? static_cast<double>(i) * (in_h - 1) / (out_h - 1) : 0.0;
        int y0 = in_h > 1 ? std::min(static_cast<int>(y), in_h - 2) : 0;
        const double ty = in_h > 1 ? y - y0 : 0.0;
        const int y1 = in_h > 1 ? y0 + 1 : 0;
        for (int j = 0; j < out_w; ++j) {
            double x = out_w > 1 ? static_cast<double>(j) * (in_w - 1) / (out_w - 1) : 0.0;
            int x0 = in_w > 1 ? std::min(static_cast<int>(x), in_w - 2) : 0;
            const double tx = in_w > 1 ? x - x0 : 0.0;
            const int x1 = in_w > 1 ? x0 + 1 : 0;
            const auto yi0 = static_cast<std::size_t>(y0);
            const auto yi1 = static_cast<std::size_t>(y1);
            const auto xi0 = static_cast<std::size_t>(x0);
            const auto xi1 = static_cast<std::size_t>(x1);
            const double c00 = (1.0 - ty) * (1.0 - tx) * m[yi0][xi0];
            const double cross = (1.0 - ty) * tx * m[yi0][xi1] + ty * (1.0 - tx) * m[yi1][xi0];
            const double c11 = ty * tx * m[yi1][xi1];
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (c00 + cross) + c11;
        }
    }
    return out;
}

// Maps entries in [0, 1] through the 256-entry table by linear interpolation.
inline FeatureImage apply_colormap(const Matrix& m, const ColormapTable& cmap) {
    if (m.empty() || m.front().empty()) throw data_error("apply_colormap: empty input");
    FeatureImage img;
    img.height = static_cast<int>(m.size());
    img.width = static_cast<int>(m.front().size());
    img.channels = 3;
    img.values.resize(static_cast<std::size_t>(img.height) * img.width * 3);
    std::size_t out = 0;
    for (const auto& row : m) {
        for (double v : row) {
            const double p = v * 255.0;
            int i0 = static_cast<int>(p);
            if (i0 > 254) i0 = 254;
            if (i0 < 0) i0 = 0;
            const double t = p - i0;
            const auto& a = cmap.rgb[static_cast<std::size_t>(i0)];
            const auto& b = cmap.rgb[static_cast<std::size_t>(i0) + 1];
            for (int c = 0; c < 3; ++c)
                img.values[out++] =
                    static_cast<float>(a[static_cast<std::size_t>(c)] * (1.0 - t) +
                                       b[static_cast<std::size_t>(c)] * t);
        }
    }
    return img;
}

struct ImageConfig {
    int height = 256;
    int width = 256;
    ColormapTable colormap = grayscale_colormap();
    bool use_colormap = true;  // false: triplicate the normalized matrix as-is
};

// normalize -> resize -> colormap. Exactly invariant under positive affine
// rescaling of the input matrix (min-max normalization cancels it).
inline FeatureImage to_feature_image(const Matrix& m, const ImageConfig& cfg) {
    if (m.empty() || m.front().empty()) throw data_error("to_feature_image: empty matrix");
    const Matrix resized = resize_bilinear(normalize_minmax(m), cfg.height, cfg.width);
    if (cfg.use_colormap) return apply_colormap(resized, cfg.colormap);
    FeatureImage img;
    img.height = cfg.height;
    img.width = cfg.width;
    img.channels = 3;
    img.values.resize(static_cast<std::size_t>(cfg.height) * cfg.width * 3);
    std::size_t out = 0;
    for (const auto& row : resized)
        for (double v : row) {
            const auto f = static_cast<float>(v);
            img.values[out++] = f;
            img.values[out++] = f;
            img.values[out++] = f;
        }
    return img;
}

}  // namespace lungsound::imaging
