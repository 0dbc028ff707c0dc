#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "lungsound/common.hpp"
#include "lungsound/dataset.hpp"

namespace lungsound::wav {

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

inline void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

}  // namespace detail

// Decodes a RIFF/WAVE buffer. Supported encodings: PCM 16-bit and IEEE
// float-32; multi-channel files yield channel 0 only. Samples map to
// [-1, 1] (PCM16 as x / 32768).
inline AudioClip decode(const std::vector<unsigned char>& bytes, const std::string& origin = "") {
    using detail::read_u16;
    using detail::read_u32;
    const std::string where = origin.empty() ? "wav data" : origin;
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw parse_error(where + ": not a RIFF/WAVE file");

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::uint32_t data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t len = read_u32(bytes.data() + pos + 4);
        pos += 8;
        if (pos + len > bytes.size())
            throw parse_error(where + ": truncated chunk '" + std::string(id, 4) + "'");
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (len < 16) throw parse_error(where + ": fmt chunk too short");
            format = read_u16(bytes.data() + pos);
            channels = read_u16(bytes.data() + pos + 2);
            rate = read_u32(bytes.data() + pos + 4);
            bits = read_u16(bytes.data() + pos + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = bytes.data() + pos;
            data_len = len;
        }
        pos += len + (len & 1);  // chunks are word aligned
    }
    if (!have_fmt || data == nullptr) throw parse_error(where + ": missing fmt or data chunk");
    if (channels < 1) throw parse_error(where + ": zero channels");
    if (rate == 0) throw parse_error(where + ": zero sample rate");

    AudioClip clip;
    clip.sample_rate = static_cast<int>(rate);
    if (format == 1 && bits == 16) {
        const std::uint32_t frame_bytes = 2u * channels;
        const std::uint32_t n = data_len / frame_bytes;
        clip.samples.resize(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            const auto raw = static_cast<std::int16_t>(read_u16(data + i * frame_bytes));
            clip.samples[i] = static_cast<double>(raw) / 32768.0;
        }
    } else if (format == 3 && bits == 32) {
        const std::uint32_t frame_bytes = 4u * channels;
        const std::uint32_t n = data_len / frame_bytes;
        clip.samples.resize(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            const std::uint32_t u = read_u32(data + i * frame_bytes);
            float f;
            std::memcpy(&f, &u, 4);
            clip.samples[i] = static_cast<double>(f);
        }
    } else {
        throw parse_error(where + ": unsupported encoding (format " + std::to_string(format) +
                          ", " + std::to_string(bits) + " bit); expected PCM16 or float32");
    }
    if (clip.samples.empty()) throw parse_error(where + ": no audio frames");
    return clip;
}

inline AudioClip read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return decode(bytes, path);
}

enum class Encoding { pcm16, float32 };

inline std::vector<unsigned char> encode(const AudioClip& clip, Encoding enc) {
    using detail::put_u16;
    using detail::put_u32;
    if (clip.sample_rate <= 0) throw data_error("wav encode: clip has no sample rate");
    const auto n = static_cast<std::uint32_t>(clip.samples.size());
    const std::uint16_t bytes_per = enc == Encoding::pcm16 ? 2 : 4;
    const std::uint32_t data_len = n * bytes_per;

    std::vector<unsigned char> out;
    out.reserve(44 + data_len);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    put_u32(out, 36 + data_len);
    out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    put_u32(out, 16);
    put_u16(out, enc == Encoding::pcm16 ? 1 : 3);
    put_u16(out, 1);  // mono
    put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
    put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * bytes_per);
    put_u16(out, bytes_per);
    put_u16(out, static_cast<std::uint16_t>(bytes_per * 8));
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    put_u32(out, data_len);
    for (double s : clip.samples) {
        if (enc == Encoding::pcm16) {
            double v = s * 32768.0;
            if (v > 32767.0) v = 32767.0;
            if (v < -32768.0) v = -32768.0;
            put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lrint(v))));
        } else {
            const auto f = static_cast<float>(s);
            std::uint32_t u;
            std::memcpy(&u, &f, 4);
            put_u32(out, u);
        }
    }
    return out;
}

inline void write_file(const std::string& path, const AudioClip& clip,
                       Encoding enc = Encoding::float32) {
    const auto bytes = encode(clip, enc);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error("short write to " + path);
}

}  // namespace lungsound::wav
