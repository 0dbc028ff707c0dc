#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lungsound/common.hpp"
#include "lungsound/dataset.hpp"
#include "lungsound/imaging.hpp"

namespace lungsound::cache {

// One cached feature tensor: magic "LSFT", version u32 LE, name length u16 +
// UTF-8 identity, label u8, rank u8, dims u32 LE each, f32 LE row-major.
struct FeatureCacheEntry {
    std::string identity;  // "<recording stem>#<cycle index>"
    ClassLabel label = ClassLabel::normal;
    std::vector<std::uint32_t> dims;
    std::vector<float> payload;
};

inline constexpr std::uint32_t kCacheVersion = 1;

inline std::string serialize_entry(const FeatureCacheEntry& e) {
    std::string out = "LSFT";
    auto put_u32 = [&out](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    put_u32(kCacheVersion);
    out.push_back(static_cast<char>(e.identity.size() & 0xff));
    out.push_back(static_cast<char>((e.identity.size() >> 8) & 0xff));
    out += e.identity;
    out.push_back(static_cast<char>(static_cast<std::uint8_t>(e.label)));
    out.push_back(static_cast<char>(e.dims.size()));
    std::size_t count = 1;
    for (auto d : e.dims) {
        put_u32(d);
        count *= d;
    }
    if (count != e.payload.size())
        throw std::logic_error("cache entry '" + e.identity + "': dims do not match payload");
    for (float f : e.payload) {
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        put_u32(u);
    }
    return out;
}

inline FeatureCacheEntry deserialize_entry(const std::string& bytes, const std::string& origin) {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    std::size_t left = bytes.size();
    auto need = [&](std::size_t n) {
        if (left < n) throw parse_error(origin + ": truncated cache entry");
    };
    auto u32 = [&]() {
        need(4);
        const std::uint32_t v = static_cast<std::uint32_t>(p[0]) |
                                (static_cast<std::uint32_t>(p[1]) << 8) |
                                (static_cast<std::uint32_t>(p[2]) << 16) |
                                (static_cast<std::uint32_t>(p[3]) << 24);
        p += 4;
        left -= 4;
        return v;
    };
    need(4);
    if (std::memcmp(p, "LSFT", 4) != 0) throw parse_error(origin + ": bad magic, not LSFT");
    p += 4;
    left -= 4;
    const auto version = u32();
    if (version != kCacheVersion)
        throw parse_error(origin + ": unsupported cache version " + std::to_string(version));
    need(2);
    const std::uint16_t name_len = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    p += 2;
    left -= 2;
    FeatureCacheEntry e;
    need(name_len);
    e.identity.assign(reinterpret_cast<const char*>(p), name_len);
    p += name_len;
    left -= name_len;
    need(2);
    const std::uint8_t label = p[0];
    const std::uint8_t rank = p[1];
    p += 2;
    left -= 2;
    if (label >= kNumClasses) throw parse_error(origin + ": label byte out of range");
    e.label = static_cast<ClassLabel>(label);
    e.dims.resize(rank);
    std::size_t count = 1;
    for (auto& d : e.dims) {
        d = u32();
        count *= d;
    }
    e.payload.resize(count);
    for (auto& f : e.payload) {
        const std::uint32_t u = u32();
        std::memcpy(&f, &u, 4);
    }
    if (left != 0) throw parse_error(origin + ": trailing bytes");
    return e;
}

// Cache entries are one file each, named from the identity ('#' becomes
// "_c" so names stay filesystem-safe).
inline std::string entry_filename(const std::string& identity) {
    std::string name = identity;
    for (auto pos = name.find('#'); pos != std::string::npos; pos = name.find('#'))
        name.replace(pos, 1, "_c");
    return name + ".lsft";
}

// Writes the entry unless an identical file is already present; returns
// true when bytes were written. Re-running an unchanged config is a no-op.
inline bool write_entry(const std::string& dir, const FeatureCacheEntry& e) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const auto path = fs::path(dir) / entry_filename(e.identity);
    const std::string bytes = serialize_entry(e);
    if (fs::exists(path) && fs::file_size(path) == bytes.size()) {
        std::ifstream in(path, std::ios::binary);
        std::string existing((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
        if (existing == bytes) return false;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error("short write to " + path.string());
    return true;
}

inline FeatureCacheEntry read_entry(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_entry(bytes, path);
}

// Sorted list of entry paths under a cache directory.
inline std::vector<std::string> list_entries(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> paths;
    if (!fs::is_directory(dir)) return paths;
    for (const auto& de : fs::directory_iterator(dir))
        if (de.is_regular_file() && de.path().extension() == ".lsft")
            paths.push_back(de.path().string());
    std::sort(paths.begin(), paths.end());
    return paths;
}

inline FeatureCacheEntry entry_from_image(const std::string& identity, ClassLabel label,
                                          const imaging::FeatureImage& img) {
    FeatureCacheEntry e;
    e.identity = identity;
    e.label = label;
    e.dims = {static_cast<std::uint32_t>(img.height), static_cast<std::uint32_t>(img.width),
              static_cast<std::uint32_t>(img.channels)};
    e.payload = img.values;
    return e;
}

inline imaging::FeatureImage image_from_entry(const FeatureCacheEntry& e) {
    if (e.dims.size() != 3)
        throw parse_error("cache entry '" + e.identity + "': expected rank-3 payload");
    imaging::FeatureImage img;
    img.height = static_cast<int>(e.dims[0]);
    img.width = static_cast<int>(e.dims[1]);
    img.channels = static_cast<int>(e.dims[2]);
    img.values = e.payload;
    return img;
}

}  // namespace lungsound::cache
