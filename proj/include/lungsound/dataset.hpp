#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lungsound/common.hpp"

namespace lungsound {

// Four-way cycle label. The enum order is the stable internal encoding;
// reports use the axis order Normal, Wheezes, Crackles, Both (see eval.hpp).
enum class ClassLabel : std::uint8_t {
    normal = 0,
    crackles = 1,
    wheezes = 2,
    both = 3,
};

constexpr std::size_t kNumClasses = 4;

inline const char* class_name(ClassLabel c) {
    switch (c) {
        case ClassLabel::normal: return "Normal";
        case ClassLabel::crackles: return "Crackles";
        case ClassLabel::wheezes: return "Wheezes";
        case ClassLabel::both: return "Both";
    }
    return "?";
}

// One annotated breathing-cycle interval, as read from an ICBHI-style
// annotation line: start, end, crackles flag, wheezes flag.
struct CycleAnnotation {
    double start_s = 0.0;
    double end_s = 0.0;
    int crackles = 0;
    int wheezes = 0;

    bool operator==(const CycleAnnotation&) const = default;
};

// Recording identity parsed from the ICBHI filename convention
// <patient>_<index>_<location>_<mode>_<equipment>.
struct RecordingMeta {
    int patient_id = 0;
    std::string recording_index;
    std::string chest_location;
    std::string acquisition_mode;
    std::string equipment;
};

struct AudioClip {
    std::vector<double> samples;
    int sample_rate = 0;

    double duration_s() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

struct LabeledCycle {
    int patient_id = 0;
    AudioClip clip;
    ClassLabel label = ClassLabel::normal;
    CycleAnnotation source_annotation;
};

inline ClassLabel label_from_flags(int crackles, int wheezes) {
    if (crackles && wheezes) return ClassLabel::both;
    if (crackles) return ClassLabel::crackles;
    if (wheezes) return ClassLabel::wheezes;
    return ClassLabel::normal;
}

namespace dataset {

// Parses one annotation per non-empty line: two reals and two {0,1} flags,
// whitespace separated. Errors name the 1-based line number.
inline std::vector<CycleAnnotation> parse_annotation_file(std::istream& in) {
    std::vector<CycleAnnotation> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string f0, f1, f2, f3, extra;
        if (!(ls >> f0)) continue;  // blank line
        if (!(ls >> f1 >> f2 >> f3) || (ls >> extra)) {
            throw parse_error("annotation line " + std::to_string(line_no) +
                              ": expected 4 fields");
        }
        CycleAnnotation a;
        std::size_t used = 0;
        try {
            a.start_s = std::stod(f0, &used);
            if (used != f0.size()) throw std::invalid_argument(f0);
            a.end_s = std::stod(f1, &used);
            if (used != f1.size()) throw std::invalid_argument(f1);
        } catch (const std::exception&) {
            throw parse_error("annotation line " + std::to_string(line_no) +
                              ": non-numeric time field");
        }
        if (f2 != "0" && f2 != "1")
            throw parse_error("annotation line " + std::to_string(line_no) +
                              ": crackles flag must be 0 or 1, got '" + f2 + "'");
        if (f3 != "0" && f3 != "1")
            throw parse_error("annotation line " + std::to_string(line_no) +
                              ": wheezes flag must be 0 or 1, got '" + f3 + "'");
        a.crackles = f2 == "1";
        a.wheezes = f3 == "1";
        if (a.start_s < 0.0)
            throw parse_error("annotation line " + std::to_string(line_no) +
                              ": negative start time");
        if (!(a.end_s > a.start_s))
            throw parse_error("annotation line " + std::to_string(line_no) +
                              ": end time must exceed start time");
        out.push_back(a);
    }
    return out;
}

inline std::vector<CycleAnnotation> parse_annotation_text(const std::string& text) {
    std::istringstream in(text);
    return parse_annotation_file(in);
}

// Writes annotations in the same 4-column layout, with enough digits that a
// re-parse reproduces the exact values.
inline void write_annotations(std::ostream& out, const std::vector<CycleAnnotation>& anns) {
    out.precision(17);
    for (const auto& a : anns) {
        out << a.start_s << ' ' << a.end_s << ' ' << a.crackles << ' ' << a.wheezes << '\n';
    }
}

// Accepts a bare stem, a filename, or a path; the extension is ignored.
inline RecordingMeta parse_recording_filename(const std::string& name) {
    std::string stem = name;
    if (auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (auto dot = stem.rfind('.'); dot != std::string::npos) stem = stem.substr(0, dot);

    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        auto next = stem.find('_', pos);
        if (next == std::string::npos) {
            parts.push_back(stem.substr(pos));
            break;
        }
        parts.push_back(stem.substr(pos, next - pos));
        pos = next + 1;
    }
    if (parts.size() != 5)
        throw parse_error("recording name '" + stem + "': expected 5 '_'-separated segments, got " +
                          std::to_string(parts.size()));
    RecordingMeta meta;
    try {
        std::size_t used = 0;
        meta.patient_id = std::stoi(parts[0], &used);
        if (used != parts[0].size() || meta.patient_id < 0) throw std::invalid_argument(parts[0]);
    } catch (const std::exception&) {
        throw parse_error("recording name '" + stem + "': patient id '" + parts[0] +
                          "' is not a non-negative integer");
    }
    for (std::size_t i = 1; i < 5; ++i) {
        if (parts[i].empty())
            throw parse_error("recording name '" + stem + "': empty segment " + std::to_string(i));
    }
    meta.recording_index = parts[1];
    meta.chest_location = parts[2];
    meta.acquisition_mode = parts[3];
    meta.equipment = parts[4];
    return meta;
}

// Linear-interpolation resampling. Preserves duration to within one sample
// period; the equal-rate path copies samples bit-exactly.
inline AudioClip resample(const AudioClip& clip, int target_rate) {
    if (target_rate <= 0) throw data_error("resample: target rate must be positive");
    if (clip.samples.empty()) throw data_error("resample: empty clip");
    if (clip.sample_rate <= 0) throw data_error("resample: clip has no sample rate");
    if (clip.sample_rate == target_rate) return clip;

    const std::size_t n_in = clip.samples.size();
    const double ratio = static_cast<double>(clip.sample_rate) / target_rate;
    const auto n_out = static_cast<std::size_t>(
        std::llround(static_cast<double>(n_in) * target_rate / clip.sample_rate));

    AudioClip out;
    out.sample_rate = target_rate;
    out.samples.resize(std::max<std::size_t>(n_out, 1));
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const double pos = static_cast<double>(i) * ratio;
        auto i0 = static_cast<std::size_t>(pos);
        if (i0 >= n_in - 1) {
            out.samples[i] = clip.samples[n_in - 1];
            continue;
        }
        const double frac = pos - static_cast<double>(i0);
        out.samples[i] = clip.samples[i0] + frac * (clip.samples[i0 + 1] - clip.samples[i0]);
    }
    return out;
}

// Allowed annotation overhang past the end of the audio, clamped on extract.
constexpr double kAnnotationTolerance_s = 0.050;

inline std::vector<LabeledCycle> extract_cycles(const AudioClip& clip, const RecordingMeta& meta,
                                                const std::vector<CycleAnnotation>& anns) {
    if (clip.sample_rate <= 0) throw data_error("extract_cycles: clip has no sample rate");
    const double duration = clip.duration_s();
    std::vector<LabeledCycle> out;
    out.reserve(anns.size());
    for (std::size_t i = 0; i < anns.size(); ++i) {
        const auto& a = anns[i];
        if (a.start_s < 0.0 || a.start_s >= duration ||
            a.end_s > duration + kAnnotationTolerance_s) {
            std::ostringstream msg;
            msg << "cycle " << i << " [" << a.start_s << ", " << a.end_s
                << "] lies outside the " << duration << " s clip";
            throw data_error(msg.str());
        }
        const double end_s = std::min(a.end_s, duration);
        auto begin = static_cast<std::size_t>(std::llround(a.start_s * clip.sample_rate));
        auto end = static_cast<std::size_t>(std::llround(end_s * clip.sample_rate));
        end = std::min(end, clip.samples.size());
        if (begin >= end) {
            std::ostringstream msg;
            msg << "cycle " << i << " is empty after clamping to the clip";
            throw data_error(msg.str());
        }
        LabeledCycle cycle;
        cycle.patient_id = meta.patient_id;
        cycle.clip.sample_rate = clip.sample_rate;
        cycle.clip.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                                  clip.samples.begin() + static_cast<std::ptrdiff_t>(end));
        cycle.label = label_from_flags(a.crackles, a.wheezes);
        cycle.source_annotation = a;
        out.push_back(std::move(cycle));
    }
    return out;
}

struct DatasetSummary {
    std::array<std::size_t, kNumClasses> per_class{};
    std::size_t total = 0;

    std::size_t count(ClassLabel c) const { return per_class[static_cast<std::size_t>(c)]; }
};

inline DatasetSummary dataset_summary(const std::vector<LabeledCycle>& cycles) {
    DatasetSummary s;
    for (const auto& c : cycles) ++s.per_class[static_cast<std::size_t>(c.label)];
    s.total = cycles.size();
    return s;
}

}  // namespace dataset
}  // namespace lungsound
