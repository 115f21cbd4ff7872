#pragma once
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

// Reference times, the eight 256-sample reference frames, and the four
// time-domain parameters. Annotations are kept in samples so that
// utd = v1d + cd + v2d holds exactly before ms conversion.

namespace gemkit::seg {

inline constexpr std::size_t kFrameLen = 256;

struct Annotation {
    std::int64_t v1_onset = 0;
    std::int64_t v1_offset = 0;  // = consonant onset
    std::int64_t v2_onset = 0;   // = consonant offset
    std::int64_t v2_offset = 0;

    bool operator==(const Annotation&) const = default;

    // Hard ordering invariant; throws InvariantViolation.
    void validate(std::int64_t signal_len = -1, const std::string& context = "") const {
        auto fail = [&](const std::string& why) {
            throw InvariantViolation(context.empty() ? why : context + ": " + why);
        };
        if (!(0 <= v1_onset && v1_onset < v1_offset && v1_offset < v2_onset &&
              v2_onset < v2_offset))
            fail("reference times must satisfy 0 <= v1_onset < v1_offset < v2_onset < v2_offset");
        if (signal_len >= 0 && v2_offset > signal_len)
            fail("v2_offset extends past the signal");
    }

    // Soft invariant: every segment long enough for all 256-sample frames.
    // Violations are flagged (frame measures withheld), not hard errors.
    bool segments_at_least(std::int64_t n = kFrameLen) const {
        return (v1_offset - v1_onset) >= n && (v2_onset - v1_offset) >= n &&
               (v2_offset - v2_onset) >= n;
    }
};

enum class Frame {
    V1_CENTRE,
    V1_OFFSET,
    V1_TO_C_TRANSITION,
    C_ONSET,
    C_CENTRE,
    C_OFFSET,
    V2_ONSET,
    V2_CENTRE,
};
inline constexpr std::array<Frame, 8> all_frames{
    Frame::V1_CENTRE, Frame::V1_OFFSET, Frame::V1_TO_C_TRANSITION, Frame::C_ONSET,
    Frame::C_CENTRE,  Frame::C_OFFSET,  Frame::V2_ONSET,           Frame::V2_CENTRE};

inline const char* to_string(Frame f) {
    static constexpr const char* names[] = {
        "V1_CENTRE", "V1_OFFSET", "V1_TO_C_TRANSITION", "C_ONSET",
        "C_CENTRE",  "C_OFFSET",  "V2_ONSET",           "V2_CENTRE"};
    return names[static_cast<int>(f)];
}

struct FrameSpan {
    std::int64_t start = 0;
    std::int64_t length = kFrameLen;
    std::int64_t end() const { return start + length; }
};

struct FrameSet {
    std::array<FrameSpan, 8> spans{};
    const FrameSpan& operator[](Frame f) const { return spans[static_cast<int>(f)]; }
    FrameSpan& operator[](Frame f) { return spans[static_cast<int>(f)]; }
};

// Frame placement rules: centre-based frames put the centre at sample
// floor(c) with start = floor(c) - 128 (even 128/128 split); onset frames
// start at the reference time; offset frames end at it ([t-256, t)).
inline FrameSet reference_frames(const Annotation& ann, std::int64_t signal_len) {
    ann.validate(signal_len);
    const std::int64_t half = kFrameLen / 2;
    auto centred = [&](double c) {
        return FrameSpan{std::int64_t(std::floor(c)) - half, kFrameLen};
    };
    auto onset = [](std::int64_t t) { return FrameSpan{t, kFrameLen}; };
    auto offset = [](std::int64_t t) {
        return FrameSpan{t - std::int64_t(kFrameLen), kFrameLen};
    };
    FrameSet fs;
    fs[Frame::V1_CENTRE] = centred((ann.v1_onset + ann.v1_offset) / 2.0);
    fs[Frame::V1_OFFSET] = offset(ann.v1_offset);
    fs[Frame::V1_TO_C_TRANSITION] = centred(double(ann.v1_offset));
    fs[Frame::C_ONSET] = onset(ann.v1_offset);
    fs[Frame::C_CENTRE] = centred((ann.v1_offset + ann.v2_onset) / 2.0);
    fs[Frame::C_OFFSET] = offset(ann.v2_onset);
    fs[Frame::V2_ONSET] = onset(ann.v2_onset);
    fs[Frame::V2_CENTRE] = centred((ann.v2_onset + ann.v2_offset) / 2.0);

    std::vector<std::string> bad;
    for (Frame f : all_frames) {
        const FrameSpan& s = fs[f];
        if (s.start < 0 || s.end() > signal_len) bad.push_back(to_string(f));
    }
    if (!bad.empty()) {
        std::string msg = "frame(s) out of bounds:";
        for (const auto& n : bad) msg += " " + n;
        throw FrameOutOfBounds(msg, bad);
    }
    return fs;
}

struct TimeParams {
    // Exact sample counts (the ms fields are derived from these).
    std::int64_t v1_samples = 0;
    std::int64_t c_samples = 0;
    std::int64_t v2_samples = 0;
    std::int64_t ut_samples = 0;
    double v1d = 0;  // ms
    double cd = 0;
    double v2d = 0;
    double utd = 0;
    double cd_over_v1d = 0;
};

inline TimeParams time_params(const Annotation& ann, double sample_rate) {
    ann.validate();
    TimeParams t;
    t.v1_samples = ann.v1_offset - ann.v1_onset;
    t.c_samples = ann.v2_onset - ann.v1_offset;
    t.v2_samples = ann.v2_offset - ann.v2_onset;
    t.ut_samples = ann.v2_offset - ann.v1_onset;
    const double ms = 1000.0 / sample_rate;
    t.v1d = double(t.v1_samples) * ms;
    t.cd = double(t.c_samples) * ms;
    t.v2d = double(t.v2_samples) * ms;
    t.utd = double(t.ut_samples) * ms;
    t.cd_over_v1d = t.cd / t.v1d;
    return t;
}

// --- annotation sidecar CSV: file,v1_onset,v1_offset,v2_onset,v2_offset ---

using AnnotationMap = std::map<std::string, Annotation>;

inline const char* kAnnotationHeader = "file,v1_onset,v1_offset,v2_onset,v2_offset";

inline AnnotationMap load_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open annotations file " + path);
    AnnotationMap out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line == kAnnotationHeader) continue;
        std::istringstream ss(line);
        std::string file, field;
        std::array<std::int64_t, 4> t{};
        if (!std::getline(ss, file, ',') || file.empty())
            throw MalformedRow("missing filename", lineno);
        for (int i = 0; i < 4; ++i) {
            if (!std::getline(ss, field, ','))
                throw MalformedRow("expected 4 reference times", lineno);
            try {
                std::size_t used = 0;
                t[i] = std::stoll(field, &used);
                if (used != field.size()) throw std::invalid_argument(field);
            } catch (const std::exception&) {
                throw MalformedRow("non-integer reference time \"" + field + "\"", lineno);
            }
        }
        if (std::getline(ss, field, ',')) throw MalformedRow("too many fields", lineno);
        Annotation ann{t[0], t[1], t[2], t[3]};
        ann.validate(-1, file);  // throws InvariantViolation naming the file
        if (!out.emplace(file, ann).second)
            throw DuplicateEntry("duplicate annotation for " + file);
    }
    return out;
}

inline void save_annotations(const AnnotationMap& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write annotations file " + path);
    out << kAnnotationHeader << "\n";
    for (const auto& [file, a] : m)
        out << file << ',' << a.v1_onset << ',' << a.v1_offset << ',' << a.v2_onset << ','
            << a.v2_offset << "\n";
}

}  // namespace gemkit::seg
