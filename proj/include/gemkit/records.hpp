#pragma once
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "energy.hpp"
#include "errors.hpp"
#include "segmentation.hpp"
#include "spectral.hpp"
#include "types.hpp"

// ParameterRecord: every measured parameter for one token, plus the CSV/JSON
// interchange formats. Optional cells are explicit ("NA" / "silent"), never
// zero-filled.

namespace gemkit::records {

struct SpectralCell {
    std::optional<double> f0, f1, f2, f3;
};

enum class Source { measured, synthetic };

inline const char* to_string(Source s) {
    return s == Source::measured ? "measured" : "synthetic";
}

struct ParameterRecord {
    std::string file;  // canonical token filename
    TokenMeta meta;
    Source source = Source::measured;
    seg::TimeParams time;
    bool frames_available = false;  // all 256-sample reference frames fit
    std::array<SpectralCell, 8> spectral{};  // indexed by seg::Frame
    energy::EnergyParams energy;
};

struct MeasureOptions {
    double preemphasis_alpha = 0.95;
    int lpc_order = 12;
    // Frame-level pitch search band. The low edge is 80 Hz: two full periods
    // must fit in a 256-sample frame (at 10 kHz a 60 Hz edge would need 334).
    double f0_lo = 80.0, f0_hi = 400.0;
    double voicing_threshold = 0.3;
};

// Measurement schedule for formants: consonant frames carry formants for
// liquids only; nasal consonant frames get F0 alone.
inline bool formants_scheduled(seg::Frame f, Family family) {
    switch (f) {
        case seg::Frame::C_ONSET:
        case seg::Frame::C_CENTRE:
        case seg::Frame::C_OFFSET:
            return family == Family::liquids;
        default:
            return true;
    }
}

inline ParameterRecord measure_token(const SignalBuffer& signal, const seg::Annotation& ann,
                                     const TokenMeta& meta, Source source = Source::measured,
                                     const MeasureOptions& opt = {}) {
    ann.validate(std::int64_t(signal.samples.size()));
    ParameterRecord rec;
    rec.meta = meta;
    rec.source = source;
    rec.time = seg::time_params(ann, signal.sample_rate);

    seg::FrameSet frames;
    rec.frames_available = ann.segments_at_least();
    if (rec.frames_available) {
        try {
            frames = seg::reference_frames(ann, std::int64_t(signal.samples.size()));
        } catch (const FrameOutOfBounds&) {
            rec.frames_available = false;
        }
    }
    if (!rec.frames_available) {
        rec.energy = energy::energy_params(signal.samples, ann);
        return rec;
    }

    rec.energy = energy::energy_params(signal.samples, ann, frames);

    const std::vector<double> emphasized =
        spectral::preemphasize(signal.samples, opt.preemphasis_alpha);
    spectral::F0Options f0opt;
    f0opt.lo = opt.f0_lo;
    f0opt.hi = opt.f0_hi;
    f0opt.voicing_threshold = opt.voicing_threshold;

    for (seg::Frame f : seg::all_frames) {
        const seg::FrameSpan& span = frames[f];
        SpectralCell& cell = rec.spectral[std::size_t(f)];
        std::span<const double> raw(signal.samples.data() + span.start,
                                    std::size_t(span.length));
        cell.f0 = spectral::estimate_f0(raw, signal.sample_rate, f0opt);
        if (formants_scheduled(f, meta.family)) {
            try {
                std::span<const double> emph(emphasized.data() + span.start,
                                             std::size_t(span.length));
                auto windowed = spectral::hamming_window(emph);
                auto model = spectral::lpc_fit(windowed, opt.lpc_order);
                auto cand = spectral::formant_candidates(model, signal.sample_rate);
                if (cand.size() > 0) cell.f1 = cand[0].frequency;
                if (cand.size() > 1) cell.f2 = cand[1].frequency;
                if (cand.size() > 2) cell.f3 = cand[2].frequency;
            } catch (const DegenerateFrame&) {
                // silent frame: formants stay "not measured"
            }
        }
    }
    return rec;
}

// --- CSV interchange ---

inline constexpr const char* kSchemaLine = "# gemkit_schema=1";

inline std::string frame_prefix(seg::Frame f) {
    std::string s = seg::to_string(f);
    for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline std::string records_csv_header() {
    std::string h =
        "file,word,consonant,vowel,form,speaker,gender,repetition,family,source,"
        "v1d,cd,v2d,utd,cd_over_v1d,frames_available";
    for (seg::Frame f : seg::all_frames) {
        std::string p = frame_prefix(f);
        for (const char* q : {"_f0", "_f1", "_f2", "_f3"}) h += "," + p + q;
    }
    h += ",e_tot_v1,p_v1,e_tot_c,p_c,e_i_v1cent,e_i_v1_c,e_i_ccent,e_i_coff";
    return h;
}

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string opt_cell(const std::optional<double>& v, const char* missing = "NA") {
    return v ? fmt(*v) : missing;
}

inline double parse_double(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw MalformedRow("bad numeric field \"" + s + "\"", line);
    }
}

inline std::optional<double> parse_opt(const std::string& s, std::size_t line,
                                       const char* missing) {
    if (s == missing) return std::nullopt;
    return parse_double(s, line);
}

}  // namespace detail

inline void append_record_row(std::string& out, const ParameterRecord& r) {
    using detail::fmt;
    using detail::opt_cell;
    out += r.file;
    out += ',' + r.meta.word;
    out += ',';
    out += to_char(r.meta.consonant);
    out += ',';
    out += to_char(r.meta.vowel);
    out += ',';
    out += gemkit::to_string(r.meta.form);
    out += ',';
    out += gemkit::to_string(r.meta.speaker);
    out += ',';
    out += gemkit::to_string(r.meta.gender);
    out += ',' + std::to_string(r.meta.repetition);
    out += ',';
    out += gemkit::to_string(r.meta.family);
    out += ',';
    out += to_string(r.source);
    out += ',' + fmt(r.time.v1d) + ',' + fmt(r.time.cd) + ',' + fmt(r.time.v2d) + ',' +
           fmt(r.time.utd) + ',' + fmt(r.time.cd_over_v1d);
    out += r.frames_available ? ",yes" : ",no";
    for (seg::Frame f : seg::all_frames) {
        const SpectralCell& c = r.spectral[std::size_t(f)];
        out += ',' + opt_cell(c.f0) + ',' + opt_cell(c.f1) + ',' + opt_cell(c.f2) + ',' +
               opt_cell(c.f3);
    }
    const auto& e = r.energy;
    for (const auto* v : {&e.e_tot_v1, &e.p_v1, &e.e_tot_c, &e.p_c, &e.e_i_v1cent, &e.e_i_v1_c,
                          &e.e_i_ccent, &e.e_i_coff})
        out += ',' + opt_cell(*v, "silent");
    out += '\n';
}

inline void write_records_csv(const std::vector<ParameterRecord>& records,
                              const std::string& path) {
    std::string out;
    out += kSchemaLine;
    out += '\n';
    out += records_csv_header();
    out += '\n';
    for (const auto& r : records) append_record_row(out, r);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f.write(out.data(), std::streamsize(out.size()));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline std::vector<ParameterRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open records file " + path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw Error(path + " is empty");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kSchemaLine)
        throw Error(path + ": missing schema line \"" + kSchemaLine + "\"");
    if (!std::getline(in, line)) throw Error(path + ": missing header");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != records_csv_header()) throw Error(path + ": unexpected record header");

    const std::size_t ncols = split_csv_line(records_csv_header()).size();
    std::vector<ParameterRecord> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != ncols)
            throw MalformedRow("expected " + std::to_string(ncols) + " fields, got " +
                                   std::to_string(f.size()),
                               lineno);
        ParameterRecord r;
        std::size_t i = 0;
        r.file = f[i++];
        r.meta.word = f[i++];
        auto cons = consonant_from_char(f[i].size() == 1 ? f[i][0] : '?');
        if (!cons) throw MalformedRow("bad consonant \"" + f[i] + "\"", lineno);
        r.meta.consonant = *cons;
        ++i;
        auto vow = vowel_from_char(f[i].size() == 1 ? f[i][0] : '?');
        if (!vow) throw MalformedRow("bad vowel \"" + f[i] + "\"", lineno);
        r.meta.vowel = *vow;
        ++i;
        if (f[i] == "singleton")
            r.meta.form = Form::singleton;
        else if (f[i] == "geminate")
            r.meta.form = Form::geminate;
        else
            throw MalformedRow("bad form \"" + f[i] + "\"", lineno);
        ++i;
        auto spk = speaker_from_string(f[i]);
        if (!spk) throw MalformedRow("bad speaker \"" + f[i] + "\"", lineno);
        r.meta.speaker = *spk;
        ++i;
        if (f[i] != "female" && f[i] != "male")
            throw MalformedRow("bad gender \"" + f[i] + "\"", lineno);
        r.meta.gender = f[i] == "female" ? Gender::female : Gender::male;
        ++i;
        r.meta.repetition = int(detail::parse_double(f[i++], lineno));
        if (f[i] != "nasals" && f[i] != "liquids")
            throw MalformedRow("bad family \"" + f[i] + "\"", lineno);
        r.meta.family = f[i] == "nasals" ? Family::nasals : Family::liquids;
        ++i;
        if (f[i] != "measured" && f[i] != "synthetic")
            throw MalformedRow("bad source \"" + f[i] + "\"", lineno);
        r.source = f[i] == "measured" ? Source::measured : Source::synthetic;
        ++i;
        r.time.v1d = detail::parse_double(f[i++], lineno);
        r.time.cd = detail::parse_double(f[i++], lineno);
        r.time.v2d = detail::parse_double(f[i++], lineno);
        r.time.utd = detail::parse_double(f[i++], lineno);
        r.time.cd_over_v1d = detail::parse_double(f[i++], lineno);
        if (f[i] != "yes" && f[i] != "no")
            throw MalformedRow("bad frames_available \"" + f[i] + "\"", lineno);
        r.frames_available = f[i] == "yes";
        ++i;
        for (seg::Frame fr : seg::all_frames) {
            SpectralCell& c = r.spectral[std::size_t(fr)];
            c.f0 = detail::parse_opt(f[i++], lineno, "NA");
            c.f1 = detail::parse_opt(f[i++], lineno, "NA");
            c.f2 = detail::parse_opt(f[i++], lineno, "NA");
            c.f3 = detail::parse_opt(f[i++], lineno, "NA");
        }
        auto& e = r.energy;
        for (auto* v : {&e.e_tot_v1, &e.p_v1, &e.e_tot_c, &e.p_c, &e.e_i_v1cent, &e.e_i_v1_c,
                        &e.e_i_ccent, &e.e_i_coff})
            *v = detail::parse_opt(f[i++], lineno, "silent");
        out.push_back(std::move(r));
    }
    return out;
}

// JSON mirror of the records CSV (null for "not measured"/"silent" cells).
inline nlohmann::json record_to_json(const ParameterRecord& r) {
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    nlohmann::json j{
        {"file", r.file},
        {"word", r.meta.word},
        {"consonant", std::string(1, to_char(r.meta.consonant))},
        {"vowel", std::string(1, to_char(r.meta.vowel))},
        {"form", gemkit::to_string(r.meta.form)},
        {"speaker", gemkit::to_string(r.meta.speaker)},
        {"gender", gemkit::to_string(r.meta.gender)},
        {"repetition", r.meta.repetition},
        {"family", gemkit::to_string(r.meta.family)},
        {"source", to_string(r.source)},
        {"time",
         {{"v1d", r.time.v1d},
          {"cd", r.time.cd},
          {"v2d", r.time.v2d},
          {"utd", r.time.utd},
          {"cd_over_v1d", r.time.cd_over_v1d}}},
        {"frames_available", r.frames_available},
    };
    nlohmann::json spec = nlohmann::json::object();
    for (seg::Frame f : seg::all_frames) {
        const SpectralCell& c = r.spectral[std::size_t(f)];
        spec[frame_prefix(f)] = {
            {"f0", opt(c.f0)}, {"f1", opt(c.f1)}, {"f2", opt(c.f2)}, {"f3", opt(c.f3)}};
    }
    j["spectral"] = spec;
    const auto& e = r.energy;
    j["energy"] = {{"e_tot_v1", opt(e.e_tot_v1)},   {"p_v1", opt(e.p_v1)},
                   {"e_tot_c", opt(e.e_tot_c)},     {"p_c", opt(e.p_c)},
                   {"e_i_v1cent", opt(e.e_i_v1cent)}, {"e_i_v1_c", opt(e.e_i_v1_c)},
                   {"e_i_ccent", opt(e.e_i_ccent)}, {"e_i_coff", opt(e.e_i_coff)}};
    return j;
}

inline void write_records_json(const std::vector<ParameterRecord>& records,
                               const std::string& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) arr.push_back(record_to_json(r));
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f << arr.dump(2) << "\n";
}

// Scalar feature lookup for the classification layer.
inline double feature_value(const ParameterRecord& r, const std::string& name) {
    if (name == "v1d") return r.time.v1d;
    if (name == "cd") return r.time.cd;
    if (name == "v2d") return r.time.v2d;
    if (name == "utd") return r.time.utd;
    if (name == "cd_over_v1d") return r.time.cd_over_v1d;
    throw MissingFeature("unknown feature \"" + name +
                         "\" (expected v1d, cd, v2d, utd or cd_over_v1d)");
}

}  // namespace gemkit::records
