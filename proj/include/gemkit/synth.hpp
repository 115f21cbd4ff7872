#pragma once
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "segmentation.hpp"
#include "types.hpp"

// Deterministic synthetic-data oracle: draw duration parameters from the
// reference moment tables for the GEMMA word set, and render source-filter
// waveforms with known ground truth (harmonic source through a cascade of
// two-pole resonators).

namespace gemkit::synth {

// --- seeded, implementation-pinned randomness ---
// std::normal_distribution is implementation-defined, so normals are drawn
// with an explicit Box-Muller transform; corpus generation derives one seed
// per token with splitmix64, making token streams order-independent.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline double uniform01(std::mt19937_64& g) {
    return (double(g() >> 11) + 0.5) * 0x1.0p-53;  // strictly inside (0,1)
}

inline double normal(std::mt19937_64& g) {
    double u1 = uniform01(g), u2 = uniform01(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// --- reference duration moments (ms), one cell per word ---

struct CellMoments {
    std::string word;
    Consonant consonant{};
    Vowel vowel{};
    Form form{};
    Family family{};
    double v1d_mean = 0, v1d_std = 0;
    double cd_mean = 0, cd_std = 0;
    double v2d_mean = 0, v2d_std = 0;
    // The two liquid "iri"/"irri" V1d cells are misprinted in the source
    // table; the shipped values repair the misprint using the row identity
    // mean(V1d)+mean(Cd)+mean(V2d) = mean(Utd) and stay flagged here.
    bool flagged = false;
};

namespace detail {

inline CellMoments cell(Consonant c, Vowel v, Form f, double v1m, double v1s, double cdm,
                        double cds, double v2m, double v2s, bool flagged = false) {
    return {word_for(c, v, f), c, v, f, family_of(c), v1m, v1s, cdm, cds, v2m, v2s, flagged};
}

}  // namespace detail

inline const std::vector<CellMoments>& nasal_cells() {
    using detail::cell;
    static const std::vector<CellMoments> cells = {
        cell(Consonant::m, Vowel::a, Form::singleton, 157.91, 10.20, 86.73, 8.26, 105.86, 16.66),
        cell(Consonant::m, Vowel::a, Form::geminate, 117.77, 15.40, 210.08, 27.86, 106.27, 21.12),
        cell(Consonant::m, Vowel::i, Form::singleton, 171.71, 22.98, 96.93, 10.68, 120.73, 25.32),
        cell(Consonant::m, Vowel::i, Form::geminate, 118.18, 22.75, 227.12, 31.99, 120.19, 23.58),
        cell(Consonant::m, Vowel::u, Form::singleton, 182.02, 23.90, 102.65, 16.24, 131.54, 22.13),
        cell(Consonant::m, Vowel::u, Form::geminate, 131.84, 24.06, 200.64, 35.96, 130.92, 20.35),
        cell(Consonant::n, Vowel::a, Form::singleton, 200.98, 20.75, 79.57, 12.39, 140.46, 21.49),
        cell(Consonant::n, Vowel::a, Form::geminate, 133.77, 16.64, 201.47, 23.54, 126.77, 30.43),
        cell(Consonant::n, Vowel::i, Form::singleton, 187.32, 32.61, 87.98, 12.85, 141.78, 21.53),
        cell(Consonant::n, Vowel::i, Form::geminate, 117.83, 21.78, 229.08, 37.58, 132.28, 24.40),
        cell(Consonant::n, Vowel::u, Form::singleton, 201.18, 23.05, 89.94, 12.01, 139.92, 25.70),
        cell(Consonant::n, Vowel::u, Form::geminate, 127.98, 19.47, 202.11, 31.98, 129.10, 25.02),
    };
    return cells;
}

inline const std::vector<CellMoments>& liquid_cells() {
    using detail::cell;
    static const std::vector<CellMoments> cells = {
        cell(Consonant::l, Vowel::a, Form::singleton, 180.77, 21.54, 73.93, 13.78, 113.98, 20.82),
        cell(Consonant::l, Vowel::a, Form::geminate, 127.25, 24.73, 201.69, 28.64, 99.59, 16.94),
        cell(Consonant::l, Vowel::i, Form::singleton, 169.74, 22.87, 81.69, 13.81, 112.74, 21.38),
        cell(Consonant::l, Vowel::i, Form::geminate, 127.61, 17.51, 204.96, 27.17, 112.56, 23.97),
        cell(Consonant::l, Vowel::u, Form::singleton, 176.79, 26.04, 90.87, 12.62, 120.93, 17.85),
        cell(Consonant::l, Vowel::u, Form::geminate, 123.52, 25.83, 207.20, 30.54, 103.49, 19.68),
        cell(Consonant::r, Vowel::a, Form::singleton, 200.54, 29.19, 89.99, 19.68, 107.99, 28.40),
        cell(Consonant::r, Vowel::a, Form::geminate, 145.28, 31.94, 202.64, 23.82, 96.98, 17.52),
        cell(Consonant::r, Vowel::i, Form::singleton, 191.79, 25.28, 95.32, 18.22, 115.11, 17.03, true),
        cell(Consonant::r, Vowel::i, Form::geminate, 151.89, 28.17, 203.36, 31.43, 110.84, 17.77, true),
        cell(Consonant::r, Vowel::u, Form::singleton, 188.13, 22.26, 85.78, 12.89, 108.48, 24.91),
        cell(Consonant::r, Vowel::u, Form::geminate, 138.40, 28.85, 205.65, 28.42, 100.23, 23.62),
    };
    return cells;
}

inline const std::vector<CellMoments>& family_cells(Family f) {
    return f == Family::nasals ? nasal_cells() : liquid_cells();
}

// Loads a moments fixture CSV (the shipped data/time_moments.csv mirrors the
// built-in tables). Header: family,word,consonant,vowel,form,v1d_mean,
// v1d_std,cd_mean,cd_std,v2d_mean,v2d_std,flagged
inline std::vector<CellMoments> load_moments_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadConfig("cannot open moments file " + path);
    std::vector<CellMoments> cells;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line.rfind("family,", 0) == 0) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 12)
            throw BadConfig("moments row " + std::to_string(lineno) + ": expected 12 fields");
        auto num = [&](const std::string& s) {
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(s, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (s.empty() || used != s.size())
                throw BadConfig("moments row " + std::to_string(lineno) + ": bad number \"" +
                                s + "\"");
            return v;
        };
        auto con = consonant_from_char(f[2].size() == 1 ? f[2][0] : '?');
        auto vow = vowel_from_char(f[3].size() == 1 ? f[3][0] : '?');
        if (!con || !vow || (f[4] != "singleton" && f[4] != "geminate") ||
            (f[0] != "nasals" && f[0] != "liquids") || (f[11] != "yes" && f[11] != "no"))
            throw BadConfig("moments row " + std::to_string(lineno) + ": bad labels");
        Form form = f[4] == "geminate" ? Form::geminate : Form::singleton;
        CellMoments c = detail::cell(*con, *vow, form, num(f[5]), num(f[6]), num(f[7]),
                                     num(f[8]), num(f[9]), num(f[10]), f[11] == "yes");
        if (c.word != f[1] || to_string(c.family) != f[0])
            throw BadConfig("moments row " + std::to_string(lineno) +
                            ": labels disagree with word \"" + f[1] + "\"");
        cells.push_back(std::move(c));
    }
    if (cells.empty()) throw BadConfig("moments file " + path + " has no rows");
    return cells;
}

// --- duration sampling ---

// Gaussian truncated below at 0.2*mean by rejection; keeps near-zero
// durations out without visibly perturbing the moments.
inline double truncated_normal(std::mt19937_64& rng, double mean, double std_dev) {
    const double floor_at = 0.2 * mean;
    for (;;) {
        double v = mean + std_dev * normal(rng);
        if (v >= floor_at) return v;
    }
}

// Durations are quantized to whole samples so that a rendered waveform's
// annotation reproduces these exact ms values end to end.
inline seg::TimeParams sample_time_params(const CellMoments& cell, std::mt19937_64& rng,
                                          double sample_rate = 10000.0) {
    if (!(cell.v1d_mean > 0 && cell.cd_mean > 0 && cell.v2d_mean > 0 && cell.v1d_std > 0 &&
          cell.cd_std > 0 && cell.v2d_std > 0))
        throw BadMoments("cell moments must be positive: " + cell.word);
    auto to_samples = [&](double ms) {
        return std::max<std::int64_t>(1, std::llround(ms * sample_rate / 1000.0));
    };
    seg::TimeParams t;
    t.v1_samples = to_samples(truncated_normal(rng, cell.v1d_mean, cell.v1d_std));
    t.c_samples = to_samples(truncated_normal(rng, cell.cd_mean, cell.cd_std));
    t.v2_samples = to_samples(truncated_normal(rng, cell.v2d_mean, cell.v2d_std));
    t.ut_samples = t.v1_samples + t.c_samples + t.v2_samples;
    const double ms = 1000.0 / sample_rate;
    t.v1d = double(t.v1_samples) * ms;
    t.cd = double(t.c_samples) * ms;
    t.v2d = double(t.v2_samples) * ms;
    t.utd = double(t.ut_samples) * ms;
    t.cd_over_v1d = t.cd / t.v1d;
    return t;
}

struct SynthRecord {
    TokenMeta meta;
    seg::TimeParams time;
    std::uint64_t token_seed = 0;
};

// Raise any segment below one frame length (256 samples) to exactly one
// frame, so every rendered token supports all reference frames. Affects a
// vanishing fraction of draws; callers rendering waveforms apply this and
// keep the clamped values as ground truth.
inline void enforce_frame_minimum(seg::TimeParams& t, double sample_rate = 10000.0) {
    auto fix = [](std::int64_t& s) {
        if (s < std::int64_t(seg::kFrameLen)) s = std::int64_t(seg::kFrameLen);
    };
    fix(t.v1_samples);
    fix(t.c_samples);
    fix(t.v2_samples);
    t.ut_samples = t.v1_samples + t.c_samples + t.v2_samples;
    const double ms = 1000.0 / sample_rate;
    t.v1d = double(t.v1_samples) * ms;
    t.cd = double(t.c_samples) * ms;
    t.v2d = double(t.v2_samples) * ms;
    t.utd = double(t.ut_samples) * ms;
    t.cd_over_v1d = t.cd / t.v1d;
}

// Balanced corpus mirroring the GEMMA design: n tokens per word cell,
// speakers and repetitions assigned round-robin. Each token's RNG seed is
// derived from (master seed, cell index, slot), so generation order cannot
// change the data.
inline std::vector<SynthRecord> generate_param_corpus(const std::vector<CellMoments>& cells,
                                                      int n_per_cell, std::uint64_t seed,
                                                      double sample_rate = 10000.0) {
    if (n_per_cell < 1) throw BadConfig("n per cell must be >= 1");
    if (cells.empty()) throw BadConfig("no moment cells given");
    std::vector<SynthRecord> out;
    out.reserve(cells.size() * std::size_t(n_per_cell));
    const std::uint64_t master = splitmix64(seed);
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const CellMoments& cell = cells[ci];
        for (int k = 0; k < n_per_cell; ++k) {
            std::uint64_t ordinal = std::uint64_t(ci) * std::uint64_t(n_per_cell) +
                                    std::uint64_t(k);
            std::uint64_t token_seed = splitmix64(master ^ splitmix64(ordinal));
            std::mt19937_64 rng(token_seed);
            SynthRecord rec;
            rec.meta = make_meta(cell.consonant, cell.vowel, cell.form,
                                 all_speakers[std::size_t(k) % 6], (k / 6) % 3 + 1);
            rec.time = sample_time_params(cell, rng, sample_rate);
            rec.token_seed = token_seed;
            out.push_back(std::move(rec));
        }
    }
    return out;
}

// --- waveform rendering ---

struct ResonatorSpec {
    double frequency = 0;  // Hz
    double bandwidth = 0;  // Hz
};

enum class ConsonantModel { nasal_murmur, liquid };

struct SynthSpec {
    double f0 = 120.0;
    std::array<ResonatorSpec, 3> formants{{{700, 130}, {1200, 160}, {2500, 200}}};
    ConsonantModel consonant = ConsonantModel::nasal_murmur;
    double v1d_ms = 150.0, cd_ms = 90.0, v2d_ms = 130.0;
    double rms_v1 = 0.15, rms_c = 0.06, rms_v2 = 0.12;
    double sample_rate = 10000.0;
    std::uint64_t seed = 0;  // reserved; rendering is fully deterministic
};

namespace detail {

// Band-limited harmonic source: sum of cos(2 pi k f0 t)/k up to 0.45*fs,
// exactly periodic at any (non-integer) period.
inline std::vector<double> harmonic_source(double f0, double fs, std::size_t n) {
    const int kmax = int(0.45 * fs / f0);
    std::vector<double> x(n, 0.0);
    for (int k = 1; k <= kmax; ++k) {
        const double w = 2.0 * M_PI * double(k) * f0 / fs;
        for (std::size_t t = 0; t < n; ++t) x[t] += std::cos(w * double(t)) / double(k);
    }
    return x;
}

inline void resonate(std::vector<double>& x, double f, double bw, double fs) {
    const double c = -std::exp(-2.0 * M_PI * bw / fs);
    const double b = 2.0 * std::exp(-M_PI * bw / fs) * std::cos(2.0 * M_PI * f / fs);
    const double a = 1.0 - b - c;
    double y1 = 0, y2 = 0;
    for (double& v : x) {
        double y = a * v + b * y1 + c * y2;
        y2 = y1;
        y1 = y;
        v = y;
    }
}

// One steady segment: source through the resonators, a warmup pad discarded,
// scaled to the target RMS.
inline std::vector<double> render_segment(double f0, double fs, std::size_t n,
                                          const std::vector<ResonatorSpec>& resonators,
                                          double target_rms) {
    const std::size_t pad = 256;
    std::vector<double> x = harmonic_source(f0, fs, n + pad);
    for (const auto& r : resonators) resonate(x, r.frequency, r.bandwidth, fs);
    std::vector<double> seg(x.begin() + std::ptrdiff_t(pad), x.end());
    double e = 0;
    for (double v : seg) e += v * v;
    double rms = std::sqrt(e / double(seg.size()));
    double k = rms > 0 ? target_rms / rms : 0.0;
    for (double& v : seg) v *= k;
    return seg;
}

}  // namespace detail

inline constexpr ResonatorSpec kNasalMurmur{250.0, 100.0};

// V1 and V2 at the spec formants; the consonant as a nasal murmur (single low
// resonance) or a liquid (the same vowel-like resonances, lower RMS). Returns
// the waveform and the exact annotation at the segment joins.
inline std::pair<SignalBuffer, seg::Annotation> synth_token_waveform(const SynthSpec& spec) {
    const double fs = spec.sample_rate;
    if (!(fs > 0)) throw SpecOutOfRange("sample rate must be positive");
    if (!(spec.f0 >= 60.0 && spec.f0 <= 400.0))
        throw SpecOutOfRange("f0 must be in 60..400 Hz");
    const double min_ms = 1000.0 * double(seg::kFrameLen) / fs;
    if (spec.v1d_ms < min_ms || spec.cd_ms < min_ms || spec.v2d_ms < min_ms)
        throw SpecOutOfRange("every segment must cover at least " + std::to_string(min_ms) +
                             " ms so all reference frames fit");
    if (!(spec.rms_v1 > 0 && spec.rms_c > 0 && spec.rms_v2 > 0))
        throw SpecOutOfRange("segment RMS targets must be positive");

    auto n_of = [&](double ms) { return std::size_t(std::llround(ms * fs / 1000.0)); };
    const std::size_t n1 = n_of(spec.v1d_ms), nc = n_of(spec.cd_ms), n2 = n_of(spec.v2d_ms);

    std::vector<ResonatorSpec> vowel_res(spec.formants.begin(), spec.formants.end());
    std::vector<ResonatorSpec> cons_res =
        spec.consonant == ConsonantModel::nasal_murmur
            ? std::vector<ResonatorSpec>{kNasalMurmur}
            : vowel_res;

    SignalBuffer buf;
    buf.sample_rate = fs;
    buf.samples.reserve(n1 + nc + n2);
    for (const auto& [n, res, rms] :
         {std::tuple{n1, &vowel_res, spec.rms_v1}, std::tuple{nc, &cons_res, spec.rms_c},
          std::tuple{n2, &vowel_res, spec.rms_v2}}) {
        auto s = detail::render_segment(spec.f0, fs, n, *res, rms);
        buf.samples.insert(buf.samples.end(), s.begin(), s.end());
    }
    seg::Annotation ann{0, std::int64_t(n1), std::int64_t(n1 + nc),
                        std::int64_t(n1 + nc + n2)};
    return {std::move(buf), ann};
}

// --- per-speaker defaults for corpus rendering ---

struct VoiceDefaults {
    double f0 = 120;
    std::array<ResonatorSpec, 3> formants{};
};

// Reference vowel targets (typical female/male Italian vowels measured on
// this word set); bandwidths chosen so order-12 LPC recovers the formants.
inline VoiceDefaults voice_defaults(Gender g, Vowel v) {
    switch (g) {
        case Gender::female:
            switch (v) {
                case Vowel::a: return {189, {{{1000, 80}, {1488, 100}, {3064, 160}}}};
                case Vowel::i: return {197, {{{390, 70}, {2786, 120}, {3565, 160}}}};
                case Vowel::u: return {198, {{{405, 70}, {705, 80}, {2913, 160}}}};
            }
            break;
        case Gender::male:
            switch (v) {
                case Vowel::a: return {114, {{{835, 80}, {1329, 100}, {2571, 160}}}};
                case Vowel::i: return {127, {{{277, 70}, {2295, 120}, {3220, 160}}}};
                case Vowel::u: return {133, {{{310, 70}, {594, 80}, {2415, 160}}}};
            }
            break;
    }
    throw Error("unreachable voice default");
}

inline SynthSpec spec_for_record(const SynthRecord& rec) {
    VoiceDefaults voice = voice_defaults(rec.meta.gender, rec.meta.vowel);
    SynthSpec spec;
    spec.f0 = voice.f0;
    spec.formants = voice.formants;
    spec.consonant = rec.meta.family == Family::nasals ? ConsonantModel::nasal_murmur
                                                       : ConsonantModel::liquid;
    spec.v1d_ms = rec.time.v1d;
    spec.cd_ms = rec.time.cd;
    spec.v2d_ms = rec.time.v2d;
    spec.seed = rec.token_seed;
    return spec;
}

}  // namespace gemkit::synth
