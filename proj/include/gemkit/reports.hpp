#pragma once
#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "classify.hpp"
#include "errors.hpp"
#include "records.hpp"
#include "stats.hpp"

// Report generation: fixed-layout CSV tables (with JSON mirrors) for the
// statistical battery and the classifiers, plus a self-rendered SVG error
// curve. All output is deterministic: fixed orderings, fixed float format.

namespace gemkit::reports {

using records::ParameterRecord;

struct TableFile {
    std::string name;  // file stem, e.g. "summary"
    std::string csv;
    nlohmann::json json;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline const char* yesno(bool b) { return b ? "yes" : "no"; }

inline std::vector<const ParameterRecord*> filter(const std::vector<ParameterRecord>& recs,
                                                  Family family,
                                                  std::optional<Gender> gender = {},
                                                  std::optional<Form> form = {}) {
    std::vector<const ParameterRecord*> out;
    for (const auto& r : recs) {
        if (r.meta.family != family) continue;
        if (gender && r.meta.gender != *gender) continue;
        if (form && r.meta.form != *form) continue;
        out.push_back(&r);
    }
    return out;
}

inline std::vector<double> column(const std::vector<const ParameterRecord*>& recs,
                                  const std::string& feature) {
    std::vector<double> out;
    out.reserve(recs.size());
    for (const auto* r : recs) out.push_back(records::feature_value(*r, feature));
    return out;
}

inline const std::array<const char*, 5> kTimeFeatures{"v1d", "cd", "v2d", "utd",
                                                      "cd_over_v1d"};

// Consonants of a family in canonical order.
inline std::array<Consonant, 2> family_consonants(Family f) {
    return f == Family::nasals ? std::array{Consonant::m, Consonant::n}
                               : std::array{Consonant::l, Consonant::r};
}

}  // namespace detail

// Per-form duration moments (mean and standard deviation per parameter).
inline TableFile summary_table(const std::vector<ParameterRecord>& recs, Family family) {
    using namespace detail;
    TableFile t;
    t.name = "summary";
    t.csv = "family,form,n";
    for (const char* f : kTimeFeatures)
        t.csv += std::string(",") + f + "_mean," + f + "_std";
    t.csv += "\n";
    t.json = nlohmann::json::array();
    for (Form form : {Form::singleton, Form::geminate}) {
        auto rows = filter(recs, family, {}, form);
        if (rows.empty()) throw InsufficientData("no records for one form");
        nlohmann::json j{{"family", to_string(family)},
                         {"form", to_string(form)},
                         {"n", rows.size()}};
        t.csv += std::string(to_string(family)) + "," + to_string(form) + "," +
                 std::to_string(rows.size());
        for (const char* f : kTimeFeatures) {
            auto col = column(rows, f);
            double m = stats::mean(col);
            double sd = std::sqrt(stats::variance(col));
            t.csv += "," + fmt(m) + "," + fmt(sd);
            j[std::string(f) + "_mean"] = m;
            j[std::string(f) + "_std"] = sd;
        }
        t.csv += "\n";
        t.json.push_back(j);
    }
    return t;
}

// Spearman correlations of the duration parameters for singleton, geminate
// and combined populations.
inline TableFile correlation_table(const std::vector<ParameterRecord>& recs, Family family) {
    using namespace detail;
    static const std::array<const char*, 4> params{"v1d", "cd", "v2d", "utd"};
    TableFile t;
    t.name = "correlation";
    t.csv = "group,param_a,param_b,r_s,p,n,significant\n";
    t.json = nlohmann::json::array();
    struct GroupDef {
        const char* name;
        std::optional<Form> form;
    };
    for (const GroupDef& g :
         {GroupDef{"singleton", Form::singleton}, GroupDef{"geminate", Form::geminate},
          GroupDef{"combined", std::nullopt}}) {
        auto rows = filter(recs, family, {}, g.form);
        if (rows.size() < 3) throw InsufficientData("too few records for correlations");
        for (std::size_t a = 0; a < params.size(); ++a)
            for (std::size_t b = a + 1; b < params.size(); ++b) {
                auto x = column(rows, params[a]);
                auto y = column(rows, params[b]);
                auto r = stats::spearman(x, y);
                t.csv += std::string(g.name) + "," + params[a] + "," + params[b] + "," +
                         fmt(r.coefficient) + "," + fmt(r.p_value) + "," +
                         std::to_string(r.n) + "," + yesno(r.significant()) + "\n";
                t.json.push_back({{"group", g.name},
                                  {"param_a", params[a]},
                                  {"param_b", params[b]},
                                  {"r_s", r.coefficient},
                                  {"p", r.p_value},
                                  {"n", r.n},
                                  {"significant", r.significant()}});
            }
    }
    return t;
}

// One-way singleton-vs-geminate ANOVA per consonant x vowel cell and
// duration parameter.
inline TableFile oneway_table(const std::vector<ParameterRecord>& recs, Family family) {
    using namespace detail;
    TableFile t;
    t.name = "oneway";
    t.csv = "consonant,vowel,parameter,F,df_num,df_den,p,significant\n";
    t.json = nlohmann::json::array();
    for (Consonant c : family_consonants(family))
        for (Vowel v : all_vowels)
            for (const char* param : kTimeFeatures) {
                std::vector<std::vector<double>> groups(2);
                for (const auto& r : recs) {
                    if (r.meta.family != family || r.meta.consonant != c || r.meta.vowel != v)
                        continue;
                    groups[r.meta.form == Form::geminate].push_back(
                        records::feature_value(r, param));
                }
                if (groups[0].size() < 2 || groups[1].size() < 2)
                    throw InsufficientData("need >= 2 tokens per form per cell");
                auto res = stats::anova_oneway(groups, "Form");
                const auto& e = res.effects.front();
                t.csv += std::string(1, to_char(c)) + "," + std::string(1, to_char(v)) + "," +
                         param + "," + fmt(e.F) + "," + std::to_string(e.df_num) + "," +
                         std::to_string(e.df_den) + "," + fmt(e.p) + "," +
                         yesno(e.significant) + "\n";
                t.json.push_back({{"consonant", std::string(1, to_char(c))},
                                  {"vowel", std::string(1, to_char(v))},
                                  {"parameter", param},
                                  {"F", e.F},
                                  {"df_num", e.df_num},
                                  {"df_den", e.df_den},
                                  {"p", e.p},
                                  {"significant", e.significant}});
            }
    return t;
}

// Main-effects factorial ANOVA (Form, Vowel, Consonant) for every response
// column that is complete on this family; incomplete responses are skipped
// deterministically.
inline TableFile factorial_table(const std::vector<ParameterRecord>& recs, Family family) {
    using namespace detail;
    TableFile t;
    t.name = "factorial";
    t.csv = "response,effect,F,df_num,df_den,p,significant\n";
    t.json = nlohmann::json::array();
    auto rows = filter(recs, family);
    if (rows.empty()) throw InsufficientData("no records for family");

    auto consonants = family_consonants(family);
    std::vector<std::vector<int>> factors(3, std::vector<int>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        factors[0][i] = rows[i]->meta.form == Form::geminate;
        factors[1][i] = int(rows[i]->meta.vowel);
        factors[2][i] = rows[i]->meta.consonant == consonants[1];
    }
    const std::vector<std::string> names{"Form", "Vowel", "Consonant"};
    const std::vector<int> levels{2, 3, 2};

    auto run = [&](const std::string& response, const std::vector<double>& y) {
        auto res = stats::anova_factorial(y, factors, names, levels);
        for (const auto& e : res.effects) {
            t.csv += response + "," + e.effect + "," + fmt(e.F) + "," +
                     std::to_string(e.df_num) + "," + std::to_string(e.df_den) + "," +
                     fmt(e.p) + "," + yesno(e.significant) + "\n";
            t.json.push_back({{"response", response},
                              {"effect", e.effect},
                              {"F", e.F},
                              {"df_num", e.df_num},
                              {"df_den", e.df_den},
                              {"p", e.p},
                              {"significant", e.significant}});
        }
    };

    for (const char* param : kTimeFeatures) run(param, column(rows, param));

    for (seg::Frame f : seg::all_frames) {
        const std::array<std::optional<double> records::SpectralCell::*, 4> members{
            &records::SpectralCell::f0, &records::SpectralCell::f1,
            &records::SpectralCell::f2, &records::SpectralCell::f3};
        static const std::array<const char*, 4> suffix{"_f0", "_f1", "_f2", "_f3"};
        for (std::size_t m = 0; m < members.size(); ++m) {
            std::vector<double> y;
            y.reserve(rows.size());
            bool complete = true;
            for (const auto* r : rows) {
                const auto& cell = r->spectral[std::size_t(f)].*members[m];
                if (!cell) {
                    complete = false;
                    break;
                }
                y.push_back(*cell);
            }
            if (complete && !y.empty()) run(records::frame_prefix(f) + suffix[m], y);
        }
    }
    return t;
}

// Split-plot repeated-measures ANOVA per gender and duration parameter;
// subjects are speaker-within-form units with cell means over repetitions.
inline TableFile repeated_table(const std::vector<ParameterRecord>& recs, Family family) {
    using namespace detail;
    TableFile t;
    t.name = "repeated";
    t.csv = "gender,parameter,effect,F,df_num,df_den,p,significant\n";
    t.json = nlohmann::json::array();
    auto consonants = family_consonants(family);
    for (Gender gender : {Gender::female, Gender::male}) {
        for (const char* param : detail::kTimeFeatures) {
            std::vector<stats::SubjectCells> subjects;
            for (Form form : {Form::singleton, Form::geminate})
                for (Speaker spk : all_speakers) {
                    if (gender_of(spk) != gender) continue;
                    stats::SubjectCells subj;
                    subj.form = form == Form::geminate;
                    subj.cells.assign(3, std::vector<double>(2, 0.0));
                    for (std::size_t v = 0; v < 3; ++v)
                        for (std::size_t c = 0; c < 2; ++c) {
                            std::vector<double> reps;
                            for (const auto& r : recs) {
                                if (r.meta.family != family || r.meta.gender != gender ||
                                    r.meta.speaker != spk || r.meta.form != form)
                                    continue;
                                if (r.meta.vowel != all_vowels[v] ||
                                    r.meta.consonant != consonants[c])
                                    continue;
                                reps.push_back(records::feature_value(r, param));
                            }
                            if (reps.empty())
                                throw InsufficientData(
                                    "missing repeated-measures cell for speaker");
                            subj.cells[v][c] = stats::mean(reps);
                        }
                    subjects.push_back(std::move(subj));
                }
            auto res = stats::anova_repeated(subjects);
            for (const auto& e : res.effects) {
                t.csv += std::string(to_string(gender)) + "," + param + "," + e.effect + "," +
                         fmt(e.F) + "," + std::to_string(e.df_num) + "," +
                         std::to_string(e.df_den) + "," + fmt(e.p) + "," +
                         yesno(e.significant) + "\n";
                t.json.push_back({{"gender", to_string(gender)},
                                  {"parameter", param},
                                  {"effect", e.effect},
                                  {"F", e.F},
                                  {"df_num", e.df_num},
                                  {"df_den", e.df_den},
                                  {"p", e.p},
                                  {"significant", e.significant}});
            }
        }
    }
    return t;
}

// --- classification reports ---

struct ClassifyOptions {
    std::vector<std::string> features{"cd", "v1d", "v2d", "utd", "cd_over_v1d"};
    classify::Protocol protocol = classify::Protocol::resubstitution;
    std::optional<Gender> gender;  // nullopt = combined
    classify::Grid grid{};
};

inline std::pair<std::vector<double>, std::vector<double>> split_feature(
    const std::vector<ParameterRecord>& recs, Family family, const std::string& feature,
    std::optional<Gender> gender) {
    std::vector<double> xs, xg;
    for (const auto& r : recs) {
        if (r.meta.family != family) continue;
        if (gender && r.meta.gender != *gender) continue;
        double v = records::feature_value(r, feature);
        (r.meta.form == Form::singleton ? xs : xg).push_back(v);
    }
    if (xs.empty() || xg.empty())
        throw SingleClassGroup("need both singleton and geminate records");
    return {std::move(xs), std::move(xg)};
}

inline TableFile classification_table(const std::vector<ParameterRecord>& recs, Family family,
                                      const ClassifyOptions& opt) {
    using namespace detail;
    TableFile t;
    t.name = "classification";
    t.csv = "features,protocol,group,error_percent,singleton_as_singleton,singleton_as_"
            "geminate,geminate_as_singleton,geminate_as_geminate\n";
    t.json = nlohmann::json::array();
    const char* group = !opt.gender ? "combined"
                        : *opt.gender == Gender::female ? "female"
                                                        : "male";
    const char* proto =
        opt.protocol == classify::Protocol::resubstitution ? "resubstitution" : "leave_one_out";
    auto emit = [&](const std::string& label, const classify::ClassificationReport& rep) {
        t.csv += label + "," + proto + "," + group + "," + fmt(rep.error_percent) + "," +
                 std::to_string(rep.singleton_as_singleton) + "," +
                 std::to_string(rep.singleton_as_geminate) + "," +
                 std::to_string(rep.geminate_as_singleton) + "," +
                 std::to_string(rep.geminate_as_geminate) + "\n";
        t.json.push_back({{"features", label},
                          {"protocol", proto},
                          {"group", group},
                          {"error_percent", rep.error_percent},
                          {"singleton_as_singleton", rep.singleton_as_singleton},
                          {"singleton_as_geminate", rep.singleton_as_geminate},
                          {"geminate_as_singleton", rep.geminate_as_singleton},
                          {"geminate_as_geminate", rep.geminate_as_geminate}});
    };
    for (const auto& f : opt.features) {
        auto [xs, xg] = split_feature(recs, family, f, opt.gender);
        emit(f, classify::error_rate(xs, xg, opt.protocol));
    }
    // Bidimensional (Cd, V1d) MLC.
    {
        std::vector<std::array<double, 2>> xs, xg;
        for (const auto& r : recs) {
            if (r.meta.family != family) continue;
            if (opt.gender && r.meta.gender != *opt.gender) continue;
            std::array<double, 2> v{r.time.cd, r.time.v1d};
            (r.meta.form == Form::singleton ? xs : xg).push_back(v);
        }
        emit("cd+v1d", classify::error_rate_2d(xs, xg, opt.protocol));
    }
    return t;
}

inline TableFile threshold_table(const std::vector<ParameterRecord>& recs, Family family,
                                 const ClassifyOptions& opt) {
    using namespace detail;
    TableFile t;
    t.name = "thresholds";
    t.csv = "feature,method,threshold,error_percent,interval_lo,interval_hi\n";
    t.json = nlohmann::json::array();
    auto [xs, xg] = split_feature(recs, family, "cd_over_v1d", opt.gender);
    auto gs = classify::fit_gaussian(xs);
    auto gg = classify::fit_gaussian(xg);
    auto emit = [&](const classify::ThresholdResult& r) {
        const char* method = r.method == classify::ThresholdMethod::pep ? "pep" : "heuristic";
        t.csv += std::string("cd_over_v1d,") + method + "," + fmt(r.threshold) + "," +
                 fmt(r.error_percent) + "," + fmt(r.interval_lo) + "," + fmt(r.interval_hi) +
                 "\n";
        t.json.push_back({{"feature", "cd_over_v1d"},
                          {"method", method},
                          {"threshold", r.threshold},
                          {"error_percent", r.error_percent},
                          {"interval_lo", r.interval_lo},
                          {"interval_hi", r.interval_hi}});
    };
    emit(classify::pep_threshold(gs, gg, xs, xg));
    emit(classify::heuristic_threshold(xs, xg));
    return t;
}

inline TableFile error_curve_table(const std::vector<ParameterRecord>& recs, Family family,
                                   const ClassifyOptions& opt) {
    using namespace detail;
    TableFile t;
    t.name = "error_curve";
    t.csv = "threshold,error_percent\n";
    t.json = nlohmann::json::array();
    auto [xs, xg] = split_feature(recs, family, "cd_over_v1d", opt.gender);
    for (const auto& p : classify::error_curve(xs, xg, opt.grid)) {
        t.csv += fmt(p.threshold) + "," + fmt(p.error_percent) + "\n";
        t.json.push_back({{"threshold", p.threshold}, {"error_percent", p.error_percent}});
    }
    return t;
}

// Minimal self-contained SVG line plot of the error curve.
inline std::string error_curve_svg(const std::vector<classify::CurvePoint>& curve) {
    if (curve.empty()) throw Error("empty error curve");
    const double w = 640, h = 400, ml = 60, mr = 20, mt = 20, mb = 50;
    const double x0 = curve.front().threshold, x1 = curve.back().threshold;
    double emax = 10;
    for (const auto& p : curve) emax = std::max(emax, p.error_percent);
    emax = std::ceil(emax / 10.0) * 10.0;
    auto X = [&](double t) { return ml + (t - x0) / (x1 - x0) * (w - ml - mr); };
    auto Y = [&](double e) { return h - mb - e / emax * (h - mt - mb); };
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
         "viewBox=\"0 0 640 400\">\n";
    s += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    char buf[160];
    // axes
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                  ml, h - mb, w - mr, h - mb);
    s += buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", ml,
                  mt, ml, h - mb);
    s += buf;
    for (double tx = x0; tx <= x1 + 1e-9; tx += 0.2) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%g\" x2=\"%.2f\" y2=\"%g\" stroke=\"black\"/>"
                      "<text x=\"%.2f\" y=\"%g\" font-size=\"12\" text-anchor=\"middle\">"
                      "%.1f</text>\n",
                      X(tx), h - mb, X(tx), h - mb + 5, X(tx), h - mb + 20, tx);
        s += buf;
    }
    for (double ey = 0; ey <= emax + 1e-9; ey += 10) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%g\" y1=\"%.2f\" x2=\"%g\" y2=\"%.2f\" stroke=\"black\"/>"
                      "<text x=\"%g\" y=\"%.2f\" font-size=\"12\" text-anchor=\"end\">"
                      "%.0f</text>\n",
                      ml - 5.0, Y(ey), ml, Y(ey), ml - 8.0, Y(ey) + 4, ey);
        s += buf;
    }
    s += "<text x=\"320\" y=\"392\" font-size=\"13\" text-anchor=\"middle\">threshold "
         "(Cd/V1d)</text>\n";
    s += "<text x=\"15\" y=\"200\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 15 200)\">error (%)</text>\n";
    s += "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
    char pt[48];
    for (const auto& p : curve) {
        std::snprintf(pt, sizeof pt, "%.2f,%.2f ", X(p.threshold), Y(p.error_percent));
        s += pt;
    }
    s += "\"/>\n</svg>\n";
    return s;
}

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f.write(content.data(), std::streamsize(content.size()));
}

inline void write_table(const TableFile& t, const std::string& out_dir, bool with_json) {
    write_text(out_dir + "/" + t.name + ".csv", t.csv);
    if (with_json) write_text(out_dir + "/" + t.name + ".json", t.json.dump(2) + "\n");
}

}  // namespace gemkit::reports
