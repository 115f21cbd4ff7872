#pragma once
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corpus.hpp"
#include "errors.hpp"
#include "records.hpp"
#include "reports.hpp"
#include "segmentation.hpp"
#include "synth.hpp"
#include "types.hpp"
#include "wav.hpp"

// Command-line front end. `run()` takes the argument vector without the
// program name and returns the process exit code, so the whole CLI is
// drivable in-process from tests.
//
// Exit codes: 0 success (possibly with skip diagnostics), 1 usage error,
// 2 data error.

namespace gemkit::cli {

namespace fs = std::filesystem;

namespace detail {

inline Family family_from(const std::string& s) {
    if (s == "nasals") return Family::nasals;
    if (s == "liquids") return Family::liquids;
    throw BadConfig("unknown family \"" + s + "\"");
}

inline std::optional<Gender> gender_from_group(const std::string& s) {
    if (s == "combined") return std::nullopt;
    if (s == "female") return Gender::female;
    return Gender::male;
}

inline bool parse_grid(const std::string& s, classify::Grid& g) {
    char tail = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf%c", &g.lo, &g.hi, &g.step, &tail) != 3)
        return false;
    return g.step > 0 && g.hi > g.lo;
}

// Would every 256-sample reference frame fit inside a token of this length?
inline bool frames_fit(const seg::Annotation& ann, std::int64_t len) {
    if (!ann.segments_at_least()) return false;
    try {
        seg::reference_frames(ann, len);
    } catch (const FrameOutOfBounds&) {
        return false;
    }
    return true;
}

inline void emit_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace detail

inline int cmd_scan(const std::string& root, const std::vector<std::string>& family_names,
                    const std::string& out, const std::string& format) {
    std::vector<Family> fams;
    for (const auto& f : family_names) fams.push_back(detail::family_from(f));
    auto res = corpus::scan_corpus(root, fams);
    detail::emit_warnings(res.warnings);

    std::string csv = "file,word,consonant,vowel,form,speaker,gender,repetition,family,path\n";
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : res.entries) {
        const TokenMeta& m = e.meta;
        std::string file = fs::path(e.path).filename().string();
        csv += file + "," + m.word + "," + to_char(m.consonant) + "," + to_char(m.vowel) +
               "," + to_string(m.form) + "," + to_string(m.speaker) + "," +
               to_string(m.gender) + "," + std::to_string(m.repetition) + "," +
               to_string(m.family) + "," + e.path + "\n";
        j.push_back({{"file", file},
                     {"word", m.word},
                     {"consonant", std::string(1, to_char(m.consonant))},
                     {"vowel", std::string(1, to_char(m.vowel))},
                     {"form", to_string(m.form)},
                     {"speaker", to_string(m.speaker)},
                     {"gender", to_string(m.gender)},
                     {"repetition", m.repetition},
                     {"family", to_string(m.family)},
                     {"path", e.path}});
    }
    std::string payload = format == "json" ? j.dump(2) + "\n" : csv;
    if (out.empty())
        std::cout << payload;
    else
        reports::write_text(out, payload);
    std::cerr << res.entries.size() << " tokens\n";
    return 0;
}

inline int cmd_extract(const std::string& root, const std::string& annotations,
                       const std::string& out, const std::vector<std::string>& family_names,
                       const std::string& format) {
    std::vector<Family> fams;
    for (const auto& f : family_names) fams.push_back(detail::family_from(f));
    auto scan = corpus::scan_corpus(root, fams);
    detail::emit_warnings(scan.warnings);
    auto anns = seg::load_annotations(annotations);

    std::vector<records::ParameterRecord> recs;
    std::size_t skipped = 0;
    for (const auto& entry : scan.entries) {
        std::string file = fs::path(entry.path).filename().string();
        auto it = anns.find(file);
        if (it == anns.end()) {
            std::cerr << "skip " << file << ": no annotation\n";
            ++skipped;
            continue;
        }
        try {
            auto loaded = wav::load_wav_checked(entry.path);
            detail::emit_warnings(loaded.warnings);
            auto rec = records::measure_token(loaded.buffer, it->second, entry.meta,
                                              records::Source::measured);
            rec.file = file;
            recs.push_back(std::move(rec));
        } catch (const Error& e) {
            std::cerr << "skip " << file << ": " << e.what() << "\n";
            ++skipped;
        }
    }
    if (recs.empty()) {
        std::cerr << "error: no extractable tokens\n";
        return 2;
    }
    records::write_records_csv(recs, out);
    if (format == "json")
        records::write_records_json(recs, fs::path(out).replace_extension(".json").string());
    std::cerr << "extracted " << recs.size() << " records, skipped " << skipped << "\n";
    return 0;
}

inline int cmd_stats(const std::string& records_path, const std::string& family,
                     const std::string& analysis, const std::string& out_dir,
                     const std::string& format) {
    auto recs = records::read_records_csv(records_path);
    Family fam = detail::family_from(family);
    fs::create_directories(out_dir);
    bool with_json = format == "json";
    bool all = analysis == "all";
    int failures = 0;
    auto run_one = [&](const char* name, auto make) {
        if (!all && analysis != name) return;
        try {
            reports::write_table(make(), out_dir, with_json);
        } catch (const InsufficientData& e) {
            std::cerr << "stats " << name << ": " << e.what() << "\n";
            ++failures;
        }
    };
    run_one("summary", [&] { return reports::summary_table(recs, fam); });
    run_one("correlation", [&] { return reports::correlation_table(recs, fam); });
    run_one("oneway", [&] { return reports::oneway_table(recs, fam); });
    run_one("factorial", [&] { return reports::factorial_table(recs, fam); });
    run_one("repeated", [&] { return reports::repeated_table(recs, fam); });
    return failures ? 2 : 0;
}

inline int cmd_classify(const std::string& records_path, const std::string& family,
                        const std::vector<std::string>& features, const std::string& protocol,
                        const std::string& group, const classify::Grid& grid,
                        const std::string& out_dir, const std::string& format, bool svg) {
    auto recs = records::read_records_csv(records_path);
    Family fam = detail::family_from(family);
    fs::create_directories(out_dir);
    bool with_json = format == "json";

    reports::ClassifyOptions opt;
    if (!features.empty()) opt.features = features;
    opt.protocol = protocol == "leave_one_out" ? classify::Protocol::leave_one_out
                                               : classify::Protocol::resubstitution;
    opt.gender = detail::gender_from_group(group);
    opt.grid = grid;

    reports::write_table(reports::classification_table(recs, fam, opt), out_dir, with_json);
    reports::write_table(reports::threshold_table(recs, fam, opt), out_dir, with_json);
    reports::write_table(reports::error_curve_table(recs, fam, opt), out_dir, with_json);
    if (svg) {
        auto [xs, xg] = reports::split_feature(recs, fam, "cd_over_v1d", opt.gender);
        auto curve = classify::error_curve(xs, xg, grid);
        reports::write_text(out_dir + "/error_curve.svg", reports::error_curve_svg(curve));
    }
    return 0;
}

inline int cmd_synth(const std::string& family, int n, std::uint64_t seed,
                     const std::string& out_dir, bool waveforms, const std::string& format) {
    Family fam = detail::family_from(family);
    auto cells = synth::family_cells(fam);
    auto tokens = synth::generate_param_corpus(cells, n, seed);
    fs::create_directories(out_dir);

    std::map<std::string, seg::Annotation> anns;
    std::vector<records::ParameterRecord> recs;
    recs.reserve(tokens.size());
    for (auto& tok : tokens) {
        if (waveforms) synth::enforce_frame_minimum(tok.time);
        seg::Annotation ann{0, tok.time.v1_samples, tok.time.v1_samples + tok.time.c_samples,
                            tok.time.ut_samples};
        std::string file = corpus::format_token_name(tok.meta);

        records::ParameterRecord rec;
        rec.file = file;
        rec.meta = tok.meta;
        rec.source = records::Source::synthetic;
        rec.time = tok.time;
        rec.frames_available = detail::frames_fit(ann, tok.time.ut_samples);
        recs.push_back(std::move(rec));
        if (anns.count(file)) throw BadConfig("duplicate token name " + file);
        anns.emplace(file, ann);

        if (waveforms) {
            auto spec = synth::spec_for_record(tok);
            auto [buffer, wav_ann] = synth::synth_token_waveform(spec);
            fs::path dir = fs::path(out_dir) / corpus::family_folder(tok.meta.family) /
                           to_string(tok.meta.speaker);
            fs::create_directories(dir);
            wav::save_wav(buffer, (dir / file).string());
            anns[file] = wav_ann;
        }
    }
    records::write_records_csv(recs, out_dir + "/records.csv");
    if (format == "json") records::write_records_json(recs, out_dir + "/records.json");
    seg::save_annotations(anns, out_dir + "/annotations.csv");
    std::cerr << "wrote " << recs.size() << " tokens\n";
    return 0;
}

inline int run(std::vector<std::string> args) {
    CLI::App app{"gemkit: corpus tools for Italian singleton/geminate consonant analysis"};
    app.require_subcommand(1);

    // scan
    auto* scan = app.add_subcommand("scan", "List tokens found in a corpus tree");
    std::string sc_corpus, sc_out, sc_format = "csv";
    std::vector<std::string> sc_families{"nasals", "liquids"};
    scan->add_option("--corpus", sc_corpus, "Corpus root directory")->required();
    scan->add_option("--family", sc_families, "Families to include")
        ->delimiter(',')
        ->check(CLI::IsMember({"nasals", "liquids"}));
    scan->add_option("--out", sc_out, "Write listing to this file (default stdout)");
    scan->add_option("--format", sc_format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));

    // extract
    auto* extract =
        app.add_subcommand("extract", "Measure annotated tokens into a parameter CSV");
    std::string ex_corpus, ex_annotations, ex_out, ex_format = "csv";
    std::vector<std::string> ex_families{"nasals", "liquids"};
    extract->add_option("--corpus", ex_corpus, "Corpus root directory")->required();
    extract->add_option("--annotations", ex_annotations, "Annotation CSV")->required();
    extract->add_option("--out", ex_out, "Output records CSV")->required();
    extract->add_option("--family", ex_families, "Families to include")
        ->delimiter(',')
        ->check(CLI::IsMember({"nasals", "liquids"}));
    extract->add_option("--format", ex_format, "csv, or json to add a JSON mirror")
        ->check(CLI::IsMember({"csv", "json"}));

    // stats
    auto* stats = app.add_subcommand("stats", "Run the statistical battery on a records CSV");
    std::string st_records, st_family, st_analysis = "all", st_out, st_format = "csv";
    stats->add_option("--records", st_records, "Records CSV")->required();
    stats->add_option("--family", st_family, "Family to analyse")
        ->required()
        ->check(CLI::IsMember({"nasals", "liquids"}));
    stats->add_option("--analysis", st_analysis, "Which analysis to run")
        ->check(CLI::IsMember(
            {"summary", "correlation", "oneway", "factorial", "repeated", "all"}));
    stats->add_option("--out", st_out, "Output directory")->required();
    stats->add_option("--format", st_format, "csv, or json to add JSON mirrors")
        ->check(CLI::IsMember({"csv", "json"}));

    // classify
    auto* classify_cmd =
        app.add_subcommand("classify", "Fit classifiers and thresholds on a records CSV");
    std::string cl_records, cl_family, cl_protocol = "resubstitution", cl_group = "combined";
    std::string cl_grid = "0.2:2.0:0.005", cl_out, cl_format = "csv";
    std::vector<std::string> cl_features;
    bool cl_svg = false;
    classify_cmd->add_option("--records", cl_records, "Records CSV")->required();
    classify_cmd->add_option("--family", cl_family, "Family to classify")
        ->required()
        ->check(CLI::IsMember({"nasals", "liquids"}));
    classify_cmd->add_option("--features", cl_features, "Duration features to test")
        ->delimiter(',');
    classify_cmd->add_option("--protocol", cl_protocol, "Error estimation protocol")
        ->check(CLI::IsMember({"resubstitution", "leave_one_out"}));
    classify_cmd->add_option("--group", cl_group, "Speaker group")
        ->check(CLI::IsMember({"combined", "male", "female"}));
    classify_cmd->add_option("--grid", cl_grid, "Error-curve grid lo:hi:step");
    classify_cmd->add_option("--out", cl_out, "Output directory")->required();
    classify_cmd->add_option("--format", cl_format, "csv, or json to add JSON mirrors")
        ->check(CLI::IsMember({"csv", "json"}));
    classify_cmd->add_flag("--svg", cl_svg, "Also render the error curve as SVG");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
    std::string sy_family, sy_out, sy_format = "csv";
    int sy_n = 0;
    std::uint64_t sy_seed = 1;
    bool sy_waveforms = false;
    synth_cmd->add_option("--family", sy_family, "Family to synthesize")
        ->required()
        ->check(CLI::IsMember({"nasals", "liquids"}));
    synth_cmd->add_option("--n", sy_n, "Tokens per word cell")->required();
    synth_cmd->add_option("--seed", sy_seed, "Random seed");
    synth_cmd->add_option("--out", sy_out, "Output directory")->required();
    synth_cmd->add_flag("--waveforms", sy_waveforms, "Also write WAV files");
    synth_cmd->add_option("--format", sy_format, "csv, or json to add a JSON mirror")
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (scan->parsed()) return cmd_scan(sc_corpus, sc_families, sc_out, sc_format);
        if (extract->parsed())
            return cmd_extract(ex_corpus, ex_annotations, ex_out, ex_families, ex_format);
        if (stats->parsed())
            return cmd_stats(st_records, st_family, st_analysis, st_out, st_format);
        if (classify_cmd->parsed()) {
            classify::Grid grid;
            if (!detail::parse_grid(cl_grid, grid)) {
                std::cerr << "error: --grid expects lo:hi:step with step > 0, hi > lo\n";
                return 1;
            }
            return cmd_classify(cl_records, cl_family, cl_features, cl_protocol, cl_group,
                                grid, cl_out, cl_format, cl_svg);
        }
        if (synth_cmd->parsed())
            return cmd_synth(sy_family, sy_n, sy_seed, sy_out, sy_waveforms, sy_format);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

inline int main_entry(int argc, char** argv) {
    return run(std::vector<std::string>(argv + 1, argv + argc));
}

}  // namespace gemkit::cli
