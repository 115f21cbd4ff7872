#pragma once
#include <algorithm>
#include <cctype>
#include <filesystem>
#include <string>
#include <vector>

#include "types.hpp"

// Corpus discovery following the GEMMA database layout:
//   <root>/<Family>/<Speaker>/<WORD><R><SPK>.wav
// e.g. <root>/Nasals/FS1/AMA1FS1.wav. Matching is case-insensitive.

namespace gemkit::corpus {

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return s;
}
inline std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return char(std::toupper(c)); });
    return s;
}

// "<WORD><R><SPK>.wav" -> TokenMeta. Throws MalformedName when the shape is
// wrong (no speaker suffix, repetition outside 1..3) and UnknownWord — with
// the parsed pieces preserved — when the shape is fine but the word is not in
// the nasal/liquid inventory.
inline TokenMeta parse_token_name(const std::string& filename) {
    std::string stem = filename;
    if (auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (auto dot = stem.rfind('.'); dot != std::string::npos) {
        if (lower(stem.substr(dot)) != ".wav")
            throw MalformedName(filename + ": not a .wav file");
        stem = stem.substr(0, dot);
    }
    if (stem.size() < 4 + 3)  // shortest word "ama" + digit + 3-char speaker
        throw MalformedName(filename + ": name too short for <WORD><R><SPK>");
    std::string spk_str = upper(stem.substr(stem.size() - 3));
    auto spk = speaker_from_string(spk_str);
    if (!spk) throw MalformedName(filename + ": no speaker suffix (FS1..MS3)");
    char rep_ch = stem[stem.size() - 4];
    if (rep_ch < '0' || rep_ch > '9')
        throw MalformedName(filename + ": missing repetition digit");
    int rep = rep_ch - '0';
    if (rep < 1 || rep > 3)
        throw MalformedName(filename + ": repetition " + std::to_string(rep) +
                            " outside 1..3");
    std::string word = lower(stem.substr(0, stem.size() - 4));
    auto shape = parse_word(word);
    if (!shape) throw UnknownWord(word, spk_str, rep);
    return make_meta(shape->consonant, shape->vowel, shape->form, *spk, rep);
}

// Inverse of parse_token_name (canonical uppercase form).
inline std::string format_token_name(const TokenMeta& m) {
    return upper(m.word) + std::to_string(m.repetition) + to_string(m.speaker) + ".wav";
}

struct CorpusEntry {
    TokenMeta meta;
    std::string path;
};

struct ScanResult {
    std::vector<CorpusEntry> entries;  // sorted by path
    std::vector<std::string> warnings; // missing folders, skipped files
};

inline const char* family_folder(Family f) {
    return f == Family::nasals ? "Nasals" : "Liquids";
}

// Deterministic (path-sorted) listing of tokens under <root>/{Nasals,Liquids}/<SPK>/.
// Missing speaker folders produce warnings; unknown/alien files are skipped
// with warnings; zero usable tokens is an error.
inline ScanResult scan_corpus(const std::string& root,
                              std::vector<Family> families = {Family::nasals,
                                                              Family::liquids}) {
    namespace fs = std::filesystem;
    if (!fs::exists(root) || !fs::is_directory(root))
        throw MissingRoot("corpus root " + root + " does not exist");
    ScanResult res;
    for (Family fam : families) {
        fs::path fam_dir = fs::path(root) / family_folder(fam);
        if (!fs::is_directory(fam_dir)) {
            res.warnings.push_back("missing family folder " + fam_dir.string());
            continue;
        }
        for (Speaker spk : all_speakers) {
            fs::path spk_dir = fam_dir / to_string(spk);
            if (!fs::is_directory(spk_dir)) {
                res.warnings.push_back("missing speaker folder " + spk_dir.string());
                continue;
            }
            for (const auto& ent : fs::directory_iterator(spk_dir)) {
                if (!ent.is_regular_file()) continue;
                const std::string p = ent.path().string();
                try {
                    TokenMeta meta = parse_token_name(ent.path().filename().string());
                    if (meta.family != fam)
                        res.warnings.push_back(p + ": word belongs to the " +
                                               std::string(to_string(meta.family)) +
                                               " family, skipped");
                    else if (meta.speaker != spk)
                        res.warnings.push_back(p + ": speaker suffix does not match folder, skipped");
                    else
                        res.entries.push_back({meta, p});
                } catch (const MalformedName& e) {
                    res.warnings.push_back(std::string("skipped: ") + e.what());
                }
            }
        }
    }
    std::sort(res.entries.begin(), res.entries.end(),
              [](const CorpusEntry& a, const CorpusEntry& b) { return a.path < b.path; });
    if (res.entries.empty()) throw EmptyCorpus("no tokens found under " + root);
    return res;
}

}  // namespace gemkit::corpus
