#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace gemkit {

enum class Gender { female, male };
enum class Vowel { a, i, u };
enum class Consonant { m, n, l, r };
enum class Form { singleton, geminate };
enum class Family { nasals, liquids };
enum class Speaker { FS1, FS2, FS3, MS1, MS2, MS3 };

inline constexpr std::array<Vowel, 3> all_vowels{Vowel::a, Vowel::i, Vowel::u};
inline constexpr std::array<Consonant, 4> all_consonants{Consonant::m, Consonant::n,
                                                         Consonant::l, Consonant::r};
inline constexpr std::array<Speaker, 6> all_speakers{Speaker::FS1, Speaker::FS2, Speaker::FS3,
                                                     Speaker::MS1, Speaker::MS2, Speaker::MS3};

inline char to_char(Vowel v) { return "aiu"[static_cast<int>(v)]; }
inline char to_char(Consonant c) { return "mnlr"[static_cast<int>(c)]; }
inline const char* to_string(Form f) { return f == Form::singleton ? "singleton" : "geminate"; }
inline const char* to_string(Gender g) { return g == Gender::female ? "female" : "male"; }
inline const char* to_string(Family f) { return f == Family::nasals ? "nasals" : "liquids"; }
inline const char* to_string(Speaker s) {
    static constexpr const char* names[] = {"FS1", "FS2", "FS3", "MS1", "MS2", "MS3"};
    return names[static_cast<int>(s)];
}

inline Family family_of(Consonant c) {
    return (c == Consonant::m || c == Consonant::n) ? Family::nasals : Family::liquids;
}
inline Gender gender_of(Speaker s) {
    return static_cast<int>(s) < 3 ? Gender::female : Gender::male;
}

inline std::optional<Vowel> vowel_from_char(char ch) {
    switch (ch) {
        case 'a': return Vowel::a;
        case 'i': return Vowel::i;
        case 'u': return Vowel::u;
        default: return std::nullopt;
    }
}
inline std::optional<Consonant> consonant_from_char(char ch) {
    switch (ch) {
        case 'm': return Consonant::m;
        case 'n': return Consonant::n;
        case 'l': return Consonant::l;
        case 'r': return Consonant::r;
        default: return std::nullopt;
    }
}
inline std::optional<Speaker> speaker_from_string(const std::string& s) {
    for (Speaker spk : all_speakers)
        if (s == to_string(spk)) return spk;
    return std::nullopt;
}

// The VCV/VCCV word for a (consonant, vowel, form) cell: same vowel on both
// sides, doubled grapheme for geminates ("ama" / "amma").
inline std::string word_for(Consonant c, Vowel v, Form f) {
    std::string w;
    w += to_char(v);
    w += to_char(c);
    if (f == Form::geminate) w += to_char(c);
    w += to_char(v);
    return w;
}

struct WordShape {
    Consonant consonant;
    Vowel vowel;
    Form form;
};

// Structural parse of a lowercase word: v + c (+ same c) + same v, with the
// consonant in the nasal/liquid inventory. Returns nullopt for anything else.
inline std::optional<WordShape> parse_word(const std::string& w) {
    if (w.size() != 3 && w.size() != 4) return std::nullopt;
    auto v1 = vowel_from_char(w.front());
    auto v2 = vowel_from_char(w.back());
    auto c1 = consonant_from_char(w[1]);
    if (!v1 || !v2 || !c1 || *v1 != *v2) return std::nullopt;
    if (w.size() == 4) {
        auto c2 = consonant_from_char(w[2]);
        if (!c2 || *c2 != *c1) return std::nullopt;
        return WordShape{*c1, *v1, Form::geminate};
    }
    return WordShape{*c1, *v1, Form::singleton};
}

// Identity of one recorded token.
struct TokenMeta {
    std::string word;
    Consonant consonant{};
    Vowel vowel{};
    Form form{};
    Speaker speaker{};
    Gender gender{};
    int repetition = 1;  // 1..3
    Family family{};

    bool operator==(const TokenMeta&) const = default;
};

inline TokenMeta make_meta(Consonant c, Vowel v, Form f, Speaker spk, int rep) {
    return TokenMeta{word_for(c, v, f), c, v, f, spk, gender_of(spk), rep, family_of(c)};
}

struct SignalBuffer {
    std::vector<double> samples;  // normalized to [-1, 1)
    double sample_rate = 10000.0;
};

}  // namespace gemkit
