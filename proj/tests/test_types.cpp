#include <catch2/catch_amalgamated.hpp>

#include <gemkit/corpus.hpp>
#include <gemkit/types.hpp>

using namespace gemkit;

TEST_CASE("word_for builds VCV/VCCV words") {
    CHECK(word_for(Consonant::m, Vowel::a, Form::singleton) == "ama");
    CHECK(word_for(Consonant::m, Vowel::a, Form::geminate) == "amma");
    CHECK(word_for(Consonant::r, Vowel::u, Form::geminate) == "urru");
    CHECK(word_for(Consonant::l, Vowel::i, Form::singleton) == "ili");
}

TEST_CASE("parse_word accepts exactly the nasal/liquid inventory") {
    auto anna = parse_word("anna");
    REQUIRE(anna);
    CHECK(anna->consonant == Consonant::n);
    CHECK(anna->vowel == Vowel::a);
    CHECK(anna->form == Form::geminate);

    CHECK_FALSE(parse_word("aba"));    // consonant out of scope
    CHECK_FALSE(parse_word("iffi"));   // fricative family
    CHECK_FALSE(parse_word("amu"));    // vowels differ
    CHECK_FALSE(parse_word("amna"));   // doubled grapheme must repeat
    CHECK_FALSE(parse_word("am"));
    CHECK_FALSE(parse_word("ammma"));
}

TEST_CASE("word round-trips through parse_word for the whole inventory") {
    for (Consonant c : all_consonants)
        for (Vowel v : all_vowels)
            for (Form f : {Form::singleton, Form::geminate}) {
                auto shape = parse_word(word_for(c, v, f));
                REQUIRE(shape);
                CHECK(shape->consonant == c);
                CHECK(shape->vowel == v);
                CHECK(shape->form == f);
            }
}

TEST_CASE("family and gender derivations") {
    CHECK(family_of(Consonant::m) == Family::nasals);
    CHECK(family_of(Consonant::n) == Family::nasals);
    CHECK(family_of(Consonant::l) == Family::liquids);
    CHECK(family_of(Consonant::r) == Family::liquids);
    CHECK(gender_of(Speaker::FS1) == Gender::female);
    CHECK(gender_of(Speaker::FS3) == Gender::female);
    CHECK(gender_of(Speaker::MS1) == Gender::male);
    CHECK(gender_of(Speaker::MS3) == Gender::male);
}

TEST_CASE("speaker_from_string is exact") {
    CHECK(speaker_from_string("FS2") == Speaker::FS2);
    CHECK(speaker_from_string("MS3") == Speaker::MS3);
    CHECK_FALSE(speaker_from_string("FS4"));
    CHECK_FALSE(speaker_from_string("fs1"));  // callers normalize case first
}

TEST_CASE("token name format/parse round-trip over every valid TokenMeta") {
    for (Consonant c : all_consonants)
        for (Vowel v : all_vowels)
            for (Form f : {Form::singleton, Form::geminate})
                for (Speaker spk : all_speakers)
                    for (int rep = 1; rep <= 3; ++rep) {
                        TokenMeta meta = make_meta(c, v, f, spk, rep);
                        TokenMeta back = corpus::parse_token_name(corpus::format_token_name(meta));
                        CHECK(back == meta);
                    }
}
