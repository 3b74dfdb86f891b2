#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "symatlas/rng.hpp"
#include "symatlas/text.hpp"
#include "support/paths.hpp"

using namespace symatlas;

namespace {

const AffixTables& tables() {
    static AffixTables t = load_affix_tables(testsupport::data_path("lexicons/clitics.txt"),
                                             testsupport::data_path("lexicons/suffixes.txt"),
                                             testsupport::data_path("lexicons/prefixes.txt"));
    return t;
}

}  // namespace

TEST_CASE("normalize_text folds Arabic letter variants") {
    // Arabic kaf U+0643 -> Persian kaf U+06A9
    CHECK(normalize_text("كتاب") == "کتاب");
    // Arabic yeh U+064A and alef maksura U+0649 -> Persian yeh U+06CC
    CHECK(normalize_text("علي") == "علی");
    CHECK(normalize_text("على") == "علی");
}

TEST_CASE("normalize_text composes hamza pairs before folding") {
    // alef + combining madda -> alef with madda
    CHECK(normalize_text("آب") == "آب");
    // yeh + combining hamza -> yeh with hamza, not bare Persian yeh
    CHECK(normalize_text("ئ") == "ئ");
    // waw + combining hamza
    CHECK(normalize_text("ؤ") == "ؤ");
}

TEST_CASE("normalize_text strips diacritics, tatweel, and directional marks") {
    // short vowels and shadda vanish
    CHECK(normalize_text("گُل") == "گل");
    CHECK(normalize_text("دلّ") == "دل");
    // tatweel vanishes
    CHECK(normalize_text("گـل") == "گل");
    // LRM/RLM/BOM/ZWJ vanish
    CHECK(normalize_text("‏گل‎﻿‍") == "گل");
    // stray combining hamza with no composable base is dropped
    CHECK(normalize_text("بٔ") == "ب");
}

TEST_CASE("normalize_text collapses whitespace and keeps ZWNJ inside words") {
    CHECK(normalize_text("  گل \t و \n  بلبل ") == "گل و بلبل");
    // ZWNJ compound survives as one word
    CHECK(normalize_text("می‌خانه") == "می‌خانه");
    // runs of ZWNJ collapse, edge ZWNJ drops
    CHECK(normalize_text("می‌‌خانه") == "می‌خانه");
    CHECK(normalize_text("‌گل‌") == "گل");
    // a word that is nothing but ZWNJ disappears entirely
    CHECK(normalize_text("گل ‌ بلبل") == "گل بلبل");
    CHECK(normalize_text("") == "");
}

TEST_CASE("normalize_text is idempotent over random unicode strings") {
    // Pool mixes Persian letters, Arabic variants, combining marks, joiners,
    // spaces, and ASCII, so the property run covers every pipeline branch.
    const std::vector<char32_t> pool = {
        U'گ',   U'ل',    U'س',    U'ر',    U'و',    0x0627, 0x064A, 0x0649, 0x0643, 0x06CC,
        0x06A9, 0x0653,  0x0654,  0x0655,  0x064B,  0x064F, 0x0651, 0x0652, 0x0670, 0x0640,
        0x200C, 0x200D,  0x200E,  0x200F,  0xFEFF,  U' ',   U'\t',  U'\n',  0x00A0, U'a',
        U'z',   U'0',    0x0648,  0x0628,  U' ',    0x200C};
    auto rng = substream(20260818, "text-idempotence");
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t len = uniform_index(rng, 41);
        std::vector<char32_t> cps;
        for (std::size_t i = 0; i < len; ++i) cps.push_back(pool[uniform_index(rng, pool.size())]);
        std::string raw = utf8_encode(cps);
        std::string once = normalize_text(raw);
        CHECK(normalize_text(once) == once);
    }
}

TEST_CASE("tokenize_hemistich splits on spaces and respects compounds") {
    CHECK(tokenize_hemistich("").empty());
    CHECK(tokenize_hemistich("گل و بلبل") == std::vector<std::string>{"گل", "و", "بلبل"});
    CHECK(tokenize_hemistich("می‌خانه") == std::vector<std::string>{"می‌خانه"});
}

TEST_CASE("tokenizing a joined pair of hemistichs concatenates their token lists") {
    const std::vector<std::string> samples = {"گل و بلبل", "ساغر می", "چشم", "می‌خانه دل"};
    auto rng = substream(20260818, "text-concat");
    for (int trial = 0; trial < 50; ++trial) {
        const std::string& a = samples[uniform_index(rng, samples.size())];
        const std::string& b = samples[uniform_index(rng, samples.size())];
        std::vector<std::string> joined = tokenize_hemistich(a + " " + b);
        std::vector<std::string> expected = tokenize_hemistich(a);
        std::vector<std::string> tb = tokenize_hemistich(b);
        expected.insert(expected.end(), tb.begin(), tb.end());
        CHECK(joined == expected);
    }
}

TEST_CASE("surface_relation finds clitic removal first") {
    SurfaceRelation r = surface_relation("دلم", "دل", tables());
    CHECK(r.kind == RelationKind::CliticRemoval);
    CHECK(r.residue == "م");

    // residue spelled with a ZWNJ keeps the joiner
    SurfaceRelation z = surface_relation("باده‌ام", "باده", tables());
    CHECK(z.kind == RelationKind::CliticRemoval);
    CHECK(z.residue == "‌ام");

    // precedence: a tail in both the clitic and suffix tables reads as clitic
    SurfaceRelation p = surface_relation("برگات", "برگ", tables());
    CHECK(p.kind == RelationKind::CliticRemoval);
    CHECK(p.residue == "ات");
}

TEST_CASE("surface_relation covers suffix, prefix, and near-head extension") {
    SurfaceRelation s = surface_relation("گلها", "گل", tables());
    CHECK(s.kind == RelationKind::SuffixStrip);
    CHECK(s.residue == "ها");

    SurfaceRelation pre = surface_relation("می‌رود", "رود", tables());
    CHECK(pre.kind == RelationKind::PrefixStrip);
    CHECK(pre.residue == "می‌");

    // trailing heh is in no inventory, stem has three letters: extension
    SurfaceRelation nhe = surface_relation("سبزه", "سبز", tables());
    CHECK(nhe.kind == RelationKind::NearHeadExtension);
    CHECK(nhe.residue == "ه");

    // two-letter stem is too short for an extension reading
    CHECK(surface_relation("دله", "دل", tables()).kind == RelationKind::None);
}

TEST_CASE("surface_relation rejects identity and unrelated forms") {
    CHECK(surface_relation("گل", "گل", tables()).kind == RelationKind::None);
    CHECK(surface_relation("گل", "سرو", tables()).kind == RelationKind::None);
    CHECK(surface_relation("", "گل", tables()).kind == RelationKind::None);
    // equal-length distinct forms can never differ by a residue
    CHECK(surface_relation("گلی", "گلش", tables()).kind == RelationKind::None);
}

TEST_CASE("surface_relation is symmetric and residues reconstruct the longer form") {
    const std::vector<std::string> vocab = {"گل",         "گلها",  "گلی",   "دل",    "دلم",
                                            "باده",       "باده‌ام", "سبز",   "سبزه",  "رود",
                                            "می‌رود", "چشم",   "چشمان", "ساغر",  "ساغرم",
                                            "سرو",        "سروی",  "خرقه",  "آتش",   "آتشی"};
    for (const std::string& a : vocab) {
        for (const std::string& b : vocab) {
            SurfaceRelation ab = surface_relation(a, b, tables());
            SurfaceRelation ba = surface_relation(b, a, tables());
            CHECK(ab.kind == ba.kind);
            CHECK(ab.residue == ba.residue);
            if (ab.kind != RelationKind::None) {
                const std::string& longer = a.size() >= b.size() ? a : b;
                const std::string& shorter = a.size() >= b.size() ? b : a;
                CHECK(reconstruct_longer(shorter, ab) == longer);
            }
        }
    }
}
