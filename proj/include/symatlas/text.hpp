#pragma once
// Persian-aware text normalization, tokenization, and the surface-relation
// detector that gates family merges.
//
// Normalization is deliberately narrow: canonical composition of the few
// hamza/madda pairs that occur in this character repertoire, Arabic yeh/kaf
// folded to their Persian forms, combining diacritics and formatting marks
// stripped, ZWNJ kept as an intra-word joiner, whitespace collapsed. The
// pipeline is idempotent, which the tests check by property.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace symatlas {

// ---------------------------------------------------------------------------
// UTF-8 <-> UTF-32

inline std::vector<char32_t> utf8_decode(const std::string& s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char b0 = static_cast<unsigned char>(s[i]);
        char32_t cp = 0xFFFD;
        std::size_t len = 1;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 >> 5) == 0x6 && i + 1 < s.size()) {
            unsigned char b1 = static_cast<unsigned char>(s[i + 1]);
            if ((b1 & 0xC0) == 0x80) {
                cp = ((b0 & 0x1Fu) << 6) | (b1 & 0x3Fu);
                len = 2;
                if (cp < 0x80) cp = 0xFFFD;
            }
        } else if ((b0 >> 4) == 0xE && i + 2 < s.size()) {
            unsigned char b1 = static_cast<unsigned char>(s[i + 1]);
            unsigned char b2 = static_cast<unsigned char>(s[i + 2]);
            if ((b1 & 0xC0) == 0x80 && (b2 & 0xC0) == 0x80) {
                cp = ((b0 & 0x0Fu) << 12) | ((b1 & 0x3Fu) << 6) | (b2 & 0x3Fu);
                len = 3;
                if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
            }
        } else if ((b0 >> 3) == 0x1E && i + 3 < s.size()) {
            unsigned char b1 = static_cast<unsigned char>(s[i + 1]);
            unsigned char b2 = static_cast<unsigned char>(s[i + 2]);
            unsigned char b3 = static_cast<unsigned char>(s[i + 3]);
            if ((b1 & 0xC0) == 0x80 && (b2 & 0xC0) == 0x80 && (b3 & 0xC0) == 0x80) {
                cp = ((b0 & 0x07u) << 18) | ((b1 & 0x3Fu) << 12) | ((b2 & 0x3Fu) << 6) |
                     (b3 & 0x3Fu);
                len = 4;
                if (cp < 0x10000 || cp > 0x10FFFF) cp = 0xFFFD;
            }
        }
        if (cp == 0xFFFD && len == 1 && b0 >= 0x80) len = 1;  // skip the bad byte
        out.push_back(cp);
        i += len;
    }
    return out;
}

inline void utf8_append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

inline std::string utf8_encode(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size() * 2);
    for (char32_t cp : cps) utf8_append(out, cp);
    return out;
}

// Codepoint count of a UTF-8 string (continuation bytes don't count).
inline std::size_t cp_length(const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

// ---------------------------------------------------------------------------
// Normalization

constexpr char32_t kZwnj = 0x200C;

namespace detail {

inline bool is_space_cp(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == 0x0B || c == 0x0C ||
           c == 0x00A0;
}

// Combining marks, tatweel, and invisible formatting characters dropped
// from normalized text. ZWNJ is deliberately absent: it carries
// morphological information inside words.
inline bool is_stripped_cp(char32_t c) {
    if (c >= 0x064B && c <= 0x0655) return true;  // harakat, tanwin, shadda, sukun, hamza marks
    return c == 0x0670 || c == 0x0640 || c == 0x200D || c == 0x200E || c == 0x200F ||
           c == 0xFEFF;
}

// Canonical composition for the hamza/madda pairs of this repertoire.
// Returns 0 when (base, mark) is not a composable pair.
inline char32_t compose_pair(char32_t base, char32_t mark) {
    if (base == 0x0627 && mark == 0x0653) return 0x0622;  // alef + madda
    if (base == 0x0627 && mark == 0x0654) return 0x0623;  // alef + hamza above
    if (base == 0x0627 && mark == 0x0655) return 0x0625;  // alef + hamza below
    if (base == 0x0648 && mark == 0x0654) return 0x0624;  // waw + hamza above
    if (base == 0x064A && mark == 0x0654) return 0x0626;  // yeh + hamza above
    return 0;
}

inline char32_t fold_cp(char32_t c) {
    switch (c) {
        case 0x064A: return 0x06CC;  // Arabic yeh -> Persian yeh
        case 0x0649: return 0x06CC;  // alef maksura -> Persian yeh
        case 0x0643: return 0x06A9;  // Arabic kaf -> Persian kaf
        default: return c;
    }
}

}  // namespace detail

// Canonical text form. Total function: invalid UTF-8 bytes become U+FFFD
// before the pipeline runs, and running the pipeline twice is a no-op.
inline std::string normalize_text(const std::string& raw) {
    std::vector<char32_t> in = utf8_decode(raw);

    // Compose before folding so yeh+hamza becomes U+0626 rather than losing
    // its hamza to the strip pass; then fold and drop stripped marks.
    std::vector<char32_t> cps;
    cps.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (i + 1 < in.size()) {
            char32_t composed = detail::compose_pair(in[i], in[i + 1]);
            if (composed) {
                cps.push_back(composed);
                ++i;
                continue;
            }
        }
        char32_t c = in[i];
        if (detail::is_stripped_cp(c)) continue;
        cps.push_back(detail::fold_cp(c));
    }

    // Whitespace collapse with per-word ZWNJ hygiene: runs of ZWNJ collapse
    // to one, edge ZWNJ drops, words re-join with a single space.
    std::string out;
    std::vector<char32_t> word;
    auto flush_word = [&]() {
        std::size_t b = 0, e = word.size();
        while (b < e && word[b] == kZwnj) ++b;
        while (e > b && word[e - 1] == kZwnj) --e;
        if (b == e) {
            word.clear();
            return;
        }
        if (!out.empty()) out += ' ';
        bool prev_zwnj = false;
        for (std::size_t i = b; i < e; ++i) {
            if (word[i] == kZwnj) {
                if (prev_zwnj) continue;
                prev_zwnj = true;
            } else {
                prev_zwnj = false;
            }
            utf8_append(out, word[i]);
        }
        word.clear();
    };
    for (char32_t c : cps) {
        if (detail::is_space_cp(c)) flush_word();
        else word.push_back(c);
    }
    flush_word();
    return out;
}

// ---------------------------------------------------------------------------
// Tokenization

// Whitespace split over normalized text; ZWNJ-joined compounds stay as one
// token. The input must already be normalized (single spaces, no edge ZWNJ).
inline std::vector<std::string> tokenize_hemistich(const std::string& normalized) {
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (start <= normalized.size()) {
        std::size_t sp = normalized.find(' ', start);
        if (sp == std::string::npos) sp = normalized.size();
        if (sp > start) tokens.push_back(normalized.substr(start, sp - start));
        start = sp + 1;
        if (sp == normalized.size()) break;
    }
    return tokens;
}

// Location of one token occurrence inside the corpus.
struct TokenRef {
    std::string poem_id;
    std::size_t verse_index = 0;
    std::size_t hemistich_index = 0;  // 0 or 1
    std::size_t position = 0;         // index within the hemistich
};

struct Token {
    std::string surface;  // normalized surface form
    TokenRef ref;
};

// ---------------------------------------------------------------------------
// Surface relations

enum class RelationKind {
    None,
    CliticRemoval,
    SuffixStrip,
    PrefixStrip,
    NearHeadExtension,
    SyntheticHead,  // assigned by candidate generation, never detected here
};

inline const char* relation_kind_name(RelationKind k) {
    switch (k) {
        case RelationKind::CliticRemoval: return "clitic_removal";
        case RelationKind::SuffixStrip: return "suffix_strip";
        case RelationKind::PrefixStrip: return "prefix_strip";
        case RelationKind::NearHeadExtension: return "near_head_extension";
        case RelationKind::SyntheticHead: return "synthetic_head";
        case RelationKind::None: return "none";
    }
    return "none";
}

struct SurfaceRelation {
    RelationKind kind = RelationKind::None;
    // Exactly the material removed from the longer form, ZWNJ included when
    // one separates stem and affix, so reconstruction is plain concatenation.
    std::string residue;
};

// Clitic, suffix, and prefix inventories. Data files, not code: one entry
// per line, '#' comments allowed, entries normalized on load.
struct AffixTables {
    std::vector<std::string> clitics;
    std::vector<std::string> suffixes;
    std::vector<std::string> prefixes;

    bool is_affix_entry(const std::string& s) const {
        auto has = [&](const std::vector<std::string>& v) {
            return std::find(v.begin(), v.end(), s) != v.end();
        };
        return has(clitics) || has(suffixes) || has(prefixes);
    }
};

inline std::vector<std::string> load_inventory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open inventory file: " + path);
    std::set<std::string> seen;
    std::string line;
    while (std::getline(in, line)) {
        std::string norm = normalize_text(line);
        if (norm.empty() || norm[0] == '#') continue;
        seen.insert(norm);
    }
    // Longest first so the most specific residue wins; lexicographic within
    // a length keeps detection order independent of file order.
    std::vector<std::string> out(seen.begin(), seen.end());
    std::stable_sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
        std::size_t la = cp_length(a), lb = cp_length(b);
        if (la != lb) return la > lb;
        return a < b;
    });
    return out;
}

inline AffixTables load_affix_tables(const std::string& clitics_path,
                                     const std::string& suffixes_path,
                                     const std::string& prefixes_path) {
    return AffixTables{load_inventory(clitics_path), load_inventory(suffixes_path),
                       load_inventory(prefixes_path)};
}

namespace detail {

inline const std::string& zwnj_utf8() {
    static const std::string z = [] {
        std::string s;
        utf8_append(s, kZwnj);
        return s;
    }();
    return z;
}

// True when longer == shorter + entry, optionally with a ZWNJ between.
// On match, residue receives the removed tail (ZWNJ included).
inline bool matches_appended(const std::string& longer, const std::string& shorter,
                             const std::string& entry, std::string* residue) {
    if (longer.size() == shorter.size() + entry.size() &&
        longer.compare(0, shorter.size(), shorter) == 0 &&
        longer.compare(shorter.size(), entry.size(), entry) == 0) {
        *residue = entry;
        return true;
    }
    const std::string& z = zwnj_utf8();
    if (longer.size() == shorter.size() + z.size() + entry.size() &&
        longer.compare(0, shorter.size(), shorter) == 0 &&
        longer.compare(shorter.size(), z.size(), z) == 0 &&
        longer.compare(shorter.size() + z.size(), entry.size(), entry) == 0) {
        *residue = z + entry;
        return true;
    }
    return false;
}

// True when longer == entry + shorter, optionally with a ZWNJ between.
inline bool matches_prepended(const std::string& longer, const std::string& shorter,
                              const std::string& entry, std::string* residue) {
    if (longer.size() == entry.size() + shorter.size() &&
        longer.compare(0, entry.size(), entry) == 0 &&
        longer.compare(entry.size(), shorter.size(), shorter) == 0) {
        *residue = entry;
        return true;
    }
    const std::string& z = zwnj_utf8();
    if (longer.size() == entry.size() + z.size() + shorter.size() &&
        longer.compare(0, entry.size(), entry) == 0 &&
        longer.compare(entry.size(), z.size(), z) == 0 &&
        longer.compare(entry.size() + z.size(), shorter.size(), shorter) == 0) {
        *residue = entry + z;
        return true;
    }
    return false;
}

}  // namespace detail

// First matching relation under the fixed rule order
// CliticRemoval > SuffixStrip > PrefixStrip > NearHeadExtension.
// Symmetric in its arguments: the relation always explains how the longer of
// the two forms extends the shorter one. Identity is not a relation.
inline SurfaceRelation surface_relation(const std::string& a, const std::string& b,
                                        const AffixTables& tables) {
    if (a == b || a.empty() || b.empty()) return {};
    const std::string& longer = a.size() >= b.size() ? a : b;
    const std::string& shorter = a.size() >= b.size() ? b : a;
    if (longer.size() == shorter.size()) return {};

    std::string residue;
    for (const std::string& c : tables.clitics)
        if (detail::matches_appended(longer, shorter, c, &residue))
            return {RelationKind::CliticRemoval, residue};
    for (const std::string& s : tables.suffixes)
        if (detail::matches_appended(longer, shorter, s, &residue))
            return {RelationKind::SuffixStrip, residue};
    for (const std::string& p : tables.prefixes)
        if (detail::matches_prepended(longer, shorter, p, &residue))
            return {RelationKind::PrefixStrip, residue};

    // Near-head extension: a shared stem of >= 3 characters extended by one
    // or two trailing characters that are not themselves inventory material.
    if (cp_length(shorter) >= 3 && longer.size() > shorter.size() &&
        longer.compare(0, shorter.size(), shorter) == 0) {
        std::string ext = longer.substr(shorter.size());
        std::size_t ext_len = cp_length(ext);
        if (ext_len >= 1 && ext_len <= 2 && ext.find(detail::zwnj_utf8()) == std::string::npos &&
            !tables.is_affix_entry(ext)) {
            return {RelationKind::NearHeadExtension, ext};
        }
    }
    return {};
}

// Re-apply a relation's residue to the shorter form. Used by tests to check
// that every detected relation reconstructs the longer form exactly.
inline std::string reconstruct_longer(const std::string& shorter, const SurfaceRelation& rel) {
    switch (rel.kind) {
        case RelationKind::PrefixStrip: return rel.residue + shorter;
        case RelationKind::CliticRemoval:
        case RelationKind::SuffixStrip:
        case RelationKind::NearHeadExtension: return shorter + rel.residue;
        default: return shorter;
    }
}

}  // namespace symatlas
