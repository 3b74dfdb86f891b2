#pragma once
// Corpus ingest: parse the poem corpus and poet metadata into an indexed
// store with century-bin attribution.
//
// Input is line-delimited JSON, one poem per line, because the corpus is
// large and must stream. Malformed lines become per-line diagnostics rather
// than silent drops; duplicate poem ids are fatal.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "symatlas/errors.hpp"
#include "symatlas/text.hpp"

namespace symatlas {

using ordered_json = nlohmann::ordered_json;

struct Verse {
    std::string hemistichs[2];
    // A verse with an empty hemistich after normalization is kept and
    // counted but excluded from token statistics.
    bool degenerate = false;
};

struct Poem {
    std::string poem_id;
    std::string poet_id;
    std::vector<Verse> verses;
    int hijri_century = -1;  // resolved by load_poet_centuries
    int bin_id = -1;         // resolved by bin_centuries
};

struct PoetRecord {
    std::string poet_id;
    std::string name;
    int hijri_century = 0;
};

struct CenturyBin {
    int bin_id = 0;
    std::string label;
    std::set<int> member_centuries;
};

struct CorpusStats {
    std::size_t n_poems = 0;
    std::size_t n_verses = 0;
    std::size_t n_hemistichs = 0;  // 2 x (n_verses - degenerate)
    std::size_t n_degenerate_verses = 0;
    std::size_t n_poets = 0;  // distinct poets observed in the corpus
    std::size_t n_bins = 0;
    std::map<int, std::size_t> verses_per_bin;
};

struct ParseDiagnostic {
    std::size_t line_number = 0;
    std::string message;
};

struct CorpusStore {
    std::vector<Poem> poems;  // input order
    std::map<std::string, std::size_t> poem_index;
    std::map<std::string, PoetRecord> poets;
    std::vector<CenturyBin> bins;
    std::vector<ParseDiagnostic> diagnostics;

    bool centuries_resolved() const {
        for (const Poem& p : poems)
            if (p.hijri_century < 0) return false;
        return true;
    }
};

namespace detail {

inline bool verse_is_degenerate(const Verse& v) {
    return normalize_text(v.hemistichs[0]).empty() || normalize_text(v.hemistichs[1]).empty();
}

}  // namespace detail

// Parse the line-delimited corpus. Each line holds one JSON object:
// {"poem_id": str, "poet_id": str, "verses": [[hemistich, hemistich], ...]}.
inline CorpusStore parse_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open corpus file: " + path);

    CorpusStore store;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;

        ordered_json rec = ordered_json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            store.diagnostics.push_back({line_no, "not a JSON object"});
            continue;
        }
        if (!rec.contains("poem_id") || !rec["poem_id"].is_string() ||
            !rec.contains("poet_id") || !rec["poet_id"].is_string() ||
            !rec.contains("verses") || !rec["verses"].is_array()) {
            store.diagnostics.push_back(
                {line_no, "record must carry string poem_id, string poet_id, array verses"});
            continue;
        }

        Poem poem;
        poem.poem_id = rec["poem_id"].get<std::string>();
        poem.poet_id = rec["poet_id"].get<std::string>();
        if (poem.poem_id.empty() || poem.poet_id.empty()) {
            store.diagnostics.push_back({line_no, "empty poem_id or poet_id"});
            continue;
        }

        bool bad_verse = false;
        for (const auto& v : rec["verses"]) {
            if (!v.is_array() || v.size() != 2 || !v[0].is_string() || !v[1].is_string()) {
                bad_verse = true;
                break;
            }
            Verse verse;
            verse.hemistichs[0] = v[0].get<std::string>();
            verse.hemistichs[1] = v[1].get<std::string>();
            verse.degenerate = detail::verse_is_degenerate(verse);
            poem.verses.push_back(std::move(verse));
        }
        if (bad_verse) {
            store.diagnostics.push_back(
                {line_no, "every verse must be a pair of hemistich strings"});
            continue;
        }

        if (store.poem_index.count(poem.poem_id)) {
            throw ValidationError("duplicate poem_id '" + poem.poem_id + "' at line " +
                                  std::to_string(line_no));
        }
        store.poem_index[poem.poem_id] = store.poems.size();
        store.poems.push_back(std::move(poem));
    }
    return store;
}

// Load the poet-to-century table (TSV: poet_id, name, hijri_century) and
// resolve a century for every poem. Poets the corpus never mentions are
// kept; corpus poets missing from the table are fatal, listed by id.
inline void load_poet_centuries(const std::string& path, CorpusStore& store) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open poet table: " + path);

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        std::istringstream row(line);
        PoetRecord rec;
        std::string century_field;
        if (!std::getline(row, rec.poet_id, '\t') || !std::getline(row, rec.name, '\t') ||
            !std::getline(row, century_field, '\t')) {
            throw ValidationError("poet table line " + std::to_string(line_no) +
                                  ": expected poet_id, name, hijri_century");
        }
        try {
            rec.hijri_century = std::stoi(century_field);
        } catch (const std::exception&) {
            throw ValidationError("poet table line " + std::to_string(line_no) +
                                  ": hijri_century is not an integer");
        }
        if (rec.hijri_century < 3) {
            throw ValidationError("poet table line " + std::to_string(line_no) +
                                  ": hijri_century must be >= 3");
        }
        store.poets[rec.poet_id] = rec;
    }

    std::set<std::string> unmapped;
    for (Poem& poem : store.poems) {
        auto it = store.poets.find(poem.poet_id);
        if (it == store.poets.end()) {
            unmapped.insert(poem.poet_id);
            continue;
        }
        poem.hijri_century = it->second.hijri_century;
    }
    if (!unmapped.empty()) {
        std::string msg = "poet table does not map:";
        for (const std::string& id : unmapped) msg += " " + id;
        throw ValidationError(msg);
    }
}

// Group observed centuries into ordered bins. Centuries 3 and 4 share the
// earliest bin; every other century stands alone. Idempotent.
inline void bin_centuries(CorpusStore& store) {
    std::set<int> observed;
    for (const Poem& p : store.poems) {
        if (p.hijri_century < 0)
            throw ValidationError("bin_centuries requires resolved centuries");
        observed.insert(p.hijri_century);
    }

    store.bins.clear();
    std::map<int, int> century_to_bin;
    if (observed.count(3) || observed.count(4)) {
        CenturyBin bin;
        bin.bin_id = 0;
        bin.label = "3–4";
        bin.member_centuries = {3, 4};
        century_to_bin[3] = 0;
        century_to_bin[4] = 0;
        store.bins.push_back(std::move(bin));
    }
    for (int c : observed) {
        if (c == 3 || c == 4) continue;
        CenturyBin bin;
        bin.bin_id = static_cast<int>(store.bins.size());
        bin.label = std::to_string(c);
        bin.member_centuries = {c};
        century_to_bin[c] = bin.bin_id;
        store.bins.push_back(std::move(bin));
    }
    for (Poem& p : store.poems) p.bin_id = century_to_bin.at(p.hijri_century);
}

inline CorpusStats corpus_stats(const CorpusStore& store) {
    CorpusStats stats;
    stats.n_poems = store.poems.size();
    std::set<std::string> poet_ids;
    for (const Poem& p : store.poems) {
        poet_ids.insert(p.poet_id);
        stats.n_verses += p.verses.size();
        for (const Verse& v : p.verses)
            if (v.degenerate) ++stats.n_degenerate_verses;
        if (p.bin_id >= 0) stats.verses_per_bin[p.bin_id] += p.verses.size();
    }
    stats.n_hemistichs = 2 * (stats.n_verses - stats.n_degenerate_verses);
    stats.n_poets = poet_ids.size();
    stats.n_bins = store.bins.size();
    return stats;
}

// ---------------------------------------------------------------------------
// Store serialization (the `ingest --out` artifact). Raw text is preserved
// verbatim so parse -> save -> load round-trips to an identical store.

inline ordered_json store_to_json(const CorpusStore& store) {
    ordered_json j;
    j["poems"] = ordered_json::array();
    for (const Poem& p : store.poems) {
        ordered_json jp;
        jp["poem_id"] = p.poem_id;
        jp["poet_id"] = p.poet_id;
        jp["hijri_century"] = p.hijri_century;
        jp["bin_id"] = p.bin_id;
        ordered_json verses = ordered_json::array();
        for (const Verse& v : p.verses)
            verses.push_back(ordered_json::array({v.hemistichs[0], v.hemistichs[1]}));
        jp["verses"] = std::move(verses);
        j["poems"].push_back(std::move(jp));
    }
    j["poets"] = ordered_json::array();
    for (const auto& [id, rec] : store.poets) {
        j["poets"].push_back(
            ordered_json{{"poet_id", id}, {"name", rec.name}, {"hijri_century", rec.hijri_century}});
    }
    j["bins"] = ordered_json::array();
    for (const CenturyBin& b : store.bins) {
        ordered_json jb;
        jb["bin_id"] = b.bin_id;
        jb["label"] = b.label;
        jb["member_centuries"] = b.member_centuries;
        j["bins"].push_back(std::move(jb));
    }
    j["diagnostics"] = ordered_json::array();
    for (const ParseDiagnostic& d : store.diagnostics)
        j["diagnostics"].push_back(ordered_json{{"line", d.line_number}, {"message", d.message}});
    return j;
}

inline void save_store(const CorpusStore& store, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write store: " + path);
    out << store_to_json(store).dump(1) << '\n';
}

inline CorpusStore load_store(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open store: " + path);
    ordered_json j = ordered_json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ValidationError("store is not valid JSON: " + path);

    CorpusStore store;
    for (const auto& jp : j.at("poems")) {
        Poem p;
        p.poem_id = jp.at("poem_id").get<std::string>();
        p.poet_id = jp.at("poet_id").get<std::string>();
        p.hijri_century = jp.at("hijri_century").get<int>();
        p.bin_id = jp.at("bin_id").get<int>();
        for (const auto& jv : jp.at("verses")) {
            Verse v;
            v.hemistichs[0] = jv.at(0).get<std::string>();
            v.hemistichs[1] = jv.at(1).get<std::string>();
            v.degenerate = detail::verse_is_degenerate(v);
            p.verses.push_back(std::move(v));
        }
        if (store.poem_index.count(p.poem_id))
            throw ValidationError("duplicate poem_id in store: " + p.poem_id);
        store.poem_index[p.poem_id] = store.poems.size();
        store.poems.push_back(std::move(p));
    }
    for (const auto& jr : j.at("poets")) {
        PoetRecord rec;
        rec.poet_id = jr.at("poet_id").get<std::string>();
        rec.name = jr.at("name").get<std::string>();
        rec.hijri_century = jr.at("hijri_century").get<int>();
        store.poets[rec.poet_id] = rec;
    }
    for (const auto& jb : j.at("bins")) {
        CenturyBin b;
        b.bin_id = jb.at("bin_id").get<int>();
        b.label = jb.at("label").get<std::string>();
        for (int c : jb.at("member_centuries")) b.member_centuries.insert(c);
        store.bins.push_back(std::move(b));
    }
    for (const auto& jd : j.at("diagnostics"))
        store.diagnostics.push_back(
            {jd.at("line").get<std::size_t>(), jd.at("message").get<std::string>()});
    return store;
}

}  // namespace symatlas
