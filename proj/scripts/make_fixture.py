#!/usr/bin/env python3
"""Generate the committed test fixture under data/fixture/.

A small synthetic Persian corpus with fully known structure:
  - 12 poets over 4 century bins (3-4, 6, 9, 12), three per bin
  - ~200 poems, 8-12 verses each, one degenerate verse
  - 18 seed lemmas that must survive induction as family heads
  - affix variants (clitic, suffix, prefix), one near-head extension pair
    and one synthetic-head pair whose base form never occurs
  - a rising wine family, declining courtly words, stable background words
  - poet strata for pool selection (one near-miss) and clustering

Deterministic: fixed RNG seed, insertion-ordered dicts, LF newlines.
Rerunning the script reproduces the committed bytes.
"""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "data" / "fixture"
LEX = ROOT / "lexicons"

rng = random.Random(20260818)

# ---------------------------------------------------------------------------
# Vocabulary

ZWNJ = "‌"

# 18 seed lemmas by field
SEEDS = {
    "wine_tavern": ["باده", "جام", "ساقی", "خرابات", "پیمانه", "می"],
    "floral_vegetal": ["گل", "سرو"],
    "body_beloved": ["زلف", "لب", "چشم"],
    "light_fire": ["شمع", "آتش", "نور"],
    "water_sea": ["دریا", "موج"],
    "ascetic_mystical": ["زاهد", "صوفی"],
}
ALL_SEEDS = [s for field in SEEDS.values() for s in field]
assert len(ALL_SEEDS) == 18

# non-seed companions per field (same themes, eligible for their own families)
COMPANIONS = {
    "wine_tavern": ["مست", "ساغر"],
    "floral_vegetal": ["لاله", "چمن", "سبز"],
    "body_beloved": ["رخ", "خال"],
    "light_fire": ["چراغ", "شعله"],
    "water_sea": ["قطره", "باران"],
    "ascetic_mystical": ["توبه", "خانقاه"],
}

# affix variants occasionally substituted for their base form
VARIANTS = {
    "باده": ["باده" + ZWNJ + "ام"],
    "جام": ["جامش"],
    "ساقی": ["ساقیان"],
    "پیمانه": ["پیمانه" + ZWNJ + "اش"],
    "گل": ["گلها"],
    "سرو": ["سروها"],
    "زلف": ["زلفش"],
    "لب": ["لبم"],
    "چشم": ["چشمان"],
    "شمع": ["شمعها"],
    "آتش": ["آتشش"],
    "دریا": ["دریاها"],
    "موج": ["موجها"],
    "زاهد": ["زاهدان"],
    "صوفی": ["صوفیان"],
    "مست": ["مستی"],
}
VARIANT_PROB = 0.15

# near-head extension: the rarer سبزه rides on سبز
NHE_BASE, NHE_EXT = "سبز", "سبزه"
# synthetic family: both plurals occur, the bare stem never does
SYNTH_FORMS = ["چنارها", "چناران"]

STABLE = ["شب", "روز"]       # one per poem each: exactly flat rates
STABLE_HALF = "خاک"           # every other poem
FUNCTION = ["و", "از", "به", "که", "در", "بر"]
COURTLY = ["سلطان", "شاه", "امیر", "وزیر"]
SACRED = ["فرشته", "پیامبر", "بهشت"]
PROPER = ["حافظ", "سعدی", "شیراز"]

FIELDS = list(SEEDS.keys())

# ---------------------------------------------------------------------------
# Poets: three per bin; strata drive the cluster structure

POETS = [
    # (id, name, century, stratum, poems)
    ("p01", "Poet 01", 3, "lyric", 17),
    ("p02", "Poet 02", 4, "balanced", 17),
    ("p03", "Poet 03", 4, "sparse", 17),
    ("p04", "Poet 04", 6, "lyric", 17),
    ("p05", "Poet 05", 6, "balanced", 17),
    ("p06", "Poet 06", 6, "sparse", 17),
    ("p07", "Poet 07", 9, "lyric", 17),
    ("p08", "Poet 08", 9, "balanced", 17),
    ("p09", "Poet 09", 9, "sparse", 7),   # near-miss: volume below the pool floor
    ("p10", "Poet 10", 12, "lyric", 17),
    ("p11", "Poet 11", 12, "balanced", 17),
    ("p12", "Poet 12", 12, "sparse", 17),
]

BIN_OF_CENTURY = {3: 0, 4: 0, 6: 1, 9: 2, 12: 3}

# theme weights per stratum: lyric poets lean on wine/body/floral,
# sparse poets on ascetic/water with little else
THEMES = {
    "lyric": {"wine_tavern": 10, "body_beloved": 4, "floral_vegetal": 2, "light_fire": 1},
    "balanced": {f: 3 for f in FIELDS},
    "sparse": {"ascetic_mystical": 8, "water_sea": 6, "floral_vegetal": 1, "light_fire": 1},
}

# per-bin extras: rising wine vessel, declining courtly, rising sacred
PEYMANEH_RATE = [0.25, 1.0, 2.0, 3.5]   # expected occurrences per poem
COURT_HEMI_RATE = [1.6, 1.0, 0.5, 0.08] # court-scene hemistichs per poem
SACRED_HEMI_RATE = [0.05, 0.2, 0.65, 1.8]

# core companions that ride along inside referential scenes (bridge contexts);
# the first entry is the dedicated anchor and dominates the draw
COURT_BRIDGE = ["ساغر", "جام", "می"]
SACRED_BRIDGE = ["خانقاه", "زاهد", "می"]
BRIDGE_WEIGHTS = [3, 1, 1]


def emit(form):
    variants = VARIANTS.get(form, [])
    if variants and rng.random() < VARIANT_PROB:
        return rng.choice(variants)
    return form


def field_token(field):
    pool = SEEDS[field] + COMPANIONS[field]
    weights = [3] * len(SEEDS[field]) + [1] * len(COMPANIONS[field])
    form = rng.choices(pool, weights)[0]
    if form == "پیمانه":  # the vessel is injected per bin, never sampled
        form = "باده"
    if form == "سبز" and rng.random() < 0.3:
        return NHE_EXT
    return emit(form)


def count_for(expected):
    # deterministic integer draw with the right mean
    base = int(expected)
    return base + (1 if rng.random() < expected - base else 0)


def scene_hemistich(marked_pool, bridge_pool):
    # referential words kept together, usually escorted by a core bridge word
    tokens = rng.sample(marked_pool, 2)
    if rng.random() < 0.25:
        tokens.append(rng.choice([m for m in marked_pool if m not in tokens]))
    if rng.random() < 0.8:
        tokens.append(rng.choices(bridge_pool, BRIDGE_WEIGHTS)[0])
    if rng.random() < 0.3:
        tokens.append(rng.choice(PROPER))
    if rng.random() < 0.3:
        tokens.append(rng.choice(FUNCTION))
    rng.shuffle(tokens)
    return " ".join(tokens)


def build_poem(poet_id, century, stratum, idx):
    bin_id = BIN_OF_CENTURY[century]
    themes = THEMES[stratum]
    theme = rng.choices(list(themes.keys()), list(themes.values()))[0]

    n_verses = rng.randint(8, 12)

    scenes = []
    for _ in range(count_for(COURT_HEMI_RATE[bin_id])):
        scenes.append(scene_hemistich(COURTLY, COURT_BRIDGE))
    for _ in range(count_for(SACRED_HEMI_RATE[bin_id])):
        scenes.append(scene_hemistich(SACRED, SACRED_BRIDGE))
    scene_at = {}
    if scenes:
        slots = list(range(2 * n_verses))
        rng.shuffle(slots)
        for i, text in enumerate(scenes):
            if i < len(slots):
                scene_at[slots[i]] = text

    # pending insertions spread across the poem's regular hemistichs
    inserts = ["پیمانه"] * count_for(PEYMANEH_RATE[bin_id])
    inserts += STABLE[:]  # exactly one شب and one روز per poem
    if idx % 2 == 0:
        inserts.append(STABLE_HALF)
    if rng.random() < 0.06:
        inserts.append(rng.choice(PROPER))
    if stratum != "sparse" and rng.random() < 0.35:
        inserts.append(rng.choice(SYNTH_FORMS))
    rng.shuffle(inserts)

    regular = [s for s in range(2 * n_verses) if s not in scene_at]
    rng.shuffle(regular)
    insert_at = {}
    for i, form in enumerate(inserts):
        insert_at.setdefault(regular[i % len(regular)], []).append(form)

    verses = []
    for v in range(n_verses):
        pair = []
        for h in range(2):
            slot = 2 * v + h
            if slot in scene_at:
                pair.append(scene_at[slot])
                continue
            tokens = [field_token(theme) for _ in range(rng.randint(2, 3))]
            if rng.random() < 0.4:
                tokens.append(rng.choice(FUNCTION))
            tokens.extend(insert_at.get(slot, []))
            rng.shuffle(tokens)
            pair.append(" ".join(tokens))
        verses.append(pair)
    return {"poem_id": f"{poet_id}_{idx:02d}", "poet_id": poet_id, "verses": verses}


def main():
    LEX.mkdir(parents=True, exist_ok=True)

    poems = []
    for poet_id, _name, century, stratum, n_poems in POETS:
        for idx in range(n_poems):
            poems.append(build_poem(poet_id, century, stratum, idx))
    # one degenerate verse in the very first poem
    poems[0]["verses"].append(["باده جام", "   "])

    with open(ROOT / "corpus.jsonl", "w", encoding="utf-8", newline="\n") as f:
        for poem in poems:
            f.write(json.dumps(poem, ensure_ascii=False) + "\n")

    with open(ROOT / "poets.tsv", "w", encoding="utf-8", newline="\n") as f:
        for poet_id, name, century, _stratum, _n in POETS:
            f.write(f"{poet_id}\t{name}\t{century}\n")

    def lexicon(name, forms):
        with open(LEX / name, "w", encoding="utf-8", newline="\n") as f:
            for form in forms:
                f.write(form + "\n")

    lexicon("seeds.txt", ALL_SEEDS)
    lexicon("clitics.txt", ["ام", "اش", "م", "ش", "مان"])
    lexicon("suffixes.txt", ["ها", "ان", "ی"])
    lexicon("prefixes.txt", ["بی", "هم"])
    lexicon("exemplars.txt", ["باده", "گل", "زلف", "شمع", "دریا", "زاهد"])
    lexicon("function_words.txt", FUNCTION)
    lexicon("proper_names.txt", PROPER)
    lexicon("referential.txt", COURTLY + SACRED)
    lexicon("wine_tavern.txt", SEEDS["wine_tavern"] + COMPANIONS["wine_tavern"])
    lexicon("floral_vegetal.txt", SEEDS["floral_vegetal"] + COMPANIONS["floral_vegetal"])
    lexicon("body_beloved.txt", SEEDS["body_beloved"] + COMPANIONS["body_beloved"])
    lexicon("light_fire.txt", SEEDS["light_fire"] + COMPANIONS["light_fire"])
    lexicon("water_sea.txt", SEEDS["water_sea"] + COMPANIONS["water_sea"])
    lexicon("ascetic_mystical.txt", SEEDS["ascetic_mystical"] + COMPANIONS["ascetic_mystical"])
    lexicon("courtly_bridge.txt", COURTLY)
    lexicon("sacred_prophetic.txt", SACRED)

    config = {
        "paths": {
            "corpus": "data/fixture/corpus.jsonl",
            "poets": "data/fixture/poets.tsv",
            "lexicon_dir": "data/fixture/lexicons",
            "seeds": "data/fixture/lexicons/seeds.txt",
        },
        "poets": {
            "core_pool": {"min_verses": 120, "min_symbolic_occurrences": 80},
            "sensitivity_pool": {"min_verses": 90, "min_symbolic_occurrences": 50},
        },
        "seed": 1,
    }
    with open(ROOT / "config.json", "w", encoding="utf-8", newline="\n") as f:
        json.dump(config, f, ensure_ascii=False, indent=2)
        f.write("\n")

    n_verses = sum(len(p["verses"]) for p in poems)
    print(f"poems={len(poems)} verses={n_verses} poets={len(POETS)}")


if __name__ == "__main__":
    main()
