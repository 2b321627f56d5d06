#!/usr/bin/env python3
"""Regenerates src/unicode_data.inc and tests/data/nfc_cases.jsonl.

The .inc file carries four tables derived from the Python unicodedata
module (which embeds the Unicode Character Database):

  kLowerTable  - full lowercase mappings (all cased code points)
  kCccTable    - nonzero canonical combining classes
  kDecompTable - fully expanded canonical decompositions (Hangul excluded,
                 handled algorithmically in C++)
  kCompTable   - primary composite pairs for canonical composition

Primary composites are detected by round-tripping each candidate pair
through unicodedata.normalize("NFC", ...), which bakes in the composition
exclusions without needing CompositionExclusions.txt.

Run from the repository root:  python3 tools/gen_unicode_tables.py
"""

import json
import random
import sys
import unicodedata

MAX_CP = 0x110000
HANGUL_S_BASE, HANGUL_S_COUNT = 0xAC00, 11172


def is_surrogate(cp: int) -> bool:
    return 0xD800 <= cp <= 0xDFFF


def canonical_decomposition(cp: int):
    """Single-level canonical decomposition, or None."""
    raw = unicodedata.decomposition(chr(cp))
    if not raw or raw.startswith("<"):
        return None
    return [int(tok, 16) for tok in raw.split()]


def full_decomposition(cp: int, memo: dict):
    if cp in memo:
        return memo[cp]
    parts = canonical_decomposition(cp)
    if parts is None:
        memo[cp] = [cp]
        return memo[cp]
    out = []
    for p in parts:
        out.extend(full_decomposition(p, memo))
    memo[cp] = out
    return out


def build_tables():
    lower = []
    for cp in range(MAX_CP):
        if is_surrogate(cp):
            continue
        ch = chr(cp)
        lo = ch.lower()
        if lo != ch:
            mapped = [ord(c) for c in lo]
            assert 1 <= len(mapped) <= 2, hex(cp)
            lower.append((cp, mapped))

    ccc = []
    for cp in range(MAX_CP):
        if is_surrogate(cp):
            continue
        klass = unicodedata.combining(chr(cp))
        if klass != 0:
            ccc.append((cp, klass))

    memo: dict = {}
    decomp = []
    for cp in range(MAX_CP):
        if is_surrogate(cp):
            continue
        if HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT:
            continue
        full = full_decomposition(cp, memo)
        if full != [cp]:
            assert 1 <= len(full) <= 8, hex(cp)
            decomp.append((cp, full))

    comp = []
    for cp in range(MAX_CP):
        if is_surrogate(cp):
            continue
        if HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT:
            continue
        parts = canonical_decomposition(cp)
        if parts is None or len(parts) != 2:
            continue
        a, b = parts
        if unicodedata.normalize("NFC", chr(a) + chr(b)) == chr(cp):
            comp.append((a, b, cp))
    comp.sort()

    return lower, ccc, decomp, comp


def emit_inc(path, lower, ccc, decomp, comp):
    data_pool = []
    decomp_entries = []
    for cp, full in decomp:
        decomp_entries.append((cp, len(data_pool), len(full)))
        data_pool.extend(full)

    with open(path, "w") as f:
        w = f.write
        w("// Generated by tools/gen_unicode_tables.py -- do not edit by hand.\n")
        w(f"// Unicode version: {unicodedata.unidata_version}\n\n")

        w("struct CaseMapEntry { char32_t cp; char32_t lo[2]; };\n")
        w(f"inline constexpr CaseMapEntry kLowerTable[{len(lower)}] = {{\n")
        for cp, mapped in lower:
            second = mapped[1] if len(mapped) == 2 else 0
            w(f"  {{{cp:#x}, {{{mapped[0]:#x}, {second:#x}}}}},\n")
        w("};\n\n")

        w("struct CccEntry { char32_t cp; unsigned char ccc; };\n")
        w(f"inline constexpr CccEntry kCccTable[{len(ccc)}] = {{\n")
        for cp, klass in ccc:
            w(f"  {{{cp:#x}, {klass}}},\n")
        w("};\n\n")

        w(f"inline constexpr char32_t kDecompData[{len(data_pool)}] = {{\n")
        for i in range(0, len(data_pool), 12):
            chunk = ", ".join(f"{v:#x}" for v in data_pool[i : i + 12])
            w(f"  {chunk},\n")
        w("};\n\n")

        w("struct DecompEntry { char32_t cp; unsigned int offset; unsigned char len; };\n")
        w(f"inline constexpr DecompEntry kDecompTable[{len(decomp_entries)}] = {{\n")
        for cp, off, length in decomp_entries:
            w(f"  {{{cp:#x}, {off}, {length}}},\n")
        w("};\n\n")

        w("struct CompEntry { char32_t first; char32_t second; char32_t composed; };\n")
        w(f"inline constexpr CompEntry kCompTable[{len(comp)}] = {{\n")
        for a, b, c in comp:
            w(f"  {{{a:#x}, {b:#x}, {c:#x}}},\n")
        w("};\n")


def emit_nfc_cases(path):
    rng = random.Random(20240811)
    cases = []

    fixed = [
        "",
        "abc",
        "é",              # e + combining acute -> precomposed
        "é",               # already NFC
        "Å",               # angstrom sign -> A with ring (singleton)
        "Ω",               # ohm sign -> omega (singleton)
        "q̣̇",        # reorder: dot-below sorts before dot-above
        "q̣̇",
        "가",         # Hangul L+V -> syllable
        "각",   # Hangul L+V+T
        "각",         # LV syllable + T
        "ṩ",        # s + dot below + dot above -> U+1E69
        "ṩ",
        "Å",         # A + ring -> Å
        "Å",
        "̈́",               # combining greek dialytika tonos (excluded composite)
        "ą́",        # ogonek (ccc 202) + acute (ccc 230)... wait ogonek is ccc 202? it's 202 no; keep anyway
        "ཱི",         # Tibetan vowel signs with odd ccc
        "ḍ̇",         # d-with-dot-above + dot-below
        "Ḕ",         # E-macron + grave -> U+1E14
    ]
    cases.extend(fixed)

    marks = [0x0300, 0x0301, 0x0302, 0x0304, 0x0307, 0x0308, 0x030A,
             0x0323, 0x0327, 0x0328, 0x0331, 0x05B4, 0x3099, 0x309A]
    bases = ([ord(c) for c in "aeiouncsyAEIOUNCSgkz"] +
             [0x03B1, 0x03B5, 0x03C9, 0x0415, 0x0418, 0x304B, 0x306F,
              0x00E9, 0x00E5, 0x1E0B, 0x1100, 0x1161, 0x11A8, 0xAC00])
    for _ in range(480):
        n = rng.randint(1, 12)
        cps = []
        for _ in range(n):
            roll = rng.random()
            if roll < 0.45:
                cps.append(rng.choice(bases))
            elif roll < 0.85:
                cps.append(rng.choice(marks))
            else:
                cps.append(rng.randint(0x20, 0x2FFF))
        s = "".join(chr(c) for c in cps if not is_surrogate(c))
        cases.append(s)

    with open(path, "w") as f:
        for s in cases:
            f.write(json.dumps({"in": s, "nfc": unicodedata.normalize("NFC", s)},
                               ensure_ascii=True) + "\n")
    return len(cases)


def main():
    lower, ccc, decomp, comp = build_tables()
    emit_inc("src/unicode_data.inc", lower, ccc, decomp, comp)
    n = emit_nfc_cases("tests/data/nfc_cases.jsonl")
    print(f"lower={len(lower)} ccc={len(ccc)} decomp={len(decomp)} comp={len(comp)} nfc_cases={n}",
          file=sys.stderr)


if __name__ == "__main__":
    main()
