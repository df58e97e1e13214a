"""Artificial orthographies for testing the pipeline without the real corpus.

A shared lexicon of pseudo-words is written with three abstract graphemes
(a rounded front vowel, a palatal affricate, a front rounded u). Each
orthography spells those graphemes differently, so the same base sentence
appears once per orthography and only spelling separates the classes.
"""

from __future__ import annotations

import numpy as np

from .corpus import Sample

# abstract grapheme -> spelling per orthography
RULES = {
    "MILCLASS": {"Ø": "oeu", "Ç": "ch", "Ü": "u"},
    "LOCC": {"Ø": "ö", "Ç": "c", "Ü": "ü"},
    "NOL": {"Ø": "o", "Ç": "cc", "Ü": "u"},
}

_ONSETS = ["b", "d", "f", "g", "l", "m", "n", "p", "r", "s", "t", "v", "z", "Ç", "Ç", "st", "tr"]
_VOWELS = ["a", "e", "i", "o", "Ø", "Ø", "Ü", "Ü"]
_CODAS = ["", "", "", "n", "l", "r", "s", "t", "Ç"]


def _lexicon(rng: np.random.Generator, size: int) -> list[str]:
    words: set[str] = set()
    out = []
    while len(out) < size:
        n_syll = int(rng.integers(1, 4))
        w = "".join(
            _ONSETS[rng.integers(len(_ONSETS))] + _VOWELS[rng.integers(len(_VOWELS))]
            for _ in range(n_syll)
        ) + _CODAS[rng.integers(len(_CODAS))]
        if w not in words:
            words.add(w)
            out.append(w)
    return out


def base_sentences(n: int, seed: int = 0, lexicon_size: int = 400) -> list[str]:
    """Sentences in abstract graphemes, each with at least two marked graphemes."""
    rng = np.random.default_rng(seed)
    lex = _lexicon(rng, lexicon_size)
    sentences = []
    while len(sentences) < n:
        words = [lex[i] for i in rng.integers(0, len(lex), int(rng.integers(6, 13)))]
        s = " ".join(words)
        if sum(s.count(g) for g in "ØÇÜ") >= 2:
            sentences.append(s[0].upper() + s[1:] + ".")
    return sentences


def spell(sentence: str, orthography: str) -> str:
    for grapheme, spelling in RULES[orthography].items():
        sentence = sentence.replace(grapheme, spelling)
    return sentence


def synthetic_corpus(lines_per_class: int = 300, seed: int = 0) -> list[Sample]:
    """``lines_per_class`` base sentences spelled in each orthography, class-interleaved."""
    base = base_sentences(lines_per_class, seed)
    return [Sample(spell(s, orth), orth) for s in base for orth in RULES]
