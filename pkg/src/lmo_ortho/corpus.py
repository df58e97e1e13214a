"""Orthography-tagged corpus: labels, JSONL I/O, stratified splits, class counts."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

DEFAULT_SEED = 42
DEFAULT_RATIOS = (0.8, 0.1, 0.1)


class OrthographyClass(str, Enum):
    MILCLASS = "MILCLASS"
    LOCC = "LOCC"
    LORUNIF = "LORUNIF"
    SL = "SL"
    NOL = "NOL"
    CRES = "CRES"
    BREMOD = "BREMOD"
    BERGDUC = "BERGDUC"
    LSI = "LSI"
    NO_TAG = "NO_TAG"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def taggable(cls) -> list["OrthographyClass"]:
        return [c for c in cls if c is not cls.NO_TAG]

    @classmethod
    def parse(cls, text: str) -> "OrthographyClass":
        # case-sensitive on purpose
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"unknown tag {text}") from None


class CorpusFormatError(ValueError):
    """A corpus file line is not a valid sample record."""


@dataclass(frozen=True)
class Sample:
    text: str
    tag: OrthographyClass

    def __post_init__(self):
        if not isinstance(self.tag, OrthographyClass):
            object.__setattr__(self, "tag", OrthographyClass.parse(self.tag))
        if not self.text.strip():
            raise ValueError("sample text is empty")
        if "\n" in self.text or "\r" in self.text:
            raise ValueError("sample text contains a newline")

    def to_json(self) -> str:
        return json.dumps({"text": self.text, "tag": self.tag.value}, ensure_ascii=False)


def load_jsonl(path) -> list[Sample]:
    """Read a corpus file, one ``{"text": ..., "tag": ...}`` object per line.

    Blank lines are skipped. Errors name the 1-based line number.
    """
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"malformed JSON at line {lineno}: {exc.msg}") from None
            if (
                not isinstance(obj, dict)
                or not isinstance(obj.get("text"), str)
                or not isinstance(obj.get("tag"), str)
            ):
                raise CorpusFormatError(
                    f"malformed record at line {lineno}: expected string fields 'text' and 'tag'"
                )
            try:
                tag = OrthographyClass.parse(obj["tag"])
            except ValueError:
                raise CorpusFormatError(f"unknown tag {obj['tag']} at line {lineno}") from None
            try:
                samples.append(Sample(obj["text"], tag))
            except ValueError as exc:
                raise CorpusFormatError(f"{exc} at line {lineno}") from None
    return samples


def write_jsonl(samples: Iterable[Sample], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in samples:
            fh.write(s.to_json())
            fh.write("\n")


@dataclass(frozen=True)
class SplitSet:
    train: list[Sample]
    valid: list[Sample]
    test: list[Sample]
    seed: int
    ratios: tuple[float, float, float]
    # positions of each split's samples in the input list
    indices: tuple[np.ndarray, np.ndarray, np.ndarray] = field(repr=False, compare=False, default=None)

    def sizes(self) -> tuple[int, int, int]:
        return len(self.train), len(self.valid), len(self.test)


def _exact_ratios(ratios: Sequence[float]) -> list[Fraction]:
    if len(ratios) != 3:
        raise ValueError("exactly three split ratios are required")
    if any(not math.isfinite(r) or r < 0 for r in ratios):
        raise ValueError(f"invalid split ratios {tuple(ratios)}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {sum(ratios)!r}")
    return [Fraction(r).limit_denominator(10**9) for r in ratios]


def _apportion(class_sizes: list[int], ratios: list[Fraction]) -> list[list[int]]:
    """Per-class split sizes.

    Every cell is the floor or floor+1 of its exact quota, so each class stays
    within one sample of its ratio. Among those roundings we pick the one whose
    valid/test totals come closest to ``floor(ratio * N)`` (train absorbs the
    rest), then the one with the largest summed remainders, then the one whose
    extra valid/test samples come from the smallest classes (test first), so
    rare classes still reach evaluation.
    """
    quotas = [[r * n for r in ratios] for n in class_sizes]
    floors = [[math.floor(q) for q in row] for row in quotas]
    fracs = [[q - f for q, f in zip(qrow, frow)] for qrow, frow in zip(quotas, floors)]
    deficits = [n - sum(frow) for n, frow in zip(class_sizes, floors)]

    total = sum(class_sizes)
    target_v = math.floor(ratios[1] * total) - sum(f[1] for f in floors)
    target_t = math.floor(ratios[2] * total) - sum(f[2] for f in floors)

    # choices per class: which splits receive +1 (train index 0 first)
    options = {
        0: [()],
        1: [(0,), (1,), (2,)],
        2: [(0, 1), (0, 2), (1, 2)],
        3: [(0, 1, 2)],
    }
    # state (extra valid, extra test) -> (score, picks per class)
    states: dict[tuple[int, int], tuple[tuple, list]] = {(0, 0): ((Fraction(0), 0, 0, 0), [])}
    for n, frow, d in zip(class_sizes, fracs, deficits):
        nxt: dict[tuple[int, int], tuple[tuple, list]] = {}
        for (ev, et), (score, picks) in states.items():
            for opt in options[d]:
                key = (ev + (1 in opt), et + (2 in opt))
                gain = sum((frow[j] for j in opt), Fraction(0))
                eval_extra = (1 in opt) + (2 in opt)
                new = (
                    score[0] + gain,
                    score[1] - n * eval_extra,
                    score[2] - n * (2 in opt),
                    score[3] + (0 in opt),
                )
                if key not in nxt or new > nxt[key][0]:
                    nxt[key] = (new, picks + [opt])
        states = nxt

    def rank(item):
        (ev, et), (score, _) = item
        return (abs(ev - target_v) + abs(et - target_t), -score[0], -score[1], -score[2], -score[3], ev, et)

    _, (_, picks) = min(states.items(), key=rank)
    sizes = []
    for frow, opt in zip(floors, picks):
        row = list(frow)
        for j in opt:
            row[j] += 1
        sizes.append(row)
    return sizes


def stratified_split(
    samples: Sequence[Sample],
    ratios: Sequence[float] = DEFAULT_RATIOS,
    seed: int = DEFAULT_SEED,
) -> SplitSet:
    """Split per class into train/valid/test.

    Within each class (in label order) the members are shuffled by a PRNG seeded
    from ``seed``; sizes come from :func:`_apportion`. Output lists keep input
    order.
    """
    if not samples:
        raise ValueError("cannot split an empty corpus")
    exact = _exact_ratios(ratios)
    by_class: dict[OrthographyClass, list[int]] = {}
    for i, s in enumerate(samples):
        by_class.setdefault(s.tag, []).append(i)
    classes = sorted(by_class, key=lambda c: c.value)
    sizes = _apportion([len(by_class[c]) for c in classes], exact)

    rng = np.random.default_rng(seed)
    parts: list[list[int]] = [[], [], []]
    for cls, (n_train, n_valid, _) in zip(classes, sizes):
        members = np.asarray(by_class[cls])[rng.permutation(len(by_class[cls]))]
        parts[0].extend(members[:n_train].tolist())
        parts[1].extend(members[n_train : n_train + n_valid].tolist())
        parts[2].extend(members[n_train + n_valid :].tolist())

    idx = tuple(np.sort(np.asarray(p, dtype=np.int64)) for p in parts)
    return SplitSet(
        train=[samples[i] for i in idx[0]],
        valid=[samples[i] for i in idx[1]],
        test=[samples[i] for i in idx[2]],
        seed=seed,
        ratios=tuple(float(r) for r in ratios),
        indices=idx,
    )


@dataclass(frozen=True)
class ClassDistribution:
    counts: dict[OrthographyClass, int]
    total: int

    @property
    def percentages(self) -> dict[OrthographyClass, float]:
        if self.total == 0:
            return {c: 0.0 for c in self.counts}
        return {c: 100.0 * n / self.total for c, n in self.counts.items()}

    def table(self) -> str:
        pct = self.percentages
        lines = [f"{'class':<10} {'count':>8} {'%':>7}"]
        for c, n in self.counts.items():
            lines.append(f"{c.value:<10} {n:>8} {pct[c]:>7.2f}")
        lines.append(f"{'total':<10} {self.total:>8}")
        return "\n".join(lines)


def class_distribution(samples: Iterable[Sample]) -> ClassDistribution:
    counts = Counter(s.tag for s in samples)
    classes = OrthographyClass.taggable()
    if counts.get(OrthographyClass.NO_TAG):
        classes.append(OrthographyClass.NO_TAG)
    return ClassDistribution({c: counts.get(c, 0) for c in classes}, sum(counts.values()))
