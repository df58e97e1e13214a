"""TF-IDF weighted byte / char / word n-gram features.

idf(t) = ln((1 + N) / (1 + df(t))) + 1, raw term counts, L2-normalised rows.
A :class:`FeatureUnion` concatenates independently normalised member blocks.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

ANALYZERS = ("byte", "char", "word")
DEFAULT_MAX_FEATURES = 10_000


@dataclass(frozen=True)
class NgramConfig:
    analyzer: str
    n_min: int = 1
    n_max: int = 4
    max_features: int = DEFAULT_MAX_FEATURES
    lowercase: bool = True

    def __post_init__(self):
        if self.analyzer not in ANALYZERS:
            raise ValueError(f"unknown analyzer {self.analyzer!r}; expected one of {ANALYZERS}")
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError(f"need 1 <= n_min <= n_max, got {self.n_min}..{self.n_max}")
        if self.max_features < 1:
            raise ValueError("max_features must be >= 1")

    def to_dict(self) -> dict:
        return {
            "analyzer": self.analyzer,
            "n_min": self.n_min,
            "n_max": self.n_max,
            "max_features": self.max_features,
            "lowercase": self.lowercase,
        }


def preset(name: str, **overrides) -> NgramConfig:
    """The 1-4-gram, 10k-feature configuration for an analyzer name."""
    return NgramConfig(name, **overrides)


@dataclass(frozen=True)
class SparseVector:
    dim: int
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.shape != val.shape or idx.ndim != 1:
            raise ValueError("indices and values must be 1-d arrays of equal length")
        if idx.size:
            if idx[0] < 0 or idx[-1] >= self.dim or np.any(np.diff(idx) <= 0):
                raise ValueError("indices must be strictly increasing and within [0, dim)")
            if not np.all(np.isfinite(val)):
                raise ValueError("values must be finite")
            if np.any(val == 0):
                raise ValueError("explicit zeros are not stored")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @classmethod
    def zeros(cls, dim: int) -> "SparseVector":
        return cls(dim, np.empty(0, np.int64), np.empty(0))

    @classmethod
    def from_dense(cls, x) -> "SparseVector":
        x = np.asarray(x, dtype=np.float64).ravel()
        nz = np.flatnonzero(x)
        return cls(x.size, nz, x[nz])

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    def to_csr(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.values, self.indices, np.array([0, self.values.size])), shape=(1, self.dim)
        )

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.values, self.values)))


def tokenize(text: str, config: NgramConfig) -> Counter:
    """Multiset of n-grams for every n in ``[n_min, n_max]``.

    Byte n-grams are ``bytes`` slices of the UTF-8 encoding; char and word
    n-grams are ``str``. Word n-grams join their tokens with one space.
    """
    if config.lowercase:
        text = text.lower()
    if config.analyzer == "byte":
        seq = text.encode("utf-8")
    elif config.analyzer == "char":
        seq = text
    else:
        seq = text.split()
    counts: Counter = Counter()
    size = len(seq)
    for n in range(config.n_min, config.n_max + 1):
        if n > size:
            break
        if config.analyzer == "word":
            counts.update(" ".join(seq[i : i + n]) for i in range(size - n + 1))
        else:
            counts.update(seq[i : i + n] for i in range(size - n + 1))
    return counts


def _key_to_bytes(key) -> bytes:
    return key if isinstance(key, bytes) else key.encode("utf-8")


class Vectorizer:
    """Fitted n-gram vocabulary with idf weights.

    Column order is lexicographic in the n-grams' UTF-8 bytes (code-point
    order for ``str`` keys is the same thing).
    """

    def __init__(self, config: NgramConfig, terms: Sequence, idf):
        self.config = config
        self.terms = list(terms)
        self.vocabulary = {t: i for i, t in enumerate(self.terms)}
        self.idf = np.asarray(idf, dtype=np.float64)
        if len(self.vocabulary) != len(self.terms) or self.idf.shape != (len(self.terms),):
            raise ValueError("vocabulary and idf do not line up")

    @property
    def dim(self) -> int:
        return len(self.terms)

    def __repr__(self):
        return f"Vectorizer({self.config.analyzer} {self.config.n_min}-{self.config.n_max}, dim={self.dim})"

    def transform(self, text: str) -> SparseVector:
        idx, val = self._row(text)
        return SparseVector(self.dim, idx, val)

    def _row(self, text: str) -> tuple[np.ndarray, np.ndarray]:
        vocab = self.vocabulary
        hits = [(vocab[t], c) for t, c in tokenize(text, self.config).items() if t in vocab]
        if not hits:
            return np.empty(0, np.int64), np.empty(0)
        hits.sort()
        idx = np.fromiter((i for i, _ in hits), dtype=np.int64, count=len(hits))
        val = np.fromiter((c for _, c in hits), dtype=np.float64, count=len(hits)) * self.idf[idx]
        return idx, val / np.sqrt(np.dot(val, val))

    def transform_many(self, texts: Iterable[str]) -> sp.csr_matrix:
        indptr = [0]
        indices, data = [], []
        for text in texts:
            idx, val = self._row(text)
            indices.append(idx)
            data.append(val)
            indptr.append(indptr[-1] + idx.size)
        return sp.csr_matrix(
            (
                np.concatenate(data) if data else np.empty(0),
                np.concatenate(indices) if indices else np.empty(0, np.int64),
                np.asarray(indptr, dtype=np.int64),
            ),
            shape=(len(indptr) - 1, self.dim),
        )

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "terms": [_key_to_bytes(t).hex() for t in self.terms],
            "idf": self.idf,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Vectorizer":
        config = NgramConfig(**d["config"])
        raw = [bytes.fromhex(h) for h in d["terms"]]
        terms = raw if config.analyzer == "byte" else [b.decode("utf-8") for b in raw]
        return cls(config, terms, d["idf"])


def fit_vectorizer(corpus: Sequence[str], config: NgramConfig) -> Vectorizer:
    """Count df and total tf, cap the vocabulary, compute smoothed idf.

    When the cap binds, the ``max_features`` n-grams with the highest total term
    frequency are kept, ties going to the lexicographically smaller n-gram.
    """
    if len(corpus) == 0:
        raise ValueError("cannot fit a vectorizer on an empty corpus")
    tf: Counter = Counter()
    df: Counter = Counter()
    for text in corpus:
        counts = tokenize(text, config)
        tf.update(counts)
        df.update(counts.keys())

    terms = list(tf)
    if len(terms) > config.max_features:
        terms.sort(key=lambda t: (-tf[t], _key_to_bytes(t)))
        terms = terms[: config.max_features]
    terms.sort(key=_key_to_bytes)

    n_docs = len(corpus)
    idf = np.array([math.log((1 + n_docs) / (1 + df[t])) + 1.0 for t in terms])
    return Vectorizer(config, terms, idf)


@dataclass
class FeatureUnion:
    members: list[Vectorizer]
    offsets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.members:
            raise ValueError("a feature union needs at least one member")
        self.offsets = np.concatenate([[0], np.cumsum([m.dim for m in self.members])]).astype(np.int64)

    @property
    def dim(self) -> int:
        return int(self.offsets[-1])

    def block(self, i: int) -> slice:
        return slice(int(self.offsets[i]), int(self.offsets[i + 1]))

    def transform(self, text: str) -> SparseVector:
        idx, val = [], []
        for off, m in zip(self.offsets, self.members):
            i, v = m._row(text)
            idx.append(i + off)
            val.append(v)
        return SparseVector(self.dim, np.concatenate(idx), np.concatenate(val))

    def transform_many(self, texts: Sequence[str]) -> sp.csr_matrix:
        texts = list(texts)
        blocks = [m.transform_many(texts) for m in self.members]
        return sp.hstack(blocks, format="csr")

    def describe(self) -> str:
        return "+".join(m.config.analyzer for m in self.members)

    def to_dict(self) -> dict:
        return {"members": [m.to_dict() for m in self.members]}

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureUnion":
        return cls([Vectorizer.from_dict(m) for m in d["members"]])


def fit_union(corpus: Sequence[str], configs: Sequence[NgramConfig]) -> FeatureUnion:
    if not configs:
        raise ValueError("fit_union needs at least one config")
    return FeatureUnion([fit_vectorizer(corpus, c) for c in configs])


def transform_union(union: FeatureUnion, text: str) -> SparseVector:
    return union.transform(text)


def transform(vectorizer: Vectorizer, text: str) -> SparseVector:
    return vectorizer.transform(text)
