from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ..features import FeatureUnion, SparseVector, Vectorizer


class TrainingError(ValueError):
    """Training input violates a trainer precondition."""


class NegativeFeatureError(TrainingError):
    pass


@dataclass(frozen=True)
class Prediction:
    label: str
    scores: np.ndarray
    confidence: float


def softmax(scores: np.ndarray) -> np.ndarray:
    """Row-wise softmax, stable for large magnitudes."""
    z = np.asarray(scores, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def balanced_class_weights(labels: Sequence) -> dict:
    """``w_c = N / (K * N_c)`` over the classes present in ``labels``."""
    if len(labels) == 0:
        raise ValueError("cannot weight an empty label list")
    counts = Counter(labels)
    n, k = len(labels), len(counts)
    return {c: n / (k * nc) for c, nc in sorted(counts.items(), key=lambda kv: str(kv[0]))}


def as_matrix(X, dim: int | None = None) -> sp.csr_matrix:
    """Coerce a CSR matrix, dense array, or list of SparseVector to float64 CSR."""
    if isinstance(X, SparseVector):
        X = [X]
    if isinstance(X, (list, tuple)) and X and isinstance(X[0], SparseVector):
        d = X[0].dim
        if any(v.dim != d for v in X):
            raise ValueError("sparse vectors have inconsistent dims")
        indptr = np.concatenate([[0], np.cumsum([v.nnz for v in X])])
        M = sp.csr_matrix(
            (np.concatenate([v.values for v in X]), np.concatenate([v.indices for v in X]), indptr),
            shape=(len(X), d),
        )
    elif sp.issparse(X):
        M = sp.csr_matrix(X, dtype=np.float64)
    else:
        M = sp.csr_matrix(np.atleast_2d(np.asarray(X, dtype=np.float64)))
    if dim is not None and M.shape[1] != dim:
        raise ValueError(f"feature dimension mismatch: got {M.shape[1]}, model expects {dim}")
    if not np.all(np.isfinite(M.data)):
        raise TrainingError("non-finite feature values")
    M.sort_indices()
    return M


def encode_labels(y: Sequence) -> tuple[list[str], np.ndarray]:
    labels = [str(v) for v in y]
    classes = sorted(set(labels))
    lookup = {c: i for i, c in enumerate(classes)}
    return classes, np.array([lookup[v] for v in labels], dtype=np.int64)


FeatureSpace = Vectorizer | FeatureUnion | None


class Model:
    """Shared prediction surface.

    Subclasses implement :meth:`decision_scores` (one row of K scores per
    input) and :meth:`_confidences`. Labels follow the first maximal score.
    """

    kind: str
    classes: list[str]
    feature_space: FeatureSpace
    n_features: int

    def decision_scores(self, X) -> np.ndarray:
        raise NotImplementedError

    def _confidences(self, scores: np.ndarray) -> np.ndarray:
        return softmax(scores)

    def _reported_scores(self, scores: np.ndarray) -> np.ndarray:
        return scores

    def featurize(self, texts: Sequence[str]) -> sp.csr_matrix:
        if self.feature_space is None:
            raise ValueError("model has no feature space; pass feature vectors instead")
        return self.feature_space.transform_many(texts)

    def predict_proba(self, X) -> np.ndarray:
        return self._confidences(self.decision_scores(X))

    def predict_labels(self, X) -> list[str]:
        scores = self.decision_scores(X)
        return [self.classes[i] for i in np.argmax(scores, axis=1)]

    def predict_many(self, X) -> list[Prediction]:
        scores = self.decision_scores(X)
        probs = self._confidences(scores)
        best = np.argmax(scores, axis=1)
        return [
            Prediction(self.classes[b], self._reported_scores(s), float(p[b]))
            for b, s, p in zip(best, scores, probs)
        ]

    def predict(self, x) -> Prediction:
        """Predict one input: a SparseVector, dense row, or raw text."""
        if isinstance(x, str):
            x = self.featurize([x])
        return self.predict_many(x)[0]

    def predict_texts(self, texts: Sequence[str]) -> list[Prediction]:
        return self.predict_many(self.featurize(texts))


def predict(model: Model, x) -> Prediction:
    return model.predict(x)
