"""Multinomial Naive Bayes over non-negative (TF-IDF) features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import (
    FeatureSpace,
    Model,
    NegativeFeatureError,
    TrainingError,
    as_matrix,
    balanced_class_weights,
    encode_labels,
)


@dataclass
class NBModel(Model):
    classes: list[str]
    log_prior: np.ndarray  # (K,)
    log_likelihood: np.ndarray  # (K, D), log theta
    alpha: float = 1.0
    feature_space: FeatureSpace = None
    kind: str = "nb"

    def __post_init__(self):
        self.log_prior = np.asarray(self.log_prior, dtype=np.float64)
        self.log_likelihood = np.asarray(self.log_likelihood, dtype=np.float64)
        k = len(self.classes)
        if self.log_prior.shape != (k,) or self.log_likelihood.ndim != 2 or self.log_likelihood.shape[0] != k:
            raise ValueError("NB parameter shapes do not match the class list")
        if self.feature_space is not None and self.feature_space.dim != self.log_likelihood.shape[1]:
            raise ValueError("feature space dim does not match the likelihood table")

    @property
    def n_features(self) -> int:
        return self.log_likelihood.shape[1]

    def decision_scores(self, X) -> np.ndarray:
        """Log joint: log P(c) + sum_t x_t log theta_{c,t}."""
        X = as_matrix(X, self.n_features)
        return np.asarray(X @ self.log_likelihood.T) + self.log_prior


def train_nb(
    X,
    y,
    alpha: float = 1.0,
    weighted: bool = False,
    feature_space: FeatureSpace = None,
) -> NBModel:
    """Fit smoothed class-conditional term distributions.

    theta_{c,t} = (sum of x_t over class c + alpha) / (class total + alpha * D).
    Unweighted by default. ``weighted=True`` scales each sample's counts by its
    balanced class weight, which also makes the priors uniform.
    """
    X = as_matrix(X)
    if X.shape[0] != len(y):
        raise TrainingError(f"{X.shape[0]} feature rows but {len(y)} labels")
    if X.shape[0] == 0:
        raise TrainingError("no training samples")
    if X.nnz and X.data.min() < 0:
        raise NegativeFeatureError("Naive Bayes requires non-negative feature values")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    classes, yi = encode_labels(y)
    n_classes = len(classes)

    sample_w = np.ones(X.shape[0])
    if weighted:
        cw = balanced_class_weights(yi.tolist())
        sample_w = np.array([cw[i] for i in range(n_classes)])[yi]

    onehot = np.zeros((X.shape[0], n_classes))
    onehot[np.arange(X.shape[0]), yi] = sample_w
    feature_count = np.asarray((X.T @ onehot).T)  # (K, D)
    class_mass = onehot.sum(axis=0)

    smoothed = feature_count + alpha
    log_likelihood = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
    log_prior = np.log(class_mass) - np.log(class_mass.sum())
    return NBModel(classes, log_prior, log_likelihood, alpha, feature_space)
