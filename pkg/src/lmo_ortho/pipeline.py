"""Text-to-model training: fit the feature space, then the classifier."""

from __future__ import annotations

from typing import Sequence

from .classifiers import MODEL_KINDS, train_logreg, train_nb, train_rf, train_svm
from .classifiers.base import TrainingError
from .corpus import OrthographyClass, Sample
from .features import ANALYZERS, FeatureUnion, NgramConfig, fit_union

# LSI has three samples in the released corpus and is left out of training
DEFAULT_EXCLUDE = ("LSI",)

_TRAINERS = {"logreg": train_logreg, "svm": train_svm, "nb": train_nb, "rf": train_rf}


def parse_features(spec: str | Sequence[str]) -> list[str]:
    names = spec.split(",") if isinstance(spec, str) else list(spec)
    names = [n.strip() for n in names if n.strip()]
    if not names:
        raise ValueError("at least one feature type is required")
    bad = [n for n in names if n not in ANALYZERS]
    if bad:
        raise ValueError(f"unknown feature types {bad}; choose from {', '.join(ANALYZERS)}")
    if len(set(names)) != len(names):
        raise ValueError("feature types must not repeat")
    return names


def training_samples(samples: Sequence[Sample], exclude: Sequence[str] = DEFAULT_EXCLUDE) -> list[Sample]:
    skip = set(exclude) | {OrthographyClass.NO_TAG.value}
    return [s for s in samples if s.tag.value not in skip]


def train_model(
    kind: str,
    samples: Sequence[Sample],
    features: str | Sequence[str] = ("byte",),
    exclude: Sequence[str] = DEFAULT_EXCLUDE,
    n_min: int = 1,
    n_max: int = 4,
    max_features: int = 10_000,
    lowercase: bool = True,
    **hyper,
):
    """Fit a union of n-gram vectorizers on the training texts and train ``kind`` on it.

    ``hyper`` goes straight to the trainer (``max_iter``, ``C``, ``l2``,
    ``alpha``, ``weighted``, ``n_trees``, ``seed``...).
    """
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}; choose from {', '.join(MODEL_KINDS)}")
    data = training_samples(samples, exclude)
    if not data:
        raise TrainingError("no training samples left after exclusions")
    configs = [NgramConfig(a, n_min, n_max, max_features, lowercase) for a in parse_features(features)]
    texts = [s.text for s in data]
    space = fit_union(texts, configs)
    if len(space.members) == 1:
        space = space.members[0]
    X = space.transform_many(texts)
    return _TRAINERS[kind](X, [s.tag.value for s in data], feature_space=space, **hyper)


def feature_description(space) -> list[dict]:
    members = space.members if isinstance(space, FeatureUnion) else [space]
    return [m.config.to_dict() for m in members]
