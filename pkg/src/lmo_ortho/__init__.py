"""Orthography identification for Lombard text.

Build an orthography-tagged corpus from a MediaWiki dump, featurize lines with
TF-IDF n-grams and train linear, Naive Bayes or random-forest classifiers.
"""

__version__ = "0.1.0"

from .corpus import (
    ClassDistribution,
    OrthographyClass,
    Sample,
    SplitSet,
    class_distribution,
    load_jsonl,
    stratified_split,
    write_jsonl,
)
from .features import (
    FeatureUnion,
    NgramConfig,
    SparseVector,
    Vectorizer,
    fit_union,
    fit_vectorizer,
    tokenize,
    transform,
    transform_union,
)
from .pipeline import train_model

__all__ = [
    "__version__",
    "ClassDistribution",
    "OrthographyClass",
    "Sample",
    "SplitSet",
    "class_distribution",
    "load_jsonl",
    "stratified_split",
    "write_jsonl",
    "FeatureUnion",
    "NgramConfig",
    "SparseVector",
    "Vectorizer",
    "fit_union",
    "fit_vectorizer",
    "tokenize",
    "transform",
    "transform_union",
    "train_model",
]
