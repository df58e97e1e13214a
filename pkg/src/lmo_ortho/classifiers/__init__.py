"""The four traditional classifiers and their model files."""

from .base import (
    Model,
    NegativeFeatureError,
    Prediction,
    TrainingError,
    as_matrix,
    balanced_class_weights,
    predict,
    softmax,
)
from .forest import ForestModel, Tree, train_rf
from .io import (
    FORMAT_VERSION,
    CorruptModelError,
    ModelFileError,
    ModelVersionError,
    TruncatedModelError,
    dumps,
    load_model,
    loads,
    save_model,
)
from .linear import LinearModel, logreg_objective, train_logreg, train_svm
from .naive_bayes import NBModel, train_nb

MODEL_KINDS = ("logreg", "svm", "nb", "rf")

__all__ = [
    "FORMAT_VERSION",
    "MODEL_KINDS",
    "CorruptModelError",
    "ForestModel",
    "LinearModel",
    "Model",
    "ModelFileError",
    "ModelVersionError",
    "NBModel",
    "NegativeFeatureError",
    "Prediction",
    "TrainingError",
    "Tree",
    "TruncatedModelError",
    "as_matrix",
    "balanced_class_weights",
    "dumps",
    "load_model",
    "loads",
    "logreg_objective",
    "predict",
    "save_model",
    "softmax",
    "train_logreg",
    "train_nb",
    "train_rf",
    "train_svm",
]
