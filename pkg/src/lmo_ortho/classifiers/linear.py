"""Class-weighted multinomial logistic regression and one-vs-rest linear SVM."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .base import (
    FeatureSpace,
    Model,
    TrainingError,
    as_matrix,
    balanced_class_weights,
    encode_labels,
    softmax,
)


@dataclass
class LinearModel(Model):
    kind: str
    classes: list[str]
    weights: np.ndarray  # (K, D)
    bias: np.ndarray  # (K,)
    feature_space: FeatureSpace = None
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.kind not in ("logreg", "svm"):
            raise ValueError(f"unknown linear model kind {self.kind!r}")
        k = len(self.classes)
        if self.weights.ndim != 2 or self.weights.shape[0] != k or self.bias.shape != (k,):
            raise ValueError("weights/bias shape does not match the class list")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ValueError("non-finite model parameters")
        if self.feature_space is not None and self.feature_space.dim != self.weights.shape[1]:
            raise ValueError("feature space dim does not match the weight matrix")

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]

    def decision_scores(self, X) -> np.ndarray:
        X = as_matrix(X, self.n_features)
        return np.asarray(X @ self.weights.T) + self.bias

    def _reported_scores(self, scores):
        # logreg reports probabilities; svm keeps raw decision values
        return softmax(scores) if self.kind == "logreg" else scores


def _prepare(X, y):
    X = as_matrix(X)
    if X.shape[0] != len(y):
        raise TrainingError(f"{X.shape[0]} feature rows but {len(y)} labels")
    if X.shape[0] == 0:
        raise TrainingError("no training samples")
    classes, yi = encode_labels(y)
    if len(classes) < 2:
        raise TrainingError(f"need at least two classes, got {classes}")
    cw = balanced_class_weights(yi.tolist())
    sample_w = np.array([cw[i] for i in range(len(classes))])[yi]
    return X, classes, yi, sample_w


def logreg_objective(params, X, Y, sample_w, l2):
    """Weighted softmax cross-entropy + (l2/2)||W||^2 and its gradient.

    ``params`` is W (K*D, row-major) followed by the unregularised bias (K).
    ``Y`` is the one-hot label matrix (N, K).
    """
    n_classes = Y.shape[1]
    dim = X.shape[1]
    W = params[: n_classes * dim].reshape(n_classes, dim)
    b = params[n_classes * dim :]
    Z = np.asarray(X @ W.T) + b
    zmax = Z.max(axis=1, keepdims=True)
    logsum = zmax[:, 0] + np.log(np.exp(Z - zmax).sum(axis=1))
    loss = np.dot(sample_w, logsum - (Z * Y).sum(axis=1)) + 0.5 * l2 * np.dot(W.ravel(), W.ravel())
    P = np.exp(Z - logsum[:, None])
    G = (P - Y) * sample_w[:, None]
    grad_W = np.asarray((X.T @ G).T) + l2 * W
    grad_b = G.sum(axis=0)
    return loss, np.concatenate([grad_W.ravel(), grad_b])


def train_logreg(
    X,
    y,
    max_iter: int = 1000,
    tol: float = 1e-4,
    l2: float = 1.0,
    feature_space: FeatureSpace = None,
) -> LinearModel:
    """Multinomial logistic regression with balanced class weights, L-BFGS from zero."""
    X, classes, yi, sample_w = _prepare(X, y)
    n_classes, dim = len(classes), X.shape[1]
    Y = np.zeros((X.shape[0], n_classes))
    Y[np.arange(X.shape[0]), yi] = 1.0

    x0 = np.zeros(n_classes * (dim + 1))
    history = [float(logreg_objective(x0, X, Y, sample_w, l2)[0])]

    def record(intermediate_result):
        history.append(float(intermediate_result.fun))

    res = minimize(
        logreg_objective,
        x0,
        args=(X, Y, sample_w, l2),
        jac=True,
        method="L-BFGS-B",
        callback=record,
        options={"maxiter": max_iter, "gtol": tol, "maxcor": 10},
    )
    W = res.x[: n_classes * dim].reshape(n_classes, dim)
    b = res.x[n_classes * dim :]
    return LinearModel(
        "logreg",
        classes,
        W.copy(),
        b.copy(),
        feature_space,
        info={"n_iter": int(res.nit), "loss": float(res.fun), "converged": bool(res.success),
              "loss_history": history},
    )


def squared_hinge_objective(params, X, s, cost, hinge="squared_hinge"):
    """One binary problem: (1/2)||w||^2 + sum_i cost_i * loss(s_i (w.x_i + b)).

    ``cost`` already folds in C and the balanced class weight of sample i.
    The bias (last entry) is not regularised.
    """
    w, b = params[:-1], params[-1]
    margin = 1.0 - s * (X @ w + b)
    active = margin > 0
    if hinge == "squared_hinge":
        viol = np.where(active, margin, 0.0)
        loss = 0.5 * np.dot(w, w) + np.dot(cost, viol * viol)
        coef = -2.0 * cost * viol * s
    else:
        loss = 0.5 * np.dot(w, w) + np.dot(cost, np.where(active, margin, 0.0))
        coef = -cost * s * active
    grad_w = w + X.T @ coef
    return loss, np.concatenate([grad_w, [coef.sum()]])


def train_svm(
    X,
    y,
    max_iter: int = 4000,
    C: float = 1.0,
    tol: float = 1e-4,
    hinge: str = "squared_hinge",
    feature_space: FeatureSpace = None,
) -> LinearModel:
    """One-vs-rest linear SVM; each binary problem solved in the primal by L-BFGS.

    ``hinge="hinge"`` switches to the plain hinge, which is not differentiable;
    L-BFGS then only gets an approximate minimiser.
    """
    if hinge not in ("squared_hinge", "hinge"):
        raise ValueError(f"unknown hinge loss {hinge!r}")
    X, classes, yi, sample_w = _prepare(X, y)
    n_classes, dim = len(classes), X.shape[1]
    cost = C * sample_w
    W = np.zeros((n_classes, dim))
    b = np.zeros(n_classes)
    n_iter = []
    for k in range(n_classes):
        s = np.where(yi == k, 1.0, -1.0)
        res = minimize(
            squared_hinge_objective,
            np.zeros(dim + 1),
            args=(X, s, cost, hinge),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": max_iter, "gtol": tol},
        )
        W[k], b[k] = res.x[:-1], res.x[-1]
        n_iter.append(int(res.nit))
    return LinearModel("svm", classes, W, b, feature_space, info={"n_iter": n_iter, "hinge": hinge})
