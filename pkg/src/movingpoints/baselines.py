"""Reference classifiers for the benchmark: perceptron, KNN, linear SVM.

These are minimal self-contained stand-ins for the usual library
implementations, kept in-repo so benchmark runs are auditable end to end.
Published accuracy tables for the equivalent library models are
reproduction targets with tolerance, not bit-exact references: the
training heuristics (learning-rate schedules, solvers) differ.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import Dataset
from .rng import SplitMix64


class EmptyModelError(ValueError):
    """The model holds no training data."""


@dataclass
class PerceptronModel:
    weights: np.ndarray
    bias: float
    eta: float
    epochs: int
    seed: int


def perceptron_fit(data: Dataset, eta: float = 1.0, epochs: int = 50,
                   seed: int = 0) -> PerceptronModel:
    """Rosenblatt's rule from a zero start, shuffled sweeps.

    Labels map to y in {-1, +1}; every example with y*(w.x + b) <= 0
    triggers w += eta*y*x, b += eta*y. Stops early on a clean sweep, after
    which further epochs could not change anything.
    """
    data.require_binary()
    X = data.features
    y = np.where(data.labels == 1, 1.0, -1.0)
    m, n = X.shape
    w = np.zeros(n)
    b = 0.0
    rng = SplitMix64(seed)
    for _ in range(epochs):
        updates = 0
        for i in rng.permutation(m):
            if y[i] * (float(w @ X[i]) + b) <= 0.0:
                w = w + eta * y[i] * X[i]
                b += eta * y[i]
                updates += 1
        if updates == 0:
            break
    return PerceptronModel(weights=w, bias=b, eta=eta, epochs=epochs, seed=seed)


def perceptron_predict_many(model: PerceptronModel, X) -> np.ndarray:
    raw = np.asarray(X, dtype=float) @ model.weights + model.bias
    return (raw > 0).astype(int)


def perceptron_predict(model: PerceptronModel, x) -> int:
    return int(perceptron_predict_many(model, np.asarray(x, dtype=float)[None, :])[0])


@dataclass
class KnnModel:
    points: np.ndarray
    labels: np.ndarray
    k: int


def knn_fit(data: Dataset, k: int = 3) -> KnnModel:
    if data.m == 0:
        raise EmptyModelError("no training points")
    if not (1 <= k <= data.m):
        raise ValueError(f"k must be in 1..{data.m}, got {k}")
    return KnnModel(points=data.features.copy(), labels=data.labels.copy(), k=k)


def knn_predict(model: KnnModel, x) -> int:
    """Majority label of the k nearest points; ties go to the single nearest."""
    if model.points.shape[0] == 0:
        raise EmptyModelError("no training points")
    x = np.asarray(x, dtype=float)
    dist = np.linalg.norm(model.points - x, axis=1)
    order = np.argsort(dist, kind="stable")[: model.k]
    votes = model.labels[order]
    ones = int(np.sum(votes == 1))
    zeros = votes.size - ones
    if ones == zeros:
        return int(model.labels[order[0]])
    return 1 if ones > zeros else 0


def knn_predict_many(model: KnnModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.array([knn_predict(model, row) for row in X], dtype=int)


@dataclass
class LinearSvmModel:
    weights: np.ndarray
    bias: float
    reg: float
    epochs: int
    seed: int


def linear_svm_fit(data: Dataset, reg: float = 0.01, epochs: int = 30,
                   seed: int = 0) -> LinearSvmModel:
    """Hinge-loss subgradient descent with L2 regularization.

    Pegasos-style schedule: at global step t the rate is 1/(reg*t); each
    epoch sweeps a fresh shuffle. The bias rides along as an appended
    constant feature, so it is (lightly) regularized with the rest.
    """
    data.require_binary()
    if not reg > 0:
        raise ValueError(f"reg must be positive, got {reg}")
    X = np.hstack([data.features, np.ones((data.m, 1))])
    y = np.where(data.labels == 1, 1.0, -1.0)
    m, n1 = X.shape
    w = np.zeros(n1)
    rng = SplitMix64(seed)
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(m):
            t += 1
            step = 1.0 / (reg * t)
            margin = y[i] * float(w @ X[i])
            w = (1.0 - step * reg) * w
            if margin < 1.0:
                w = w + step * y[i] * X[i]
    return LinearSvmModel(weights=w[:-1].copy(), bias=float(w[-1]), reg=reg,
                          epochs=epochs, seed=seed)


def linear_svm_predict_many(model: LinearSvmModel, X) -> np.ndarray:
    raw = np.asarray(X, dtype=float) @ model.weights + model.bias
    return (raw > 0).astype(int)


def linear_svm_predict(model: LinearSvmModel, x) -> int:
    return int(linear_svm_predict_many(model, np.asarray(x, dtype=float)[None, :])[0])
