"""The moving points classifier.

A binary decision boundary in n dimensions is represented by n movable
points; the hyperplane through them is the boundary. Training never touches
the hyperplane coefficients directly: it displaces the points, one small
step per misclassified example, and rereads the plane from their new
positions.

Each class carries a pseudo sign in {-1, +1}, fixed at initialization from
the side of the boundary its mean falls on. For an example x with label y,

    lambda = signed_displacement(boundary, x) * pseudo_sign(y)

so lambda < 0 flags a misclassification and |lambda| measures its depth.
A misclassified example q pulls the nearest moving point c a step of length
|eta * lambda| in the direction of (g - c), where g is a random member of
the opposite class's near-cluster (points within a percentile radius of the
class mean, sampled to damp outlier influence). A proximity guard removes
any movement component that would push two moving points within alpha of
each other closer together.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .datasets import Dataset
from .geometry import (
    EPS_DEGENERATE,
    DegeneratePointsError,
    DimensionMismatchError,
    Hyperplane,
    as_vector,
    coordinate_scale,
    hyperplane_from_points,
    line_from_points,
    region_sign,
    signed_displacement,
)
from .rng import SplitMix64

MAX_RESAMPLES = 8  # extra draws of g when it lands on the mover
_GUARD_TOL = 1e-12
_MAX_GUARD_PASSES = 64


class IdenticalMeansError(ValueError):
    """Class means coincide; no perpendicular direction exists."""


class MeanOnBoundaryError(ValueError):
    """A class mean sits on the initial boundary."""


class SameSideMeansError(ValueError):
    """Both class means fall on the same side of the boundary."""


class ZeroDisplacementError(ValueError):
    """The sampled target coincides with the moving point."""


@dataclass
class MpaConfig:
    """Training knobs.

    alpha=None resolves at initialization to 0.1 times the smallest
    distance between the freshly placed moving points.
    """

    eta: float = 5e-5
    epochs: int = 150
    alpha: float | None = None
    near_cluster_percentile: float = 50.0
    init_spread: float = 0.5
    seed: int = 0
    early_stop: bool = True

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ValueError(f"epochs must be a positive integer, got {self.epochs}")
        self.epochs = int(self.epochs)
        if self.alpha is not None and not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not 0 < self.near_cluster_percentile <= 100:
            raise ValueError(
                f"near_cluster_percentile must be in (0, 100], got {self.near_cluster_percentile}"
            )
        if not self.init_spread > 0:
            raise ValueError(f"init_spread must be positive, got {self.init_spread}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")
        self.seed = int(self.seed)


class MpaModel:
    """n moving points, their pseudo-sign map, and the cached boundary."""

    def __init__(self, moving_points, pseudo_sign, alpha: float,
                 config: MpaConfig, feature_names=None):
        pts = np.asarray(moving_points, dtype=float)
        n = pts.shape[0]
        if pts.shape != (n, n) or n < 2:
            raise DimensionMismatchError(
                f"need n >= 2 moving points of dimension n, got shape {pts.shape}"
            )
        if set(pseudo_sign) != {0, 1} or set(pseudo_sign.values()) != {-1, 1}:
            raise ValueError(f"pseudo_sign must map {{0,1}} onto {{-1,+1}}, got {pseudo_sign}")
        self.moving_points = pts
        self.pseudo_sign = {0: int(pseudo_sign[0]), 1: int(pseudo_sign[1])}
        self.alpha = float(alpha)
        self.config = config
        self.feature_names = list(feature_names) if feature_names is not None else None
        self.hyperplane = _plane_of(pts)

    @property
    def dim(self) -> int:
        return self.moving_points.shape[0]

    def refresh(self) -> None:
        """Recompute the cached hyperplane from the current points."""
        self.hyperplane = _plane_of(self.moving_points)


def _plane_of(points: np.ndarray) -> Hyperplane:
    # 2-D keeps the closed-form path; it is also the n=2 cross-check oracle.
    if points.shape[0] == 2:
        return line_from_points(points[0], points[1])
    return hyperplane_from_points(points)


def _complement_basis(direction: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of one direction.

    Gram-Schmidt over the standard basis, skipping vectors that are nearly
    inside the span built so far; two projection passes keep the result
    orthonormal to machine precision.
    """
    n = direction.size
    basis = [direction / np.linalg.norm(direction)]
    out = []
    for i in range(n):
        if len(out) == n - 1:
            break
        v = np.zeros(n)
        v[i] = 1.0
        for _ in range(2):
            for b in basis:
                v = v - (v @ b) * b
        nv = float(np.linalg.norm(v))
        if nv > 1e-9:
            v /= nv
            basis.append(v)
            out.append(v)
    if len(out) != n - 1:
        raise DegeneratePointsError("could not complete the complement basis")
    return np.array(out)


def initialize(class0_points, class1_points, cfg: MpaConfig) -> MpaModel:
    """Place the moving points across the segment joining the class means.

    The first moving point is the midpoint M of the means; the others are
    M + s*b_i along an orthonormal complement basis of (mean1 - mean0),
    s = init_spread * ||mean1 - mean0||. The resulting boundary passes
    through M perpendicular to the mean difference, and each class mean
    lands on its own side, fixing the pseudo signs.
    """
    X0 = np.asarray([as_vector(p) for p in class0_points], dtype=float)
    X1 = np.asarray([as_vector(p) for p in class1_points], dtype=float)
    if X0.size == 0 or X1.size == 0:
        raise ValueError("both classes must be non-empty")
    if X0.shape[1] != X1.shape[1]:
        raise DimensionMismatchError(
            f"class dimensions differ: {X0.shape[1]} vs {X1.shape[1]}"
        )
    n = X0.shape[1]
    if n < 2:
        raise DimensionMismatchError(f"need dimension >= 2, got {n}")

    mu0 = X0.mean(axis=0)
    mu1 = X1.mean(axis=0)
    d = mu1 - mu0
    gap = float(np.linalg.norm(d))
    if gap <= EPS_DEGENERATE * coordinate_scale(mu0, mu1):
        raise IdenticalMeansError("class means coincide")

    mid = 0.5 * (mu0 + mu1)
    s = cfg.init_spread * gap
    pts = np.empty((n, n))
    pts[0] = mid
    pts[1:] = mid + s * _complement_basis(d)

    diffs = pts[:, None, :] - pts[None, :, :]
    dists = np.linalg.norm(diffs, axis=2)
    min_dist = float(np.min(dists[np.triu_indices(n, k=1)]))
    alpha = cfg.alpha if cfg.alpha is not None else 0.1 * min_dist

    plane = _plane_of(pts)
    pseudo = assign_pseudo(plane, mu0, mu1)
    return MpaModel(pts, pseudo, alpha, cfg)


def assign_pseudo(h: Hyperplane, mu0, mu1) -> dict:
    """Read each class's pseudo sign off its mean's side of the boundary."""
    s0 = region_sign(h, mu0)
    s1 = region_sign(h, mu1)
    if s0 == 0 or s1 == 0:
        raise MeanOnBoundaryError("a class mean lies on the boundary")
    if s0 == s1:
        raise SameSideMeansError("class means fall on the same side of the boundary")
    return {0: s0, 1: s1}


def lambda_value(model: MpaModel, x, label: int) -> float:
    """Signed displacement times the label's pseudo sign; negative = wrong."""
    return signed_displacement(model.hyperplane, x) * model.pseudo_sign[label]


def movement_vector(model: MpaModel, q, g, lam: float, cfg: MpaConfig | None = None):
    """Step for the moving point nearest to the misclassified example q.

    With mover c, u = c - q and w = g - q give v = w - u = g - c; the step
    is t = (v/||v||) * |eta * lambda|, i.e. length |eta*lambda| straight
    toward the sampled opposite-class point g. Returns (mover_index, t).
    """
    cfg = cfg or model.config
    q = as_vector(q)
    g = as_vector(g)
    if q.size != model.dim or g.size != model.dim:
        raise DimensionMismatchError(
            f"expected dimension {model.dim}, got q:{q.size} g:{g.size}"
        )
    dists = np.linalg.norm(model.moving_points - q, axis=1)
    mover = int(np.argmin(dists))  # argmin takes the lowest index on ties
    c = model.moving_points[mover]
    v = g - c
    nv = float(np.linalg.norm(v))
    if nv <= EPS_DEGENERATE * coordinate_scale(c, g):
        raise ZeroDisplacementError("sampled target coincides with the mover")
    t = (v / nv) * abs(cfg.eta * lam)
    return mover, t


def overfit_guard(model: MpaModel, mover_index: int, t, cfg: MpaConfig | None = None):
    """Strip movement components that close in on a nearby moving point.

    For every other moving point F with ||E - F|| <= alpha, the approach
    direction is r = (F - E)/||F - E||; a component t.r > 0 would shrink
    the gap and is projected out. Projections repeat until no near
    neighbor keeps a component above 1e-12 (projecting for one neighbor
    can re-open another), with a hard pass cap falling back to a zero
    move. Movements pointing away from every near neighbor pass through
    untouched.
    """
    alpha = model.alpha
    if cfg is not None and cfg.alpha is not None:
        alpha = cfg.alpha
    E = model.moving_points[mover_index]
    others = np.delete(model.moving_points, mover_index, axis=0)
    gaps = np.linalg.norm(others - E, axis=1)
    near = gaps <= alpha
    if not np.any(near):
        return t
    rhats = (others[near] - E) / gaps[near, None]

    t = np.asarray(t, dtype=float)
    out = t
    for _ in range(_MAX_GUARD_PASSES):
        dots = rhats @ out
        if not np.any(dots > _GUARD_TOL):
            return out
        if out is t:
            out = t.copy()
        for i in np.nonzero(dots > _GUARD_TOL)[0]:
            d = float(rhats[i] @ out)
            if d > _GUARD_TOL:
                out = out - rhats[i] * d
    return np.zeros_like(t)


@dataclass
class NearCluster:
    """A class's mean and the indices of its inlying training points."""

    mean: np.ndarray
    members: np.ndarray

    def __post_init__(self):
        if self.members.size == 0:
            raise ValueError("near cluster must be non-empty")


def near_clusters(data: Dataset, percentile: float) -> dict:
    """Per class: members within the percentile radius of the class mean.

    The radius is the given percentile of that class's distances to its own
    mean, so the cut never empties (the nearest point always qualifies);
    the single-nearest fallback stays as a belt for degenerate percentile
    arithmetic.
    """
    out = {}
    for label in (0, 1):
        idx = np.nonzero(data.labels == label)[0]
        pts = data.features[idx]
        mean = pts.mean(axis=0)
        dist = np.linalg.norm(pts - mean, axis=1)
        radius = float(np.percentile(dist, percentile))
        keep = idx[dist <= radius]
        if keep.size == 0:
            keep = idx[[int(np.argmin(dist))]]
        out[label] = NearCluster(mean=mean, members=keep)
    return out


@dataclass
class TrainingLog:
    """Per-epoch misclassification counts plus moving-point snapshots.

    trajectory[0] holds the initial positions; trajectory[k] the positions
    after epoch k. moves counts accepted point displacements.
    """

    misclassified: list[int] = field(default_factory=list)
    trajectory: np.ndarray | None = None
    epochs_run: int = 0
    stopped_early: bool = False
    moves: int = 0


def fit(model: MpaModel, data: Dataset, cfg: MpaConfig | None = None) -> TrainingLog:
    """Run the training loop, mutating the model's moving points.

    Every epoch visits the examples in a seeded shuffled order. For each
    example with lambda < 0 the nearest moving point takes a guarded step
    toward a uniformly drawn member of the opposite class's near-cluster
    (redrawn up to 8 times if the draw lands on the mover; the example is
    skipped if all draws fail, and also if its step would make the moving
    points affinely degenerate, which is undone). With early_stop set,
    training halts after the first epoch with zero misclassifications.

    Between moves the boundary is frozen, so lambdas for a whole stretch of
    examples are evaluated in one vectorized pass and the loop jumps
    directly to the next misclassified example; the result is identical to
    evaluating one example at a time.
    """
    cfg = cfg or model.config
    if data.n != model.dim:
        raise DimensionMismatchError(
            f"data has dimension {data.n}, model has {model.dim}"
        )
    data.require_binary()

    clusters = near_clusters(data, cfg.near_cluster_percentile)
    rng = SplitMix64(cfg.seed)
    X = data.features
    y = data.labels
    m = data.m

    log = TrainingLog()
    snapshots = [model.moving_points.copy()]
    pseudo = np.where(y == 1, model.pseudo_sign[1], model.pseudo_sign[0]).astype(float)

    for _epoch in range(cfg.epochs):
        order = np.array(rng.permutation(m), dtype=int)
        miss = 0
        i = 0
        while i < m:
            w = model.hyperplane.weights
            b = model.hyperplane.bias
            norm_w = float(np.linalg.norm(w))
            rows = order[i:]
            lam = (X[rows] @ w + b) / norm_w * pseudo[rows]
            bad = np.nonzero(lam < 0.0)[0]
            if bad.size == 0:
                break
            k = int(bad[0])
            j = rows[k]
            miss += 1
            moved = _step(model, rng, clusters, X, X[j], int(y[j]), float(lam[k]), cfg)
            if moved:
                log.moves += 1
            i += k + 1

        log.misclassified.append(miss)
        snapshots.append(model.moving_points.copy())
        log.epochs_run += 1
        if cfg.early_stop and miss == 0:
            log.stopped_early = True
            break

    log.trajectory = np.array(snapshots)
    return log


def _step(model: MpaModel, rng: SplitMix64, clusters: dict, X: np.ndarray,
          q: np.ndarray, label: int, lam: float, cfg: MpaConfig) -> bool:
    """One guarded move toward a sampled opposite-class point; True if applied."""
    members = clusters[1 - label].members
    mover = -1
    t = None
    for _attempt in range(1 + MAX_RESAMPLES):
        g = X[members[rng.randint(members.size)]]
        try:
            mover, t = movement_vector(model, q, g, lam, cfg)
            break
        except ZeroDisplacementError:
            t = None
    if t is None:
        return False
    t = overfit_guard(model, mover, t, cfg)
    if not np.any(t):
        return False
    old = model.moving_points[mover].copy()
    model.moving_points[mover] = old + t
    try:
        model.refresh()
    except DegeneratePointsError:
        model.moving_points[mover] = old
        return False
    return True


def predict(model: MpaModel, x) -> int:
    """Class whose pseudo sign matches the point's side of the boundary.

    A point sitting on the boundary goes to the class with pseudo sign +1.
    """
    s = region_sign(model.hyperplane, x)
    if s == 0:
        return 1 if model.pseudo_sign[1] == 1 else 0
    return 1 if model.pseudo_sign[1] == s else 0


def predict_many(model: MpaModel, X) -> np.ndarray:
    """Vectorized predict over the rows of X."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.dim:
        raise DimensionMismatchError(
            f"expected shape (m, {model.dim}), got {X.shape}"
        )
    if X.shape[0] == 0:
        return np.empty(0, dtype=int)
    h = model.hyperplane
    raw = X @ h.weights + h.bias
    scale = np.maximum.reduce([
        np.ones(X.shape[0]),
        float(np.max(np.abs(h.weights))) * np.max(np.abs(X), axis=1),
        np.full(X.shape[0], abs(h.bias)),
    ])
    on_plane = np.abs(raw) <= 1e-12 * scale
    sign = np.where(raw > 0, 1, -1)
    plus_class = 1 if model.pseudo_sign[1] == 1 else 0
    out = np.where(sign == model.pseudo_sign[1], 1, 0)
    out[on_plane] = plus_class
    return out.astype(int)


def train(data: Dataset, cfg: MpaConfig | None = None):
    """initialize + fit in one call; returns (model, log)."""
    cfg = cfg or MpaConfig()
    data.require_binary()
    model = initialize(data.class_points(0), data.class_points(1), cfg)
    if data.feature_names is not None:
        model.feature_names = list(data.feature_names)
    log = fit(model, data, cfg)
    return model, log


def training_accuracy(model: MpaModel, data: Dataset) -> float:
    preds = predict_many(model, data.features)
    return float(np.mean(preds == data.labels))


def model_document(model: MpaModel) -> str:
    """Serialize to a JSON text that round-trips every float bit-exactly."""
    doc = {
        "format": "moving-points-model",
        "version": 1,
        "dim": model.dim,
        "moving_points": [list(map(float, row)) for row in model.moving_points],
        "pseudo_sign": {str(k): v for k, v in sorted(model.pseudo_sign.items())},
        "alpha": model.alpha,
        "config": asdict(model.config),
        "feature_names": model.feature_names,
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_model_document(text: str) -> MpaModel:
    doc = json.loads(text)
    if doc.get("format") != "moving-points-model":
        raise ValueError("not a moving-points model document")
    cfg = MpaConfig(**doc["config"])
    return MpaModel(
        np.array(doc["moving_points"], dtype=float),
        {int(k): int(v) for k, v in doc["pseudo_sign"].items()},
        float(doc["alpha"]),
        cfg,
        feature_names=doc.get("feature_names"),
    )


def save_model(model: MpaModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(model_document(model))


def load_model(path) -> MpaModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model_document(fh.read())
