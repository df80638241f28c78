"""Vectors, hyperplanes, and the determinant construction.

Points are plain 1-D float64 numpy arrays (validated by :func:`as_vector`).
A hyperplane is stored as the coefficients of its implicit equation
``weights . x + bias = 0``; no normalization is imposed, so two coefficient
sets that differ by a nonzero scalar describe the same flat.

Construction from n points in n dimensions expands the bordered
determinant

    | x_1  ... x_n  1 |
    | p1_1 ... p1_n 1 |
    | ...           . |
    | pn_1 ... pn_n 1 |  = 0

along its first row: weight i is the signed cofactor of the variable
column i, the bias is the signed cofactor of the constant column. Each
minor is evaluated numerically by Gaussian elimination with partial
pivoting, so no symbolic algebra is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EPS_DEGENERATE = 1e-9
EPS_ON_PLANE = 1e-12


class DimensionMismatchError(ValueError):
    """Operands live in different dimensions."""


class DegeneratePointsError(ValueError):
    """The points cannot define a unique hyperplane."""


class ZeroVectorError(ValueError):
    """A direction was required but the vector has (near-)zero norm."""


def as_vector(coords) -> np.ndarray:
    """Validate and return a point as a 1-D float64 array.

    Rejects empty vectors and non-finite coordinates.
    """
    v = np.asarray(coords, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a 1-D point, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("point has non-finite coordinates")
    return v


def coordinate_scale(*arrays) -> float:
    """Largest absolute coordinate among the inputs, floored at 1.0.

    Used to scale the degeneracy and on-plane tolerances so they behave
    relatively on unstandardized data while staying absolute near zero.
    """
    m = 1.0
    for a in arrays:
        a = np.asarray(a, dtype=float)
        if a.size:
            m = max(m, float(np.max(np.abs(a))))
    return m


@dataclass(frozen=True)
class Hyperplane:
    """Coefficients of ``weights . x + bias = 0``."""

    weights: np.ndarray
    bias: float

    def __post_init__(self):
        w = as_vector(self.weights)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))
        if not np.isfinite(self.bias):
            raise ValueError("bias is not finite")
        scale = max(float(np.max(np.abs(w))), abs(self.bias), 1.0)
        if float(np.linalg.norm(w)) <= EPS_DEGENERATE * scale:
            raise DegeneratePointsError("hyperplane normal is (near-)zero")

    @property
    def dim(self) -> int:
        return self.weights.size

    def _check_dim(self, x: np.ndarray) -> None:
        if x.size != self.dim:
            raise DimensionMismatchError(
                f"point has dimension {x.size}, hyperplane has {self.dim}"
            )


def determinant(matrix: np.ndarray) -> float:
    """Determinant by Gaussian elimination with partial pivoting."""
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"matrix must be square, got {a.shape}")
    det = 1.0
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(a[col:, col])))
        if a[pivot, col] == 0.0:
            return 0.0
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
            det = -det
        det *= a[col, col]
        for row in range(col + 1, n):
            a[row, col:] -= (a[row, col] / a[col, col]) * a[col, col:]
    return det


def line_from_points(e, f) -> Hyperplane:
    """Line through two distinct 2-D points, closed form.

    Coefficients are (y1 - y2, x2 - x1) with constant x1*y2 - x2*y1, read
    directly off the two-point line equation.
    """
    e = as_vector(e)
    f = as_vector(f)
    if e.size != 2 or f.size != 2:
        raise DimensionMismatchError("line_from_points requires 2-D points")
    scale = coordinate_scale(e, f)
    if float(np.linalg.norm(e - f)) <= EPS_DEGENERATE * scale:
        raise DegeneratePointsError("the two points coincide")
    x1, y1 = e
    x2, y2 = f
    return Hyperplane(np.array([y1 - y2, x2 - x1]), x1 * y2 - x2 * y1)


def hyperplane_from_points(points) -> Hyperplane:
    """Hyperplane through n points in n dimensions (bordered determinant).

    Raises DegeneratePointsError when the points are affinely dependent,
    i.e. lie on a common (n-2)-flat, which drives every cofactor to zero.
    """
    pts = np.asarray([as_vector(p) for p in points], dtype=float)
    n = pts.shape[0]
    if pts.shape != (n, n):
        raise DimensionMismatchError(
            f"need exactly n points of dimension n, got {pts.shape[0]} points "
            f"of dimension {pts.shape[1]}"
        )
    # Rows 2..n+1 of the bordered matrix: [point, 1].
    bordered = np.hstack([pts, np.ones((n, 1))])
    coeffs = np.empty(n + 1)
    for col in range(n + 1):
        minor = np.delete(bordered, col, axis=1)
        coeffs[col] = (-1.0) ** col * determinant(minor)
    weights, bias = coeffs[:n], coeffs[n]
    scale = coordinate_scale(pts)
    # Cofactors scale like coordinate^(n-1); normalize the test accordingly.
    if float(np.linalg.norm(weights)) <= EPS_DEGENERATE * scale ** (n - 1):
        raise DegeneratePointsError(
            "points are affinely dependent and define no unique hyperplane"
        )
    return Hyperplane(weights, bias)


def signed_displacement(h: Hyperplane, x) -> float:
    """Signed perpendicular distance of x from h.

    (weights . x + bias) / ||weights||; the sign says which side of the
    hyperplane x lies on, following the orientation of the coefficients.
    """
    x = as_vector(x)
    h._check_dim(x)
    return float((h.weights @ x + h.bias) / np.linalg.norm(h.weights))


def region_sign(h: Hyperplane, x) -> int:
    """-1, 0, or +1: which of the three regions x falls in.

    0 is returned only when |weights . x + bias| is within the on-plane
    tolerance, scaled to the magnitudes involved.
    """
    x = as_vector(x)
    h._check_dim(x)
    raw = float(h.weights @ x + h.bias)
    scale = max(
        1.0,
        float(np.max(np.abs(h.weights))) * (float(np.max(np.abs(x))) if x.size else 0.0),
        abs(h.bias),
    )
    if abs(raw) <= EPS_ON_PLANE * scale:
        return 0
    return 1 if raw > 0 else -1


def angle_between(u, v) -> float:
    """Angle in [0, pi] between two nonzero vectors."""
    u = as_vector(u)
    v = as_vector(v)
    if u.size != v.size:
        raise DimensionMismatchError(f"dimensions differ: {u.size} vs {v.size}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu <= EPS_DEGENERATE or nv <= EPS_DEGENERATE:
        raise ZeroVectorError("angle is undefined for a zero vector")
    c = float(u @ v) / (nu * nv)
    return float(np.arccos(np.clip(c, -1.0, 1.0)))
