"""Numeric Finsler geometry of a Randers metric field.

Works with any :class:`~homranders.chart.MetricField`.  Derivatives in y are
exact (jets of order 4 around the base direction); derivatives in x use the
Richardson central difference of :mod:`homranders.derivatives`.

Spray coefficients use the standard formula with the inverse fundamental
tensor, ``G^i = 1/4 g^{il} ([F^2]_{x^m y^l} y^m - [F^2]_{x^l})``.
"""
from __future__ import annotations

import warnings

import numpy as np

from .chart import SECOND_ORDER_STEP, MetricField
from .derivatives import (
    DEFAULT_STEP,
    PLAIN_WEIGHTS,
    RICHARDSON_TOL,
    apply_stencil,
    jet_space,
    stencil_points,
)
from .errors import FinslerDomainError, NumericalAccuracyWarning

JET_ORDER = 4
SAMPLE_SEED = 20090601
SAMPLE_COUNT = 40
DEFECT_THRESHOLD = 1e-4
DEFECT_GUARD = 1e-6


def _check_direction(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise FinslerDomainError("F is not smooth at y = 0")
    return y


def randers_norm(a, b, y) -> float:
    y = _check_direction(y)
    a = np.asarray(a, dtype=float)
    return float(np.sqrt(y @ a @ y) + np.asarray(b, dtype=float) @ y)


def _stack(field: MetricField, points) -> tuple[np.ndarray, np.ndarray]:
    pts = np.asarray(points, dtype=float)
    flat = pts.reshape(-1, pts.shape[-1])
    a = np.array([field.a(p) for p in flat])
    b = np.array([field.b(p) for p in flat])
    n = pts.shape[-1]
    return a.reshape(pts.shape[:-1] + (n, n)), b.reshape(pts.shape[:-1] + (n,))


def _f2_jets(js, a, b, y) -> np.ndarray:
    """Jets of F^2(x, y + η) for arrays a (..., n, n), b (..., n)."""
    Y = js.affine(y)
    YY = js.mul(Y[:, None, :], Y[None, :, :])
    alpha2 = np.einsum("...ij,ijk->...k", a, YY)
    beta = np.einsum("...i,ik->...k", b, Y)
    F = js.sqrt(alpha2) + beta
    return js.mul(F, F)


def _spray_jets(field: MetricField, X, y, h: float, order: int) -> np.ndarray:
    """Jets of G^i(X_p, y + η) valid to ``order``, shape (P, n, size).

    F² is expanded to order + 2 at the points themselves (two y-derivatives
    enter g) and to order + 1 on the stencil.  Monomials are stored by
    degree, so truncation to a lower order is a prefix slice.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = X.shape[-1]
    js, jsE, jsX = jet_space(n, order), jet_space(n, order + 2), jet_space(n, order + 1)
    k = js.size
    st = np.array([stencil_points(x, h) for x in X])  # (P, 4n, n)
    a0, b0 = _stack(field, X)
    a1, b1 = _stack(field, st)
    g = 0.5 * jsE.grad(jsE.grad(_f2_jets(jsE, a0, b0, y)))[..., :k]  # (P, i, j, size)
    Ex = apply_stencil(_f2_jets(jsX, a1, b1, y), n, h, axis=1)  # (P, m, size): ∂_{x^m} F^2
    dEx = jsX.grad(Ex)[..., :k]  # (P, m, l, size) = ∂_{y^l} ∂_{x^m} F^2
    Y = js.affine(y)
    term = js.mul(Y[None, :, None, :], dEx).sum(axis=1)
    rhs = term - Ex[..., :k]
    return 0.25 * js.matvec(js.inv(g), rhs)


def fundamental_tensor(field: MetricField, x, y) -> np.ndarray:
    y = _check_direction(y)
    js = jet_space(y.size, 2)
    a, b = _stack(field, np.asarray(x, dtype=float)[None])
    return 0.5 * js.hessian(_f2_jets(js, a, b, y))[0]


def spray_coefficients(field: MetricField, x, y, h: float = DEFAULT_STEP) -> np.ndarray:
    y = _check_direction(y)
    return _spray_jets(field, np.asarray(x, dtype=float)[None], y, h, 0)[0, :, 0]


def _curvature_from_jets(js, Gc, dxG, y) -> np.ndarray:
    G = js.value(Gc)
    dyG = js.gradient(Gc)  # [i, m] = ∂_{y^m} G^i
    dyyG = js.hessian(Gc)  # [i, m, k]
    dx = js.value(dxG)  # [k, i] = ∂_{x^k} G^i
    dxdy = js.gradient(dxG)  # [m, i, k] = ∂_{x^m} ∂_{y^k} G^i
    return (
        2.0 * dx.T
        - np.einsum("mik,m->ik", dxdy, y)
        + 2.0 * np.einsum("m,imk->ik", G, dyyG)
        - dyG @ dyG
    )


def riemann_curvature(field: MetricField, x, y, h: float = SECOND_ORDER_STEP) -> np.ndarray:
    """Riemann curvature R^i_k(x, y) as ``R[i, k]``."""
    y = _check_direction(y)
    x = np.asarray(x, dtype=float)
    n = y.size
    js = jet_space(n, JET_ORDER - 2)
    X = np.vstack([x[None], stencil_points(x, h)])
    Gj = _spray_jets(field, X, y, h, JET_ORDER - 2)
    dxG = apply_stencil(Gj[1:], n, h, axis=0)
    R = _curvature_from_jets(js, Gj[0], dxG, y)
    plain = _curvature_from_jets(js, Gj[0], apply_stencil(Gj[1:], n, h, axis=0, weights=PLAIN_WEIGHTS), y)
    gap = float(np.max(np.abs(R - plain)))
    if gap > RICHARDSON_TOL:
        warnings.warn(f"curvature: Richardson disagreement {gap:.2e}", NumericalAccuracyWarning, stacklevel=2)
    return R


def ricci(field: MetricField, x, y, h: float = SECOND_ORDER_STEP) -> float:
    return float(np.trace(riemann_curvature(field, x, y, h)))


def sample_pairs(n: int, count: int = SAMPLE_COUNT, seed: int = SAMPLE_SEED) -> list[tuple[np.ndarray, np.ndarray]]:
    """Fixed sample set: ``count`` seeded random unit pairs, then the coordinate-axis pairs."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        v = rng.standard_normal((2, n))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        out.append((v[0], v[1]))
    eye = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            out.append((eye[i], eye[j]))
    return out


def _parallelogram(q, samples) -> float:
    worst = 0.0
    for y1, y2 in samples:
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        if min(np.linalg.norm(y1 + y2), np.linalg.norm(y1 - y2)) < 1e-9 or not np.any(y1) or not np.any(y2):
            warnings.warn("degenerate sample pair skipped", RuntimeWarning, stacklevel=3)
            continue
        q1, q2 = np.asarray(q(y1)), np.asarray(q(y2))
        num = np.abs(np.asarray(q(y1 + y2)) + np.asarray(q(y1 - y2)) - 2.0 * q1 - 2.0 * q2)
        worst = max(worst, float(np.max(num / (np.abs(q1) + np.abs(q2) + 1.0))))
    return worst


def quadraticity_defect(q, samples) -> float:
    """Largest normalised parallelogram-law violation of a 2-homogeneous function."""
    return _parallelogram(q, samples)


def berwald_defect(field: MetricField, x, samples, h: float = DEFAULT_STEP) -> float:
    """Parallelogram defect of y -> G^i(x, y), maximised over components and samples."""
    return _parallelogram(lambda y: spray_coefficients(field, x, y, h), samples)


def ricci_defect(field: MetricField, x, samples, h: float = SECOND_ORDER_STEP) -> float:
    return quadraticity_defect(lambda y: ricci(field, x, y, h), samples)


def defect_verdict(defect: float, threshold: float = DEFECT_THRESHOLD, guard: float = DEFECT_GUARD):
    """True (quadratic), False (not quadratic) or None (inside the guard band)."""
    if defect <= guard:
        return True
    if defect > threshold:
        return False
    return None
