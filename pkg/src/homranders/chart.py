"""Product-of-exponentials chart around the origin and the metric field it induces.

A point ``(x^1, ..., x^n)`` of the chart is the coset
``exp(x^1 u_1) ... exp(x^n u_n) H``.  Everything here works with adjoint
matrices only; the group itself is never represented.

Besides the metric field, this module provides finite-difference versions
of the connection and Randers tensors.  They are the independent ground
truth the closed formulas in :mod:`connection` and :mod:`randers` are checked
against.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .derivatives import DEFAULT_STEP, central_diff
from .errors import ChartDomainError
from .liealg import LieAlgebra, RandersDatum, ReductiveSpace

CHART_RADIUS = 0.5
SECOND_ORDER_STEP = 1e-3
_TAYLOR_TERMS = 18


def expm(A) -> np.ndarray:
    """Matrix exponential: scaling and squaring around an 18-term Taylor series."""
    A = np.asarray(A, dtype=float)
    norm = np.linalg.norm(A, 1)
    s = 0
    if norm > 0.5:
        s = int(np.ceil(np.log2(norm / 0.5)))
    B = A / 2.0**s
    out = np.eye(A.shape[0])
    term = np.eye(A.shape[0])
    for k in range(1, _TAYLOR_TERMS + 1):
        term = term @ B / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def ad_matrix(algebra: LieAlgebra, a: int) -> np.ndarray:
    """Matrix of ad(u_a) acting on coordinate vectors: entry [c, b] = C_ab^c."""
    return algebra.C[a].T.copy()


def _exponentials(space: ReductiveSpace, x, sign: float = 1.0) -> list[np.ndarray]:
    return [expm(sign * x[k] * ad_matrix(space.algebra, k)) for k in range(space.n)]


def frame_coefficients(space: ReductiveSpace, x) -> np.ndarray:
    """``f[i, a]`` with ``f_i^a u_a = e^{x^1 ad u_1} ... e^{x^{i-1} ad u_{i-1}} u_i``."""
    x = np.asarray(x, dtype=float)
    n, m = space.n, space.m
    E = _exponentials(space, x)
    out = np.zeros((n, m))
    P = np.eye(m)
    for i in range(n):
        out[i] = P[:, i]
        P = P @ E[i]
    return out


def translated_frame(space: ReductiveSpace, x) -> np.ndarray:
    """Rows w_i(x) = [Ad(g^{-1}) f_i^a u_a]_m: the coordinate fields moved back to o."""
    x = np.asarray(x, dtype=float)
    Einv = _exponentials(space, x, -1.0)
    ad_ginv = np.eye(space.m)
    for Ek in Einv:
        ad_ginv = Ek @ ad_ginv
    f = frame_coefficients(space, x)
    return (f @ ad_ginv.T)[:, : space.n]


def check_radius(x, radius: float = CHART_RADIUS):
    r = float(np.linalg.norm(x))
    if r > radius:
        raise ChartDomainError(f"chart point |x| = {r:.3g} exceeds chart radius {radius}")


def metric_at(datum: RandersDatum, x, radius: float = CHART_RADIUS) -> tuple[np.ndarray, np.ndarray]:
    """(a_ij(x), b_i(x)) of the invariant Randers metric in chart coordinates."""
    x = np.asarray(x, dtype=float)
    check_radius(x, radius)
    W = translated_frame(datum.space, x)
    a = W @ W.T
    if np.linalg.eigvalsh(a)[0] <= 1e-12:
        raise ChartDomainError("metric is no longer positive definite: chart left its domain")
    b = W @ datum.u
    return a, b


@dataclass(frozen=True)
class MetricField:
    """A Randers metric field ``F = sqrt(a(x)(y, y)) + b(x) y`` given by callables."""

    a: Callable[[np.ndarray], np.ndarray]
    b: Callable[[np.ndarray], np.ndarray]
    c: float
    dim: int


def metric_field(datum: RandersDatum, radius: float = CHART_RADIUS) -> MetricField:
    """Chart metric of a datum; evaluations are memoised since stencils revisit points."""
    store: dict = {}

    def both(x):
        key = np.asarray(x, dtype=float).tobytes()
        hit = store.get(key)
        if hit is None:
            if len(store) > 100_000:
                store.clear()
            hit = store[key] = metric_at(datum, x, radius)
        return hit

    return MetricField(a=lambda x: both(x)[0], b=lambda x: both(x)[1], c=datum.c, dim=datum.n)


def constant_field(a, b) -> MetricField:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return MetricField(a=lambda x: a, b=lambda x: b, c=float(np.sqrt(b @ np.linalg.solve(a, b))), dim=b.size)


# ---------------------------------------------------------------------------
# finite-difference oracles on a metric field


def christoffel(field: MetricField, x, h: float = DEFAULT_STEP) -> np.ndarray:
    """Γ_ij^l(x) of a(x) as ``G[i, j, l]``."""
    x = np.asarray(x, dtype=float)
    da = central_diff(field.a, x, h)  # da[k, i, j] = ∂_k a_ij
    ainv = np.linalg.inv(field.a(x))
    low = 0.5 * (da + np.transpose(da, (1, 0, 2)) - np.transpose(da, (1, 2, 0)))
    return np.einsum("ijk,kl->ijl", low, ainv)


def christoffel_derivative(field: MetricField, x, h: float = SECOND_ORDER_STEP, h_inner: float | None = None) -> np.ndarray:
    """∂_k Γ_ij^l(x) as ``dG[k, i, j, l]`` (nested differences)."""
    hi = h if h_inner is None else h_inner
    return central_diff(lambda z: christoffel(field, z, hi), x, h)


def beta_covariant(field: MetricField, x, h: float = DEFAULT_STEP) -> np.ndarray:
    """b_{i|j}(x) = ∂_j b_i - b_l Γ_ij^l as ``B[i, j]``."""
    x = np.asarray(x, dtype=float)
    db = central_diff(field.b, x, h)  # db[j, i] = ∂_j b_i
    return db.T - np.einsum("l,ijl->ij", field.b(x), christoffel(field, x, h))


def beta_covariant_derivative(field: MetricField, x, h: float = SECOND_ORDER_STEP, h_inner: float | None = None) -> np.ndarray:
    """∂_k b_{i|j}(x) as ``D[k, i, j]``."""
    hi = h if h_inner is None else h_inner
    return central_diff(lambda z: beta_covariant(field, z, hi), x, h)


def s_tensor(field: MetricField, x, h: float = DEFAULT_STEP) -> np.ndarray:
    B = beta_covariant(field, x, h)
    return 0.5 * (B - B.T)


def s_divergence(field: MetricField, x, h: float = SECOND_ORDER_STEP, h_inner: float | None = None) -> np.ndarray:
    """Covector S_j = a^{kp} s_{pj|k}(x), so that S_j y^j = s^k_{0|k}."""
    x = np.asarray(x, dtype=float)
    hi = h if h_inner is None else h_inner
    ds = central_diff(lambda z: s_tensor(field, z, hi), x, h)  # ds[m, p, j]
    G = christoffel(field, x, hi)
    s = s_tensor(field, x, hi)
    cov = ds - np.einsum("mpl,lj->mpj", G, s) - np.einsum("mjl,pl->mpj", G, s)
    return np.einsum("kp,kpj->j", np.linalg.inv(field.a(x)), cov)


# ---------------------------------------------------------------------------
# fundamental (Killing) vector fields in chart coordinates


def killing_components(space: ReductiveSpace, v, x) -> np.ndarray:
    """Coordinates ξ^i of the fundamental field v̂ at the chart point x.

    v̂ at gH translated back to o is [Ad(g^{-1}) v]_m; solving against the
    translated frame gives its components along ∂/∂x^i.
    """
    x = np.asarray(x, dtype=float)
    Einv = _exponentials(space, x, -1.0)
    ad_ginv = np.eye(space.m)
    for Ek in Einv:
        ad_ginv = Ek @ ad_ginv
    target = (ad_ginv @ np.asarray(v, dtype=float))[: space.n]
    W = translated_frame(space, x)
    return np.linalg.solve(W.T, target)


def killing_nabla_fd(space: ReductiveSpace, a: int, b: int, l: int, x=None, h: float = DEFAULT_STEP) -> float:
    """<∇_{û_a} û_b, û_l> at x from the chart metric (finite differences)."""
    n, m = space.n, space.m
    x = np.zeros(n) if x is None else np.asarray(x, dtype=float)
    datum = RandersDatum(space, np.zeros(n))
    fld = metric_field(datum)
    e = np.eye(m)
    X = killing_components(space, e[a], x)
    Z = killing_components(space, e[l], x)
    dY = central_diff(lambda z: killing_components(space, e[b], z), x, h)  # dY[q, p]
    Y = killing_components(space, e[b], x)
    G = christoffel(fld, x, h)
    nab = X @ dY + np.einsum("qrp,q,r->p", G, X, Y)
    return float(nab @ fld.a(x) @ Z)


def uk_nabla_fd(space: ReductiveSpace, k: int, i: int, j: int, l: int, h: float = SECOND_ORDER_STEP) -> float:
    """û_k <∇_{û_i} û_j, û_l> at o: derivative of the chart value along ∂/∂x^k."""
    n = space.n
    grad = central_diff(lambda z: np.array(killing_nabla_fd(space, i, j, l, z, h)), np.zeros(n), h)
    return float(grad[k])
