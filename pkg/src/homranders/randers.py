"""Randers tensors of an invariant metric at the origin.

All functions expect an aligned datum (``u = c e_n``, see
:func:`homranders.liealg.align_basis`); at o the metric a_ij is the identity,
so index raising is trivial.  The index "0" of the classical notation
(contraction with y) is kept as an explicit array axis: a quantity linear in
y is returned as the covector of its coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connection import ConnectionOrigin, connection_origin, f_matrix
from .liealg import RandersDatum


@dataclass(frozen=True)
class RandersTensors:
    b: np.ndarray
    bij: np.ndarray
    r: np.ndarray
    s: np.ndarray
    s_vec: np.ndarray
    t_vec: np.ndarray
    dbij: np.ndarray | None = None
    dskj: np.ndarray | None = None
    S: np.ndarray | None = None


def _conn(datum: RandersDatum, conn: ConnectionOrigin | None) -> ConnectionOrigin:
    return connection_origin(datum.space) if conn is None else conn


def randers_tensors_origin(datum: RandersDatum, conn: ConnectionOrigin | None = None) -> RandersTensors:
    """b_i, b_{i|j}, r_ij, s_ij, s_i and t_i at o."""
    datum.require_aligned()
    conn = _conn(datum, conn)
    n, c = datum.n, datum.c
    b = np.zeros(n)
    b[-1] = c
    # b_{i|j} = c Γ_nj^i
    bij = c * conn.gamma[n - 1].T
    r = 0.5 * (bij + bij.T)
    s = 0.5 * (bij - bij.T)
    s_vec = c * s[n - 1]
    t_vec = s_vec @ s
    return RandersTensors(b=b, bij=bij, r=r, s=s, s_vec=s_vec, t_vec=t_vec)


def d_bij_origin(datum: RandersDatum, conn: ConnectionOrigin | None = None) -> np.ndarray:
    """∂b_{i|j}/∂x^k at o as ``D[k, i, j]``."""
    datum.require_aligned()
    conn = _conn(datum, conn)
    n, c, C = datum.n, datum.c, datum.C
    N = conn.nabla
    F = f_matrix(n)
    last = n - 1
    D = (
        np.einsum("ki,kis,js->kij", F, C[:n, :n, :n], conn.gamma[last])
        + np.einsum("kj,kja,ai->kij", F, C[:n, :n, :], N[last])
        + np.einsum("ks,sji->kij", C[:n, last, :n], N[:n, :n, :])
        + np.transpose(conn.uk_nabla[:, last], (0, 2, 1))
    )
    return c * D


def d_bij_from_dgamma(datum: RandersDatum, conn: ConnectionOrigin | None = None) -> np.ndarray:
    """Same quantity as :func:`d_bij_origin` via c(∂_k Γ_nj^i + Γ_nj^s ∂_k a_si)."""
    datum.require_aligned()
    conn = _conn(datum, conn)
    G, dG = conn.gamma, conn.dgamma
    last = datum.n - 1
    da = G + np.transpose(G, (0, 2, 1))  # ∂_k a_si = Γ_ks^i + Γ_ki^s
    return datum.c * (np.transpose(dG[:, last], (0, 2, 1)) + np.einsum("js,ksi->kij", G[last], da))


def d_s_origin(datum: RandersDatum) -> np.ndarray:
    """``dS[i, k, j]`` with ∂s_{k0}/∂x^i = dS[i, k, j] y^j at o.

    Valid when ⟨[y, u]_m, y⟩ = 0 for all y; the flag f(i, 0) is applied to
    the contracted index inside the sum.
    """
    datum.require_aligned()
    n, c, C = datum.n, datum.c, datum.C
    Cm = C[:n, :n, :n]
    Cn = Cm[:, :, n - 1]  # C_ab^n
    F = f_matrix(n)
    out = (
        np.einsum("ik,iks,sj->ikj", F, Cm, Cn)
        + np.einsum("ij,ijs,ks->ikj", F, Cm, Cn)
        + np.einsum("jks,is->ikj", Cm, Cn)
    )
    return 0.5 * c * out


def s_divergence_origin(datum: RandersDatum, conn: ConnectionOrigin | None = None) -> np.ndarray:
    """Covector S with S_j y^j = s^k_{0|k}(o) (closed form, valid when qric_1 holds)."""
    datum.require_aligned()
    n, c, C = datum.n, datum.c, datum.C
    Cm = C[:n, :n, :n]
    last = n - 1
    trace = np.einsum("klk->l", Cm)  # sum_k C_kl^k
    first = np.einsum("lj,l->j", Cm[:, :, last], trace)
    inner = np.einsum("jkl->klj", Cm) + np.einsum("jlk->klj", Cm) + Cm  # C_jk^l + C_jl^k + C_kl^j
    second = 0.5 * np.einsum("kl,klj->j", Cm[:, :, last], inner)
    return 0.5 * c * (first + second)


def randers_tensors_full(datum: RandersDatum, conn: ConnectionOrigin | None = None) -> RandersTensors:
    """Every field of :class:`RandersTensors`, derivatives included."""
    conn = _conn(datum, conn)
    base = randers_tensors_origin(datum, conn)
    return RandersTensors(
        b=base.b,
        bij=base.bij,
        r=base.r,
        s=base.s,
        s_vec=base.s_vec,
        t_vec=base.t_vec,
        dbij=d_bij_origin(datum, conn),
        dskj=d_s_origin(datum),
        S=s_divergence_origin(datum, conn),
    )


def contract3(T, y) -> float:
    """T[k, i, j] y^k y^i y^j."""
    return float(np.einsum("kij,k,i,j->", T, y, y, y))
