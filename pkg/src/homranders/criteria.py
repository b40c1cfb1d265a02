"""Algebraic Berwald and Ricci-quadratic tests for homogeneous Randers data.

The Berwald test is the pair of bracket conditions

* qric_1: ``<[y, u]_m, y> = 0`` for all y in m,
* qric_2: ``<[u_k, u_l]_m, u> = 0`` for all k, l,

cross-checked against parallelism of β at o.  The Ricci-quadratic test
evaluates the two conditions

    r_00 + 2 s_0 β = 2 c̃ (α² - β²),     s^k_{0|k} = (n - 1) A_0,

at the origin, deriving c̃(o) and its first derivatives from the first
condition instead of assuming them.  The two tests share no code path beyond
the Randers tensors, which makes :func:`equivalence_check` a meaningful
machine check of the equivalence between them.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .connection import connection_origin
from .errors import InternalConsistencyError, TheoremViolationError
from .liealg import RandersDatum, align_basis
from .randers import randers_tensors_full, randers_tensors_origin

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class CriteriaReport:
    qric1_holds: bool
    qric1_residual: float
    qric1_witness: tuple[int, int] | None
    qric2_holds: bool
    qric2_residual: float
    qric2_witness: tuple[int, int] | None
    berwald: bool
    parallel_form: bool
    parallel_residual: float
    ricci_quadratic: bool
    condition1_holds: bool
    condition1_residual: float
    c_tilde_origin: float
    c_tilde_derivative: tuple[float, ...] | None
    derivative_fit_residual: float | None
    A0_origin: float | None
    S_norm: float
    condition2_residual: float | None
    riemannian: bool

    def as_dict(self) -> dict:
        out = asdict(self)
        for key in ("qric1_witness", "qric2_witness", "c_tilde_derivative"):
            if out[key] is not None:
                out[key] = list(out[key])
        return out


def _witness(idx) -> tuple[int, int]:
    return (int(idx[0]) + 1, int(idx[1]) + 1)


def qric1_test(datum: RandersDatum, tol: float = DEFAULT_TOL) -> tuple[bool, float, tuple[int, int] | None]:
    """``M_ij = <[e_i, u]_m, e_j> + <[e_j, u]_m, e_i>`` must vanish; witness is 1-based."""
    n = datum.n
    Cm = datum.C[:n, :n, :n]
    B = np.einsum("ikj,k->ij", Cm, datum.u)  # <[e_i, u]_m, e_j>
    M = np.abs(B + B.T)
    res = float(M.max()) if M.size else 0.0
    if res == 0.0:
        return True, 0.0, None
    wit = _witness(np.unravel_index(int(np.argmax(np.triu(M))), M.shape))
    return res <= tol, res, wit


def qric2_test(datum: RandersDatum, tol: float = DEFAULT_TOL) -> tuple[bool, float, tuple[int, int] | None]:
    """Largest ``|<[e_k, e_l]_m, u>|`` over k < l; witness is 1-based."""
    n = datum.n
    P = np.abs(np.triu(np.einsum("kli,i->kl", datum.C[:n, :n, :n], datum.u), 1))
    res = float(P.max()) if P.size else 0.0
    if res == 0.0:
        return True, 0.0, None
    return res <= tol, res, _witness(np.unravel_index(int(np.argmax(P)), P.shape))


def berwald_test(datum: RandersDatum, tol: float = DEFAULT_TOL) -> dict:
    q1, r1, w1 = qric1_test(datum, tol)
    q2, r2, w2 = qric2_test(datum, tol)
    if datum.c == 0.0:
        par, pres = True, 0.0
    else:
        tens = randers_tensors_origin(align_basis(datum))
        pres = float(np.max(np.abs(tens.bij)))
        par = pres <= tol
    berwald = q1 and q2
    if par != berwald:
        raise InternalConsistencyError(
            f"bracket criteria give berwald={berwald} but max|b_i|j(o)| = {pres:.3e}"
        )
    return {
        "qric1_holds": q1,
        "qric1_residual": r1,
        "qric1_witness": w1,
        "qric2_holds": q2,
        "qric2_residual": r2,
        "qric2_witness": w2,
        "berwald": berwald,
        "parallel_form": par,
        "parallel_residual": pres,
    }


def _sym3(T) -> np.ndarray:
    return (
        T
        + np.transpose(T, (0, 2, 1))
        + np.transpose(T, (1, 0, 2))
        + np.transpose(T, (1, 2, 0))
        + np.transpose(T, (2, 0, 1))
        + np.transpose(T, (2, 1, 0))
    ) / 6.0


def ricci_quadratic_test(datum: RandersDatum, tol: float = DEFAULT_TOL) -> dict:
    """Origin evaluation of both Ricci-quadratic conditions; expects an aligned datum."""
    n = datum.n
    if datum.c == 0.0:
        return {
            "ricci_quadratic": True,
            "condition1_holds": True,
            "condition1_residual": 0.0,
            "c_tilde_origin": 0.0,
            "c_tilde_derivative": tuple([0.0] * n),
            "derivative_fit_residual": 0.0,
            "A0_origin": 0.0,
            "S_norm": 0.0,
            "condition2_residual": 0.0,
        }
    datum.require_aligned()
    c = datum.c
    conn = connection_origin(datum.space)
    tens = randers_tensors_full(datum, conn)
    b = tens.b
    eye = np.eye(n)
    last = n - 1

    # first condition at o, with c̃(o) read off at y = u
    quad = tens.r + np.outer(tens.s_vec, b) + np.outer(b, tens.s_vec)
    ct = float(quad[last, last] / (2.0 * (1.0 - c * c)))  # (r00 + 2 s0 β)(u) / (2(c² - c⁴)) with u = c e_n
    Q = quad - 2.0 * ct * (eye - np.outer(b, b))
    cond1_res = float(np.max(np.abs(Q)))
    out = {
        "condition1_holds": cond1_res <= tol,
        "condition1_residual": cond1_res,
        "c_tilde_origin": ct,
    }
    if not out["condition1_holds"]:
        out.update(
            ricci_quadratic=False,
            c_tilde_derivative=None,
            derivative_fit_residual=None,
            A0_origin=None,
            S_norm=float(np.linalg.norm(tens.S)),
            condition2_residual=None,
        )
        return out

    # derivative of the first condition along y:
    # ∂_0 r_00 + 2 β ∂_0 s_0 + 2 s_0 ∂_0 β = 2 c̃_0 (α² - β²) + 2 c̃ ∂_0 (α² - β²)
    # b^i = c δ^i_n everywhere, so ∂_k s_0 = c ∂_k s_{n0}; ∂_k a_ij(o) = Γ_ki^j + Γ_kj^i
    G = conn.gamma
    da = G + np.transpose(G, (0, 2, 1))  # [k, i, j]
    db = c * da[:, last, :]  # ∂_k b_j = c ∂_k a_nj
    lhs = tens.dbij + 2.0 * c * np.einsum("i,kj->kij", b, tens.dskj[:, last, :])
    lhs += 2.0 * np.einsum("i,kj->kij", tens.s_vec, db)
    lhs = lhs - 2.0 * ct * (da - np.einsum("ki,j->kij", db, b) - np.einsum("i,kj->kij", b, db))
    target = _sym3(lhs).ravel()
    basis = np.array([_sym3(np.einsum("k,ij->kij", eye[p], eye - np.outer(b, b))) for p in range(n)])
    design = 2.0 * basis.reshape(n, -1).T
    ck, *_ = np.linalg.lstsq(design, target, rcond=None)
    fit_res = float(np.max(np.abs(design @ ck - target)))

    A = 2.0 * ct * tens.s_vec + ct * ct * b + tens.t_vec + 0.5 * ck
    cond2 = tens.S - (n - 1) * A
    cond2_res = float(np.max(np.abs(cond2)))
    out.update(
        ricci_quadratic=fit_res <= tol and cond2_res <= tol,
        c_tilde_derivative=tuple(float(v) for v in ck),
        derivative_fit_residual=fit_res,
        A0_origin=float(np.linalg.norm(A)),
        S_norm=float(np.linalg.norm(tens.S)),
        condition2_residual=cond2_res,
    )
    return out


def equivalence_check(datum: RandersDatum, tol: float = DEFAULT_TOL) -> CriteriaReport:
    """Run both tests independently; disagreement raises :class:`TheoremViolationError`."""
    bw = berwald_test(datum, tol)
    rq = ricci_quadratic_test(align_basis(datum), tol)
    if bw["berwald"] != rq["ricci_quadratic"]:
        raise TheoremViolationError(
            f"berwald={bw['berwald']} but ricci_quadratic={rq['ricci_quadratic']} "
            f"(qric residuals {bw['qric1_residual']:.3e}, {bw['qric2_residual']:.3e}; "
            f"first condition residual {rq['condition1_residual']:.3e}; cond2 residual {rq['condition2_residual']})"
        )
    return CriteriaReport(riemannian=datum.c == 0.0, **bw, **rq)
