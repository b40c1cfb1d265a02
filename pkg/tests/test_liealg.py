import numpy as np
import pytest

from homranders.errors import DimensionError, PreconditionError, ShapeError
from homranders.liealg import (
    LieAlgebra,
    RandersDatum,
    ReductiveSpace,
    align_basis,
    alignment_matrix,
    change_basis,
    orthonormalize,
    validate_algebra,
    validate_datum,
    validate_randers_vector,
    validate_reductive,
)

from oracles import bracket


def test_heisenberg_passes(h3):
    assert validate_algebra(h3.space.C).passed


def test_broken_antisymmetry_reported_at_123():
    C = np.zeros((3, 3, 3))
    C[0, 1, 2] = 1.0
    rep = validate_algebra(C)
    assert not rep.passed
    assert rep.violations[0].invariant == "antisymmetry"
    assert rep.violations[0].index == (1, 2, 3)


def test_su2_jacobi(su2):
    assert validate_algebra(su2.space.C).passed


def test_jacobi_failure_detected():
    # [e1,e2]=e2, [e1,e3]=e2, [e2,e3]=e1 is antisymmetric but not a Lie algebra
    alg = LieAlgebra.from_brackets(3, {(1, 2): {2: 1.0}, (1, 3): {2: 1.0}, (2, 3): {1: 1.0}})
    rep = validate_algebra(alg.C)
    assert any(v.invariant == "jacobi" for v in rep.violations)


def test_violations_ordered_lexicographically():
    C = np.zeros((3, 3, 3))
    C[0, 1, 2] = 1.0
    C[0, 2, 1] = 1.0
    idx = [v.index for v in validate_algebra(C).violations if v.invariant == "antisymmetry"]
    assert idx == sorted(idx)


def test_non_cubic_shape():
    with pytest.raises(ShapeError):
        validate_algebra(np.zeros((2, 3, 3)))


def test_validation_is_pure(hopf):
    d = hopf.datum([0, 0, 0.3])
    assert validate_datum(d) == validate_datum(d)


def test_trivial_h_passes_vacuously(h3):
    assert validate_reductive(h3.space).passed


def test_hopf_reductive_by_brute_force(hopf):
    C = hopf.space.C
    E = np.eye(4)
    lam = E[3]
    for i in range(3):
        br = bracket(C, lam, E[i])
        assert abs(br[3]) == 0.0  # [h, m] ⊂ m
        for j in range(3):
            assert br[j] + bracket(C, lam, E[j])[i] == 0.0  # skew on m
    assert validate_reductive(hopf.space).passed


def test_subalgebra_violation():
    # su(2) with h = span(e2, e3): [e2, e3] = e1 lies in m
    alg = LieAlgebra.from_brackets(3, {(1, 2): {3: 1.0}, (2, 3): {1: 1.0}, (1, 3): {2: -1.0}})
    rep = validate_reductive(ReductiveSpace(alg, 1))
    assert any(v.invariant == "subalgebra" for v in rep.violations)


def test_reductivity_violation():
    # [e1, e2] = e2 with h = span(e2): [h, m] lands in h
    alg = LieAlgebra.from_brackets(2, {(1, 2): {2: 1.0}})
    rep = validate_reductive(ReductiveSpace(alg, 1))
    assert [v.invariant for v in rep.violations] == ["reductivity"]


def test_isotropy_skew_violation():
    # [e1, e2] = e2, h = span(e1) acts on m = span(e2) by a non-skew scaling
    C = LieAlgebra.from_brackets(2, {(1, 2): {2: 1.0}}).C
    P = np.array([[0.0, 1.0], [1.0, 0.0]])
    alg = LieAlgebra(change_basis(C, P))
    rep = validate_reductive(ReductiveSpace(alg, 1))
    assert [v.invariant for v in rep.violations] == ["isotropy_skew"]


def test_dim_m_exceeds_dim_g():
    with pytest.raises(DimensionError):
        ReductiveSpace(LieAlgebra(np.zeros((2, 2, 2))), 3)


def test_norm_bound(h3):
    assert validate_randers_vector(h3.datum([0, 0, 0.5])).passed
    rep = validate_randers_vector(h3.datum([0, 0, 1.0]))
    assert [v.invariant for v in rep.violations] == ["norm_bound"]


def test_hopf_fixed_direction(hopf):
    assert validate_randers_vector(hopf.datum([0, 0, 0.3])).passed
    rep = validate_randers_vector(hopf.datum([0.3, 0, 0]))
    assert any(v.invariant == "isotropy_fixed" for v in rep.violations)


def test_align_identity_when_aligned(h3):
    d = h3.datum([0, 0, 0.4])
    assert align_basis(d) is d


def test_align_h3_first_axis(h3):
    d = align_basis(h3.datum([0.5, 0, 0]))
    assert d.is_aligned()
    assert np.isclose(d.c, 0.5)
    vals = np.unique(np.round(d.C, 12))
    assert set(vals) <= {-1.0, 0.0, 1.0}
    assert validate_datum(d).passed


def test_align_riemannian_returned(h3):
    d = h3.datum([0, 0, 0])
    assert align_basis(d) is d


def test_align_idempotent_and_norm(su2):
    rng = np.random.default_rng(3)
    for _ in range(10):
        u = rng.uniform(-0.5, 0.5, 3)
        d = align_basis(su2.datum(u))
        assert np.isclose(d.c, np.linalg.norm(u), atol=1e-14)
        assert align_basis(d) is d
        assert validate_datum(d, 1e-11).passed


def test_alignment_matrix_orthogonal(hopf):
    Q = alignment_matrix(RandersDatum(ReductiveSpace(LieAlgebra(np.zeros((3, 3, 3))), 3), np.array([0.1, 0.2, 0.3])))
    assert np.allclose(Q @ Q.T, np.eye(3))
    assert np.allclose(Q[:, -1], np.array([0.1, 0.2, 0.3]) / np.linalg.norm([0.1, 0.2, 0.3]))


def test_require_aligned(h3):
    with pytest.raises(PreconditionError):
        h3.datum([0.5, 0, 0]).require_aligned()


def test_orthonormalize_gram(h3):
    G = np.array([[2.0, 0.5, 0.0], [0.5, 1.0, 0.0], [0.0, 0.0, 3.0]])
    C2, L = orthonormalize(h3.space.C, 3, G)
    assert np.allclose(L.T @ G @ L, np.eye(3))
    assert validate_algebra(C2, 1e-11).passed


def test_brackets_roundtrip(hopf):
    alg = hopf.space.algebra
    assert np.array_equal(LieAlgebra.from_brackets(alg.dim, alg.brackets()).C, alg.C)


def test_from_brackets_rejects_order():
    with pytest.raises(ValueError):
        LieAlgebra.from_brackets(3, {(2, 1): {3: 1.0}})


def test_immutable(h3):
    with pytest.raises(ValueError):
        h3.space.C[0, 1, 2] = 5.0


def test_isotropy_block_skew(entries):
    for e in entries:
        n = e.space.n
        blk = e.space.C[n:, :n, :n]
        assert np.array_equal(blk, -np.transpose(blk, (0, 2, 1)))
