import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artinian import linalg as la
from artinian import matgrp as mg
from artinian.pointsets import SizeGuardError
from artinian.rings import ring_make

# |GL_n(F_q)| * q^((r-1) n^2), computed by hand
KNOWN = [
    (mg.GL, 2, "F3[t]/t^2", 3888),
    (mg.GL, 3, "F2[t]/t^2", 86016),
    (mg.SL, 2, "Z/4", 48),
    (mg.GL, 2, "Z/8", 1536),
    (mg.GL, 2, "F2", 6),
    (mg.SL, 2, "F3", 24),
    (mg.SL, 2, "Z/9", 648),
    (mg.GL, 1, "Z/9", 6),
    (mg.GL, 2, "F4", 180),
]


@pytest.mark.parametrize("kind,n,spec,order", KNOWN)
def test_enumeration_counts(kind, n, spec, order):
    G = mg.ambient_group(kind, n, ring_make(spec))
    assert G.order() == order
    S = G.enumerate()
    assert len(S) == order
    assert G.contains(S.matrices).all()


def test_order_formula():
    for q, r, n in itertools.product((2, 3, 4), (1, 2, 3), (1, 2, 3)):
        base = 1
        for i in range(n):
            base *= q**n - q**i
        assert mg.gl_order(n, q, r) == base * q ** ((r - 1) * n * n)


PATTERN_CASES = [(spec, n) for spec in ("F2[t]/t^2", "Z/4", "F3[t]/t^2", "Z/8") for n in (2, 3)
                 if not (n == 3 and spec in ("F3[t]/t^2", "Z/8"))]


@pytest.mark.parametrize("spec,n", PATTERN_CASES)
@pytest.mark.parametrize("kind", [mg.GL, mg.SL])
def test_patterns_match_closed_forms(spec, n, kind):
    A = ring_make(spec)
    patterns = [mg.torus(kind, n, A), mg.borel(kind, n, A), mg.unipotent(kind, n, A),
                mg.monomial(kind, n, A), mg.congruence_kernel(kind, n, A, 1)]
    if n == 3:
        patterns.append(mg.parabolic(kind, (2, 1), A))
    G = mg.ambient_group(kind, n, A)
    for P in patterns:
        S = P.enumerate()
        assert len(S) == P.order(), P.label
        assert G.contains(S.matrices).all()
        assert S.is_subgroup()


def test_borel_counts_by_hand():
    # upper triangular over F2[t]/t^2: 2 unit diagonal entries (2 choices each), 1 free entry (4)
    A = ring_make("F2[t]/t^2")
    assert mg.borel(mg.GL, 2, A).order() == 16
    assert mg.torus(mg.GL, 2, A).order() == 4
    assert mg.monomial(mg.GL, 2, A).order() == 8


@pytest.mark.parametrize("kind", [mg.GL, mg.SL])
@pytest.mark.parametrize("spec", ["F3[t]/t^2", "Z/9"])
def test_reduction_fibers_are_equal(kind, spec):
    A = ring_make(spec)
    G = mg.ambient_group(kind, 2, A)
    S = G.enumerate()
    red = la.reduce_entries(A, S.matrices, 1)
    _, counts = np.unique(red.reshape(len(red), -1), axis=0, return_counts=True)
    assert len(counts) == G.at_length(1).order()
    assert set(counts.tolist()) == {A.q**G.dim}


@pytest.mark.parametrize("kind", [mg.GL, mg.SL])
@pytest.mark.parametrize("spec", ["F3[t]/t^3", "Z/27", "F4[t]/t^2", "Z/8"])
def test_lift_point_round_trip(kind, spec, rng):
    A = ring_make(spec)
    for length in range(1, A.length):
        k = A.truncate(length)
        pts = mg.ambient_group(kind, 3 if A.cardinality < 30 else 2, k).random(rng, 100)
        for g in pts:
            h = mg.lift_point(k, la.Matrix(k, g), kind, A)
            assert mg.ambient_group(kind, h.n, A).contains(h.entries)[0]
            assert mg.reduce_hom(h, length) == la.Matrix(k, g)


def test_lift_point_rejects_non_members():
    k, A = ring_make("F3"), ring_make("F3[t]/t^2")
    with pytest.raises(mg.NotAGroupElement):
        mg.lift_point(k, la.Matrix(k, [[1, 0], [0, 2]]), mg.SL, A)
    with pytest.raises(ValueError):
        mg.lift_point(k, la.Matrix.identity(k, 2), mg.GL, ring_make("Z/9"))


@settings(max_examples=30)
@given(st.sampled_from(["Z/8", "F2[t]/t^3", "F3[t]/t^2"]), st.sampled_from([mg.GL, mg.SL]),
       st.integers(0, 2**32 - 1))
def test_reduction_preserves_products(spec, kind, seed):
    A = ring_make(spec)
    rng = np.random.default_rng(seed)
    G = mg.ambient_group(kind, 2, A)
    x, y = G.random(rng, 2)
    for length in range(1, A.length + 1):
        X, Y = la.Matrix(A, x), la.Matrix(A, y)
        assert mg.reduce_hom(X @ Y, length) == mg.reduce_hom(X, length) @ mg.reduce_hom(Y, length)
        assert G.at_length(length).contains(mg.reduce_hom(X, length).entries)[0]


def test_random_elements_are_members(rng):
    A = ring_make("Z/8")
    for kind in (mg.GL, mg.SL):
        G = mg.ambient_group(kind, 3, A)
        assert G.contains(G.random(rng, 200)).all()


def test_guard():
    A = ring_make("Z/8")
    with pytest.raises(SizeGuardError):
        mg.general_linear(3, A).enumerate(guard=1000)


def test_block_diagonal_parabolic():
    A = ring_make("F2[t]/t^2")
    P = mg.parabolic(mg.GL, (2, 1), A)
    L = mg.block_diagonal(A, (mg.general_linear(2, A).enumerate().matrices[:5],
                              np.full((5, 1, 1), A.one_index)))
    assert P.contains(L).all()
