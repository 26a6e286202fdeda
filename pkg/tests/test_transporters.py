import numpy as np
import pytest

from artinian import linalg as la
from artinian import matgrp as mg
from artinian import transporters as tr
from artinian.pointsets import PointSet
from artinian.rings import ring_make


def brute_transporter(G: PointSet, Y: PointSet, Z: PointSet) -> PointSet:
    keep = [Y.conj(g) == Z for g in G.matrices]
    return G.filter(np.array(keep, dtype=bool))


def brute_centralizer(G: PointSet, H: PointSet) -> PointSet:
    A = G.ring
    keep = []
    for g in G.matrices:
        keep.append(bool((la.matmul(A, g[None], H.matrices) == la.matmul(A, H.matrices, g[None])).all()))
    return G.filter(np.array(keep))


@pytest.mark.parametrize("kind,spec", [(mg.GL, "F2[t]/t^2"), (mg.SL, "Z/4"), (mg.GL, "F3"), (mg.SL, "F3")])
def test_normalizer_and_centralizer_match_brute_force(kind, spec):
    A = ring_make(spec)
    G = mg.ambient_group(kind, 2, A)
    S = G.enumerate()
    for sub in (mg.torus(kind, 2, A), mg.borel(kind, 2, A), mg.unipotent(kind, 2, A)):
        H = sub.enumerate()
        assert tr.normalizer_points(G, H) == brute_transporter(S, H, H)
        assert tr.normalizer_points(S, H) == brute_transporter(S, H, H)
        assert tr.centralizer_points(G, H) == brute_centralizer(S, H)


def test_transporter_between_conjugates(rng):
    A = ring_make("Z/4")
    G = mg.special_linear(2, A)
    S = G.enumerate()
    B = mg.borel(mg.SL, 2, A).enumerate()
    h = la.Matrix(A, G.random(rng, 1)[0])
    T = tr.transporter_points(G, B, B.conj(h))
    assert T == brute_transporter(S, B, B.conj(h))
    assert h.entries.tolist() in T.matrices.tolist()
    # a coset of the normalizer
    N = tr.normalizer_points(G, B)
    assert len(T) == len(N) and T == N.left_mul(h.entries)


def test_transporter_sizes_differ():
    A = ring_make("Z/4")
    T = mg.torus(mg.GL, 2, A).enumerate()
    B = mg.borel(mg.GL, 2, A).enumerate()
    assert len(tr.transporter_points(mg.general_linear(2, A), T, B)) == 0


@pytest.mark.parametrize("n,spec", [(2, "F3[t]/t^2"), (2, "Z/9"), (3, "F3")])
def test_torus_normalizer_is_monomial(n, spec):
    A = ring_make(spec)
    N = tr.normalizer_points(mg.general_linear(n, A), mg.torus(mg.GL, n, A).enumerate())
    assert N == tr.scheme_normalizer_torus(mg.GL, n, A).enumerate()
    C = tr.centralizer_points(mg.general_linear(n, A), mg.torus(mg.GL, n, A).enumerate())
    assert C == mg.torus(mg.GL, n, A).enumerate()


def test_small_field_normalizer_is_larger():
    A = ring_make("F2[t]/t^2")
    T = mg.torus(mg.GL, 2, A).enumerate()
    C = tr.centralizer_points(mg.general_linear(2, A), T)
    assert (len(T), len(C)) == (4, 16)
    # I + t E_21 commutes with the torus because every residue unit is 1
    x = la.identity(A, 2)
    x[1, 0] = A.pi_index
    assert C.contains(x)[0]


FLAG_CASES = [(mg.SL, 2, "Z/4"), (mg.GL, 3, "Z/8"), (mg.GL, 2, "F2[t]/t^2"), (mg.GL, 3, "F3[t]/t^2"),
              (mg.SL, 3, "Z/8"), (mg.GL, 3, "F2[t]/t^3"), (mg.SL, 2, "F4[t]/t^2")]


@pytest.mark.parametrize("kind,n,spec", FLAG_CASES)
def test_recover_flag_round_trip(kind, n, spec, rng):
    A = ring_make(spec)
    G = mg.ambient_group(kind, n, A)
    Bpat = mg.borel(kind, n, A)
    F0 = tr.Flag.standard(A, n)
    for h in G.random(rng, 10):
        hi = la.inverse(A, h)
        gens = la.conjugate(A, h[None], Bpat.generators(), hi[None])

        def member(X, h=h, hi=hi):
            return Bpat.contains(la.conjugate(A, hi[None], la.as_batch(X), h[None]))

        F = tr.recover_flag(gens, member, kind=kind, ring=A)
        g = tr.flag_transporter(F0, F, kind)
        assert G.contains(g.entries)[0]
        gi = la.inverse(A, g.entries)
        assert Bpat.contains(la.conjugate(A, gi[None], gens, g.entries[None])).all()
        assert member(la.conjugate(A, g.entries[None], Bpat.generators(), gi[None])).all()
        assert F.stabilizes(gens).all()


def test_recover_flag_from_points():
    A = ring_make("F3[t]/t^2")
    B = mg.borel(mg.GL, 2, A).enumerate()
    w = la.Matrix(A, [[0, A.one_index], [A.one_index, 0]])
    F = tr.recover_flag(B.conj(w))
    g = tr.flag_transporter(tr.Flag.standard(A, 2), F)
    assert B.conj(g) == B.conj(w)


def test_recover_flag_rejects_non_borel():
    A = ring_make("F3[t]/t^2")
    T = mg.torus(mg.GL, 2, A).enumerate()
    with pytest.raises(tr.NotABorelError):
        tr.recover_flag(T)


def test_flag_transporter_lands_in_sl():
    A = ring_make("Z/9")
    two = A.one + A.one
    basis = la.Matrix(A, [[two.index, 0], [0, A.one_index]])
    F2 = tr.Flag(basis)
    g = tr.flag_transporter(tr.Flag.standard(A, 2), F2, mg.SL)
    assert g.det() == A.one
    assert F2.stabilizes(la.conjugate(A, g.entries[None], mg.borel(mg.SL, 2, A).generators())).all()


def test_flag_requires_invertible_basis():
    A = ring_make("Z/4")
    with pytest.raises(la.SingularMatrixError):
        tr.Flag(la.Matrix(A, [[A.pi_index, 0], [0, A.one_index]]))
