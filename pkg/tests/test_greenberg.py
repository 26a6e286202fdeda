import json

import numpy as np
import pytest

from artinian import greenberg as gb
from artinian import linalg as la
from artinian import matgrp as mg
from artinian.pointsets import SizeGuardError
from artinian.rings import ring_make


def sylow_intersection(kind, n, A):
    """O_p as the intersection of the conjugates of one Sylow p-subgroup.

    The preimage of the residue unipotent group is Sylow and contains G^1,
    so conjugating by lifts of residue points reaches every conjugate.
    """
    k = A.residue_ring()
    P = mg.preimage(mg.unipotent(kind, n, k), A).enumerate()
    out = P
    for g in mg.ambient_group(kind, n, k).enumerate().matrices:
        out = out.intersection(P.conj(mg.lift_point(k, la.Matrix(k, g), kind, A)))
    return out


@pytest.mark.parametrize("kind,n,spec", [
    (mg.GL, 2, "F3[t]/t^2"),
    (mg.SL, 2, "Z/4"),
    (mg.GL, 2, "F2[t]/t^2"),
    (mg.SL, 2, "F3[t]/t^2"),
    (mg.GL, 2, "Z/8"),
])
def test_op_agrees_with_sylow_oracle(kind, n, spec):
    A = ring_make(spec)
    S = mg.ambient_group(kind, n, A).enumerate()
    assert gb.largest_normal_p_subgroup(S) == sylow_intersection(kind, n, A)


def test_op_is_the_congruence_kernel():
    for kind, spec, size in ((mg.GL, "F3[t]/t^2", 81), (mg.SL, "Z/4", 8)):
        A = ring_make(spec)
        O = gb.largest_normal_p_subgroup(mg.ambient_group(kind, 2, A).enumerate())
        assert len(O) == size
        assert O == mg.congruence_kernel(kind, 2, A, 1).enumerate()


def test_op_of_borel_is_unipotent_preimage():
    A = ring_make("F3[t]/t^2")
    B = mg.borel(mg.GL, 2, A).enumerate()
    U = mg.preimage(mg.unipotent(mg.GL, 2, A.residue_ring()), A).enumerate().intersection(B)
    assert gb.largest_normal_p_subgroup(B) == U


def test_op_seed_must_be_normal():
    A = ring_make("F3[t]/t^2")
    S = mg.general_linear(2, A).enumerate()
    U = mg.unipotent(mg.GL, 2, A).enumerate()
    with pytest.raises(ValueError):
        gb.largest_normal_p_subgroup(S, seed=U)
    K = mg.congruence_kernel(mg.GL, 2, A, 1).enumerate()
    assert len(gb.largest_normal_p_subgroup(S, seed=K)) == 81


def test_op_guard():
    A = ring_make("F2[t]/t^2")
    with pytest.raises(SizeGuardError):
        gb.largest_normal_p_subgroup(mg.general_linear(3, A).enumerate(), limit=1000)


@pytest.mark.parametrize("kind,n,spec", [
    (mg.GL, 2, "Z/8"), (mg.SL, 2, "Z/8"), (mg.GL, 2, "F2[t]/t^3"), (mg.GL, 3, "F2[t]/t^2"),
    (mg.GL, 2, "F3[t]/t^2"),
])
def test_filtration_structure(kind, n, spec):
    A = ring_make(spec)
    G = mg.ambient_group(kind, n, A)
    F = gb.filtration(G)
    q, r, dim = A.q, A.length, G.dim
    assert F.orders == [q ** ((r - level) * dim) for level in range(1, r + 1)]
    assert F.normal
    assert all(L.elementary_abelian for L in F.layers)
    assert [L.layer_order for L in F.layers[:-1]] == [q**dim] * (r - 1)
    assert gb.layer_iso_check(F)


def test_filtration_report_json():
    F = gb.filtration(mg.general_linear(2, ring_make("Z/8")))
    doc = json.loads(F.to_json())
    assert doc["ring"] == "W3(F2)" and doc["group"] == "GL2"
    assert [L["kernel_order"] for L in doc["layers"]] == [256, 16, 1]
    assert all(L["elementary_abelian"] for L in doc["layers"])


def test_filtration_kernels_are_normal_exhaustively():
    A = ring_make("Z/9")
    G = mg.special_linear(2, A)
    S = G.enumerate()
    K = gb.filtration(G).kernel_points(1)
    assert K.is_normal_in(S.matrices)


def test_borel_preimage_check():
    for spec in ("F2[t]/t^2", "F3[t]/t^2", "Z/4", "Z/9"):
        A = ring_make(spec)
        assert gb.borel_preimage_check(mg.general_linear(2, A), mg.borel(mg.GL, 2, A))


def test_borel_times_kernel_by_brute_force():
    A = ring_make("F2[t]/t^2")
    B = mg.borel(mg.GL, 2, A).enumerate()
    K = mg.congruence_kernel(mg.GL, 2, A, 1).enumerate()
    pre = mg.preimage(mg.borel(mg.GL, 2, A.residue_ring()), A).enumerate()
    assert B.product_set(K) == pre
    assert len(pre) == 32


def test_component_points():
    A = ring_make("F3[t]/t^2")
    S = mg.general_linear(2, A).enumerate()
    C = gb.component_points(S, mg.borel(mg.GL, 2, A.residue_ring()))
    assert len(C) == 4 * 3 * 81
    R = gb.unipotent_radical_points(mg.general_linear(2, A), mg.trivial(mg.GL, 2, A.residue_ring()))
    assert R == mg.congruence_kernel(mg.GL, 2, A, 1).enumerate()


def test_p_elements_and_classes():
    A = ring_make("F3")
    S = mg.special_linear(2, A).enumerate()
    mask = gb.p_elements(S, 3)
    assert mask.sum() == 9  # identity plus the 8 elements of order 3
    x = S.matrices[np.nonzero(mask)[0][1]]
    assert len(gb.conjugacy_class(S, x)) == 4
