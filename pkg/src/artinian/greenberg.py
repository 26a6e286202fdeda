"""G(A) as a finite group: congruence filtration, layers, components, radicals."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from . import matgrp as mg
from .matgrp import GroupPattern
from .pointsets import PointSet, SizeGuardError, closure, encode

EXHAUSTIVE_NORMALITY = 10**5
OP_LIMIT = 10**5


def is_power_of(x: int, p: int) -> bool:
    while x > 1 and x % p == 0:
        x //= p
    return x == 1


def p_part(x: int, p: int) -> int:
    out = 1
    while x % p == 0:
        x //= p
        out *= p
    return out


@dataclass
class Layer:
    level: int
    kernel_order: int
    layer_order: int
    elementary_abelian: bool


@dataclass
class Filtration:
    group: GroupPattern
    kernels: list[GroupPattern]
    orders: list[int]
    layers: list[Layer] = field(default_factory=list)
    normal: bool = True

    @property
    def ring(self):
        return self.group.ring

    def kernel_points(self, level: int, guard: int | None = mg.DEFAULT_GUARD) -> PointSet:
        return self.kernels[level - 1].enumerate(guard)

    def report(self) -> dict:
        return {
            "ring": self.ring.spec,
            "group": self.group.label,
            "layers": [
                {
                    "level": L.level,
                    "kernel_order": L.kernel_order,
                    "layer_order": L.layer_order,
                    "elementary_abelian": L.elementary_abelian,
                }
                for L in self.layers
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.report(), sort_keys=True)


def _normal_under(A, K: GroupPattern, kgens: np.ndarray, conjugators: np.ndarray) -> bool:
    gi = la.inverse(A, conjugators)
    G = np.repeat(conjugators, len(kgens), axis=0)
    Gi = np.repeat(gi, len(kgens), axis=0)
    H = np.tile(kgens, (len(conjugators), 1, 1))
    return bool(K.contains(la.conjugate(A, G, H, Gi)).all())


def filtration(G: GroupPattern, guard: int = mg.DEFAULT_GUARD,
               rng: np.random.Generator | None = None) -> Filtration:
    """Congruence kernels G^1, ..., G^r of an ambient GL_n or SL_n.

    G^l has order q^((r-l) dim G) and each layer G^l / G^(l+1) should be
    elementary abelian of order q^dim G. Normality is checked exhaustively
    when the group is small enough.
    """
    if G.kind not in (mg.GL, mg.SL):
        raise ValueError("filtration is defined for GL_n and SL_n")
    A = G.ring
    rng = rng if rng is not None else np.random.default_rng(0)
    r, q, dim = A.length, A.q, G.dim
    kernels = [mg.congruence_kernel(G.ambient, G.n, A, level) for level in range(1, r + 1)]
    orders = [K.order() for K in kernels]
    if orders[0] > guard:
        raise SizeGuardError(f"|{kernels[0].label}({A})|", orders[0], guard)
    for level, o in enumerate(orders, start=1):
        assert o == q ** ((r - level) * dim), (level, o)
    if G.order() <= EXHAUSTIVE_NORMALITY:
        conjugators = G.enumerate(guard).matrices
    else:
        conjugators = np.concatenate([G.generators(), G.random(rng, 200)])
    F = Filtration(G, kernels, orders)
    for level, K in enumerate(kernels, start=1):
        if not _normal_under(A, K, K.generators(), conjugators):
            F.normal = False
    for level in range(1, r):
        K, nxt = kernels[level - 1], kernels[level]
        F.layers.append(Layer(level, orders[level - 1], orders[level - 1] // orders[level],
                              _layer_elementary_abelian(A, K, nxt)))
    F.layers.append(Layer(r, 1, 1, True))
    return F


def _layer_elementary_abelian(A, K: GroupPattern, nxt: GroupPattern) -> bool:
    """Generators of K commute and have p-th powers modulo ``nxt``."""
    g = K.generators()
    a = np.repeat(g, len(g), axis=0)
    b = np.tile(g, (len(g), 1, 1))
    comm = la.matmul(A, la.matmul(A, a, b), la.inverse(A, la.matmul(A, b, a)))
    return bool(nxt.contains(comm).all() and nxt.contains(la.power(A, g, A.p)).all())


def lie_layer_map(G: GroupPattern, X: np.ndarray) -> np.ndarray:
    """X -> I + pi^(r-1) X for residue-field matrices X (indices into k)."""
    A = G.ring
    r = A.length
    psi = np.array([A.psi_index(r - 1, a) for a in range(A.q)], dtype=la.INDEX)
    return A.add_table[la.identity(A, G.n)[None], psi[X]]


def layer_iso_check(F: Filtration, level: int | None = None, pair_limit: int = 10**6,
                    rng: np.random.Generator | None = None) -> bool:
    """Exhibit (M_n(k), +) (trace zero for SL) as the top kernel G^(r-1)."""
    A, G = F.ring, F.group
    r, n = A.length, G.n
    if r < 2:
        raise ValueError("the top layer map needs length >= 2")
    if level is not None and level != r - 1:
        raise ValueError(f"only the top layer {r - 1} has an explicit map")
    k = A.residue_ring()
    X = mg._all_matrices(k, n)
    if G.ambient == mg.SL:
        tr = np.zeros(len(X), dtype=la.INDEX)
        for i in range(n):
            tr = k.add_table[tr, X[:, i, i]]
        X = X[tr == 0]
    image = lie_layer_map(G, X)
    target = F.kernels[r - 2].enumerate(None)
    if PointSet(A, n, image) != target or len(X) != len(target):
        return False
    if len(X) ** 2 <= pair_limit:
        i, j = np.divmod(np.arange(len(X) ** 2), len(X))
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        i, j = rng.integers(len(X), size=(2, pair_limit))
    total = k.add_table[X[i], X[j]]
    return bool((lie_layer_map(G, total) == la.matmul(A, image[i], image[j])).all())


def component_points(S: PointSet, residue_component: GroupPattern) -> PointSet:
    """Points of S whose reduction lies in the given residue pattern."""
    if residue_component.ring != S.ring.residue_ring():
        raise ValueError(f"residue pattern over {residue_component.ring}, expected {S.ring.residue_ring()}")
    keep = residue_component.contains(la.reduce_entries(S.ring, S.matrices, 1))
    out = S.filter(keep, name=f"component[{residue_component.label}]")
    return out


def unipotent_radical_points(G: GroupPattern, residue_radical: GroupPattern,
                             guard: int = mg.DEFAULT_GUARD) -> PointSet:
    """The reduction preimage of the residue radical inside G(A)."""
    A = G.ring
    if residue_radical.ring != A.residue_ring():
        raise ValueError("radical pattern must live over the residue field")
    pre = mg.preimage(residue_radical, A) if residue_radical.ambient == G.ambient else None
    if G.kind in (mg.GL, mg.SL) and pre is not None:
        return pre.enumerate(guard)
    S = G.enumerate(guard)
    return component_points(S, residue_radical)


def p_elements(S: PointSet, p: int) -> np.ndarray:
    pp = p_part(len(S), p)
    pw = la.power(S.ring, S.matrices, pp)
    return (pw == la.identity(S.ring, S.n)).all(axis=(1, 2))


def normal_closure(S: PointSet, X: np.ndarray, start: PointSet | None = None,
                   limit: int | None = None) -> PointSet | None:
    """Smallest normal subgroup of S containing X (and ``start``)."""
    return closure(S.ring, la.as_batch(X), n=S.n, limit=limit, start=start,
                   conjugators=S.generators())


def conjugacy_class(S: PointSet, x: np.ndarray) -> PointSet:
    start = PointSet(S.ring, S.n, x)
    return closure(S.ring, np.zeros((0, S.n, S.n), dtype=la.INDEX), n=S.n, start=start,
                   conjugators=S.generators())


def largest_normal_p_subgroup(S: PointSet, p: int | None = None, seed: PointSet | None = None,
                              limit: int = OP_LIMIT) -> PointSet:
    """O_p(S) by growing normal closures through the p-elements of S.

    A p-element x with N <= O_p lies in O_p iff the normal closure of
    N and x is a p-group; otherwise every element of class(x) * N is
    outside O_p and is skipped. ``seed`` must itself be a normal p-subgroup.
    """
    if len(S) > limit:
        raise SizeGuardError("largest normal p-subgroup", len(S), limit)
    A, n = S.ring, S.n
    p = A.p if p is None else p
    bound = p_part(len(S), p)
    if seed is None:
        N = PointSet(A, n, la.identity(A, n))
    else:
        if not (is_power_of(len(seed), p) and seed.issubset(S) and seed.is_normal_in(S.generators())):
            raise ValueError("seed is not a normal p-subgroup of S")
        N = seed
    # points already known to lie in N or known to lie outside O_p
    settled = N.contains(S.matrices)
    for idx in np.nonzero(p_elements(S, p))[0]:
        if settled[idx]:
            continue
        x = S.matrices[idx]
        gens = N.generators() if len(N) > 1 else np.zeros((0, n, n), dtype=la.INDEX)
        grown = normal_closure(S, np.concatenate([gens, x[None]]), start=N, limit=bound)
        if grown is not None and is_power_of(len(grown), p):
            N = grown
            settled |= N.contains(S.matrices)
            continue
        bad = conjugacy_class(S, x).product_set(N)
        settled[np.searchsorted(S.keys, bad.keys)] = True
    N.name = f"O_{p}"
    return N


def borel_preimage_check(G: GroupPattern, B: GroupPattern, guard: int = mg.DEFAULT_GUARD) -> bool:
    """B(A) G^1 equals the reduction preimage of B(k), as sets."""
    A = G.ring
    Bk = B.at_length(1)
    pre = mg.preimage(Bk, A)
    lhs = _product_with_kernel(B.enumerate(guard), mg.congruence_kernel(G.ambient, G.n, A, 1), guard)
    rhs = pre.enumerate(guard)
    return lhs == rhs


def _product_with_kernel(S: PointSet, K: GroupPattern, guard: int) -> PointSet:
    """S * K for K a congruence kernel, through one representative of
    each residue class of S (the cosets sK depend only on that class)."""
    A = S.ring
    if A.length == 1:
        return S
    residues = encode(A.residue_ring(), la.reduce_entries(A, S.matrices, 1))
    _, first = np.unique(residues, return_index=True)
    reps = PointSet(A, S.n, S.matrices[first])
    return reps.product_set(K.enumerate(guard), guard)
