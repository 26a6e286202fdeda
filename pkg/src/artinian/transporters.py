"""Strict transporters and centralizers of point sets; Borel flags.

When the ambient group is a pattern rather than an explicit point set,
scans run level by level: a point transporting Y to Z reduces to a point
transporting the reductions, so only lifts of the survivors at length l
are tested at length l + 1. Every level is exhaustive over its candidates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from . import matgrp as mg
from .fields import rank, solve_linear
from .matgrp import GroupPattern
from .pointsets import CHUNK, PointSet, SizeGuardError
from .rings import LocalRing


class NotABorelError(ValueError):
    def __init__(self, message: str, witness: la.Matrix | None = None):
        super().__init__(message)
        self.witness = witness


def _as_points(Y, guard) -> PointSet:
    if isinstance(Y, GroupPattern):
        return Y.enumerate(guard)
    return Y


class _Test:
    """Batched predicate: transports Y into Z, or commutes with Y."""

    def __init__(self, A: LocalRing, ygens: np.ndarray, Z: PointSet | None):
        self.A = A
        self.ygens = la.as_batch(ygens)
        self.Z = Z

    def __call__(self, X: np.ndarray) -> np.ndarray:
        A = self.A
        ok = np.ones(len(X), dtype=bool)
        if len(X) == 0:
            return ok
        if self.Z is None:
            for y in self.ygens:
                ok &= (la.matmul(A, X, y[None]) == la.matmul(A, y[None], X)).all(axis=(1, 2))
            return ok
        Xi = la.inverse(A, X)
        for y in self.ygens:
            idx = np.nonzero(ok)[0]
            if len(idx) == 0:
                break
            ok[idx] = self.Z.contains(la.conjugate(A, X[idx], y[None], Xi[idx]))
        return ok


def _scan(points: PointSet, test: _Test) -> PointSet:
    keep = np.zeros(len(points), dtype=bool)
    for s in range(0, len(points), CHUNK):
        keep[s:s + CHUNK] = test(points.matrices[s:s + CHUNK])
    return points.filter(keep)


def _lifting_scan(G: GroupPattern, make_test, guard: int) -> PointSet:
    """Exhaustive scan of G(A) through the survivors at each length."""
    A, n = G.ring, G.n
    q = A.q
    G1 = G.at_length(1)
    if G1.order() > guard:
        raise SizeGuardError(f"|{G1.label}({G1.ring})|", G1.order(), guard)
    survivors = _scan(G1.enumerate(guard), make_test(1))
    digits = mg._all_matrices(A.residue_ring(), n)
    for length in range(2, A.length + 1):
        Al = A.truncate(length)
        Gl = G.at_length(length)
        test = make_test(length)
        total = len(survivors) * len(digits)
        if total > guard:
            raise SizeGuardError(f"lifting candidates at length {length}", total, guard)
        parts = []
        step = max(1, CHUNK // len(digits))
        for s in range(0, len(survivors), step):
            base = survivors.matrices[s:s + step] * q
            X = (base[:, None] + digits[None]).reshape(-1, n, n)
            X = X[Gl.contains(X)]
            parts.append(X[test(X)])
        survivors = PointSet(Al, n, np.concatenate(parts) if parts else None)
    return survivors


def _generators(Y: PointSet) -> np.ndarray:
    g = Y.generators()
    if g is None:
        raise ValueError("point set is not a subgroup")
    return g


def transporter_points(G, Y, Z, guard: int = mg.DEFAULT_GUARD) -> PointSet:
    """{g in G : g Y g^-1 = Z} for subgroups Y and Z of G's ambient.

    A point qualifies iff it conjugates the generators of Y into Z and
    |Y| = |Z|. ``G`` is an explicit PointSet or a pattern.
    """
    Y, Z = _as_points(Y, guard), _as_points(Z, guard)
    A, n = Y.ring, Y.n
    if Z.ring != A or Z.n != n:
        raise la.DimensionError("Y and Z live in different groups")
    if len(Y) != len(Z):
        return PointSet(A, n)
    ygens = _generators(Y)
    if isinstance(G, PointSet):
        if G.ring != A or G.n != n:
            raise la.DimensionError("ambient mismatch")
        return _scan(G, _Test(A, ygens, Z))

    def make_test(length):
        if length == A.length:
            return _Test(A, ygens, Z)
        Zl = Z.reduce(length)
        Yl = Y.reduce(length)
        if len(Yl) != len(Zl):
            return lambda X: np.zeros(len(X), dtype=bool)
        return _Test(A.truncate(length), la.reduce_entries(A, ygens, length), Zl)

    return _lifting_scan(G, make_test, guard)


def normalizer_points(G, H, guard: int = mg.DEFAULT_GUARD) -> PointSet:
    H = _as_points(H, guard)
    out = transporter_points(G, H, H, guard)
    out.name = "normalizer"
    return out


def centralizer_points(G, H, guard: int = mg.DEFAULT_GUARD) -> PointSet:
    """{g in G : g h = h g for every generator h of H}."""
    H = _as_points(H, guard)
    A = H.ring
    hgens = _generators(H)
    if isinstance(G, PointSet):
        out = _scan(G, _Test(A, hgens, None))
    else:
        out = _lifting_scan(
            G, lambda length: _Test(A.truncate(length), la.reduce_entries(A, hgens, length), None), guard)
    out.name = "centralizer"
    return out


def scheme_normalizer_torus(kind: str, n: int, A: LocalRing) -> GroupPattern:
    """A-points of the scheme normalizer of the diagonal torus: monomials."""
    return mg.monomial(kind, n, A)


# -- flags ---------------------------------------------------------------------

@dataclass(frozen=True)
class Flag:
    """A full flag of free summands, given by an adapted basis (columns)."""

    basis: la.Matrix

    def __post_init__(self):
        if not self.basis.det().is_unit():
            raise la.SingularMatrixError("adapted basis must be invertible")

    @property
    def ring(self) -> LocalRing:
        return self.basis.ring

    @property
    def n(self) -> int:
        return self.basis.n

    @classmethod
    def standard(cls, A: LocalRing, n: int) -> Flag:
        return cls(la.Matrix.identity(A, n))

    def stabilizes(self, X: np.ndarray) -> np.ndarray:
        """Batched test that X maps each step into itself."""
        A, h = self.ring, self.basis.entries
        hi = la.inverse(A, h)
        inner = la.matmul(A, la.matmul(A, hi[None], la.as_batch(X)), h[None])
        return mg.borel(mg.GL, self.n, A).contains(inner)

    def stabilizer_generators(self, kind: str = mg.GL) -> np.ndarray:
        A, h = self.ring, self.basis.entries
        return la.conjugate(A, h[None], mg.borel(kind, self.n, A).generators())

    def step(self, i: int) -> np.ndarray:
        """Columns spanning the rank-i step."""
        return self.basis.entries[:, :i]


def _vector_order(k: LocalRing, n: int) -> np.ndarray:
    q = k.q
    idx = np.arange(q**n)
    return np.stack([(idx // q ** (n - 1 - i)) % q for i in range(n)], axis=1)


def _residue_flag_basis(k: LocalRing, gens: np.ndarray):
    """Smallest canonical vectors whose spans form an invariant chain."""
    F, n = k.field, gens.shape[-1]
    vectors = _vector_order(k, n)[1:]
    images = [list(map(list, b)) for b in gens]
    basis: list[list[int]] = []
    for _ in range(n):
        for v in vectors.tolist():
            trial = basis + [v]
            if rank(F, trial) != len(trial):
                continue
            if len(trial) < n and not _invariant(F, trial, images):
                continue
            basis = trial
            break
        else:
            raise NotABorelError("no invariant full flag over the residue field",
                                 la.Matrix(k, gens[0]))
    return np.array(basis, dtype=la.INDEX).T


def _invariant(F, vecs, mats) -> bool:
    r = rank(F, vecs)
    for b in mats:
        for v in vecs:
            w = [0] * len(v)
            for i, row in enumerate(b):
                acc = 0
                for bij, vj in zip(row, v):
                    acc = F.add(acc, F.mul(bij, vj))
                w[i] = acc
            if rank(F, vecs + [w]) != r:
                return False
    return True


def _hensel_solutions(A: LocalRing, h: np.ndarray, gens: np.ndarray, level: int):
    """All corrections of the zero-filled basis at length level+1.

    Yields bases h' over A_(level+1) with h'^-1 g h' upper triangular for
    every generator g, in canonical order of the correction vectors.
    """
    Al, Anext = A.truncate(level), A.truncate(level + 1)
    n = h.shape[-1]
    F = A.field
    h0 = la.zero_fill(Al, h, Anext).astype(la.INDEX)
    g = la.reduce_entries(A, gens, level + 1)
    b = la.conjugate(Anext, la.inverse(Anext, h0)[None], g, h0[None])
    psi = np.array([Anext.psi_index(level, a) for a in range(A.q)], dtype=la.INDEX)
    psi_inv = np.full(Anext.cardinality, -1, dtype=la.INDEX)
    psi_inv[psi] = np.arange(A.q)
    bbar = b // A.q ** level
    unknowns = [(i, j) for i in range(n) for j in range(i)]
    col = {pos: c for c, pos in enumerate(unknowns)}
    rows, rhs = [], []
    for m, bm in enumerate(b):
        for i, j in unknowns:
            beta = int(psi_inv[bm[i, j]])
            if beta < 0:
                return
            row = [0] * len(unknowns)
            for kk in range(j + 1, n):
                row[col[(kk, j)]] = F.add(row[col[(kk, j)]], int(bbar[m, i, kk]))
            for kk in range(i):
                row[col[(i, kk)]] = F.sub(row[col[(i, kk)]], int(bbar[m, kk, j]))
            rows.append(row)
            rhs.append(F.neg(beta))
    if not unknowns:
        yield h0
        return
    sol = solve_linear(F, rows, rhs) if rows else ([0] * len(unknowns), _unit_basis(len(unknowns)))
    if sol is None:
        return
    particular, null = sol
    for coeffs in itertools.product(range(A.q), repeat=len(null)):
        x = list(particular)
        for c, v in zip(coeffs, null):
            if c:
                x = [F.add(xi, F.mul(c, vi)) for xi, vi in zip(x, v)]
        corr = la.identity(Anext, n)
        for (i, j), xi in zip(unknowns, x):
            corr[i, j] = psi[xi]
        yield la.matmul(Anext, h0[None], corr[None])[0]


def _unit_basis(m: int):
    return [[1 if i == j else 0 for j in range(m)] for i in range(m)]


def recover_flag(B, member=None, kind: str = mg.GL, ring: LocalRing | None = None) -> Flag:
    """The flag whose stabilizer is the given conjugate of the standard Borel.

    ``B`` is an explicit PointSet, or a batch of generators over ``ring``
    together with a batched membership oracle ``member``. The residue flag
    is read off as an invariant chain over k, then lifted one length at a
    time by solving the linear conditions on lower-triangular corrections
    I + pi^l X, backtracking over the solution space when a choice fails to
    lift further. The result is certified on generators in both directions.
    """
    if isinstance(B, PointSet):
        A, gens = B.ring, _generators(B)
        member = B.contains if member is None else member
    else:
        A, gens = ring, la.as_batch(B)
        if A is None or member is None:
            raise ValueError("generators need a ring and a membership oracle")
    gens = la.as_batch(gens)
    n = gens.shape[-1]
    k = A.residue_ring()
    h1 = _residue_flag_basis(k, la.reduce_entries(A, gens, 1))
    std = mg.borel(kind, n, A)
    std_gens = std.generators()

    def certified(h):
        hi = la.inverse(A, h)
        inside = mg.borel(mg.GL, n, A).contains(la.conjugate(A, hi[None], gens, h[None]))
        if not inside.all():
            return False
        return bool(np.all(member(la.conjugate(A, h[None], std_gens, hi[None]))))

    def search(h, level):
        if level == A.length:
            return h if certified(h) else None
        for nxt in _hensel_solutions(A, h, gens, level):
            found = search(nxt, level + 1)
            if found is not None:
                return found
        return None

    h = search(h1, 1)
    if h is None:
        raise NotABorelError("no flag lifts to the full length with the given stabilizer",
                             la.Matrix(A, gens[0]))
    return Flag(la.Matrix(A, h))


def flag_transporter(F: Flag, F2: Flag, kind: str = mg.GL) -> la.Matrix:
    """g = basis(F2) basis(F)^-1, mapping F stepwise onto F2.

    For SL the first column of basis(F2) is divided by det g first; this
    keeps it adapted to F2 and lands g in SL_n.
    """
    if F.ring != F2.ring or F.n != F2.n:
        raise la.DimensionError("flags over different rings or dimensions")
    A = F.ring
    target = F2.basis.entries.copy()
    g = la.matmul(A, target[None], la.inverse(A, F.basis.entries)[None])[0]
    if kind == mg.SL:
        d = int(la.det(A, g)[0])
        target[:, 0] = A.mul_table[target[:, 0], A.inv_table[d]]
        g = la.matmul(A, target[None], la.inverse(A, F.basis.entries)[None])[0]
    return la.Matrix(A, g)
