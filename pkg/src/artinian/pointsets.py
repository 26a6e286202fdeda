"""Finite sets of matrices held in canonical order.

The canonical key of an n x n matrix is its row-major entry list read as a
base-|A| integer, so sorting by key is the lexicographic entry order.
"""

from __future__ import annotations

import numpy as np

from . import linalg as la
from .rings import LocalRing

CHUNK = 1 << 17


class SizeGuardError(RuntimeError):
    def __init__(self, what: str, size: int, guard: int):
        super().__init__(f"{what}: {size} exceeds the size guard {guard}")
        self.size = size
        self.guard = guard


def _fits_int64(A: LocalRing, n: int) -> bool:
    return A.cardinality ** (n * n) < 2**63


def encode(A: LocalRing, X: np.ndarray) -> np.ndarray:
    X = la.as_batch(X)
    n = X.shape[-1]
    flat = X.reshape(len(X), n * n)
    N = A.cardinality
    if _fits_int64(A, n):
        keys = np.zeros(len(X), dtype=np.int64)
        for k in range(n * n):
            keys = keys * N + flat[:, k]
        return keys
    keys = np.empty(len(X), dtype=object)
    for b, row in enumerate(flat.tolist()):
        v = 0
        for e in row:
            v = v * N + e
        keys[b] = v
    return keys


def decode(A: LocalRing, n: int, keys: np.ndarray) -> np.ndarray:
    N = A.cardinality
    out = np.empty((len(keys), n * n), dtype=la.INDEX)
    k = keys.copy()
    for pos in range(n * n - 1, -1, -1):
        out[:, pos] = (k % N).astype(la.INDEX)
        k = k // N
    return out.reshape(len(keys), n, n)


def _isin_sorted(sorted_keys: np.ndarray, keys: np.ndarray) -> np.ndarray:
    if len(sorted_keys) == 0:
        return np.zeros(len(keys), dtype=bool)
    pos = np.searchsorted(sorted_keys, keys)
    pos = np.minimum(pos, len(sorted_keys) - 1)
    return sorted_keys[pos] == keys


class PointSet:
    """A duplicate-free set of n x n matrices over A, sorted canonically."""

    def __init__(self, ring: LocalRing, n: int, matrices: np.ndarray | None = None, *,
                 keys: np.ndarray | None = None, name: str = ""):
        self.ring = ring
        self.n = n
        self.name = name
        if keys is None:
            mats = np.zeros((0, n, n), dtype=la.INDEX) if matrices is None else la.as_batch(matrices)
            keys = encode(ring, mats)
            keys, first = np.unique(keys, return_index=True)
            mats = mats[first]
        else:
            mats = decode(ring, n, keys) if matrices is None else matrices
        self.keys = keys
        self.matrices = np.ascontiguousarray(mats, dtype=la.INDEX)
        self.keys.setflags(write=False)
        self.matrices.setflags(write=False)
        self._gens = None

    # -- basic protocol -------------------------------------------------------

    def __len__(self) -> int:
        return len(self.keys)

    def __iter__(self):
        return (la.Matrix(self.ring, m) for m in self.matrices)

    def __contains__(self, g) -> bool:
        if isinstance(g, la.Matrix):
            if g.ring != self.ring:
                return False
            g = g.entries
        return bool(self.contains(g)[0])

    def contains(self, X: np.ndarray) -> np.ndarray:
        return _isin_sorted(self.keys, encode(self.ring, X))

    def __eq__(self, other):
        return (
            isinstance(other, PointSet)
            and other.ring == self.ring
            and other.n == self.n
            and len(other) == len(self)
            and bool(np.all(other.keys == self.keys))
        )

    __hash__ = None

    def issubset(self, other: PointSet) -> bool:
        return bool(other.contains(self.matrices).all())

    def issuperset(self, other: PointSet) -> bool:
        return other.issubset(self)

    def difference(self, other: PointSet) -> PointSet:
        keep = ~other.contains(self.matrices)
        return self._subset(keep)

    def intersection(self, other: PointSet) -> PointSet:
        return self._subset(other.contains(self.matrices))

    def union(self, other: PointSet) -> PointSet:
        return PointSet(self.ring, self.n, np.concatenate([self.matrices, other.matrices]))

    def _subset(self, mask: np.ndarray, name: str = "") -> PointSet:
        return PointSet(self.ring, self.n, self.matrices[mask], keys=self.keys[mask], name=name)

    def filter(self, mask: np.ndarray, name: str = "") -> PointSet:
        return self._subset(np.asarray(mask, dtype=bool), name)

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<PointSet{label}: {len(self)} of GL{self.n}({self.ring})>"

    def first(self, k: int = 1) -> list[la.Matrix]:
        return [la.Matrix(self.ring, m) for m in self.matrices[:k]]

    # -- group structure ------------------------------------------------------

    def identity_index(self) -> int:
        hit = np.searchsorted(self.keys, encode(self.ring, la.identity(self.ring, self.n))[0])
        return int(hit)

    def conj(self, g: la.Matrix | np.ndarray) -> PointSet:
        g = g.entries if isinstance(g, la.Matrix) else np.asarray(g)
        gi = la.inverse(self.ring, g)
        return PointSet(self.ring, self.n, la.conjugate(self.ring, g[None], self.matrices, gi))

    def reduce(self, length: int) -> PointSet:
        return PointSet(self.ring.truncate(length), self.n,
                        la.reduce_entries(self.ring, self.matrices, length))

    def left_mul(self, g: np.ndarray) -> PointSet:
        return PointSet(self.ring, self.n, la.matmul(self.ring, np.asarray(g)[None], self.matrices))

    def right_mul(self, g: np.ndarray) -> PointSet:
        return PointSet(self.ring, self.n, la.matmul(self.ring, self.matrices, np.asarray(g)[None]))

    def subgroup_check(self, sample: int | None = None, rng=None) -> bool:
        """Closure under product and inverse, exhaustive or on sampled pairs."""
        A, M = self.ring, self.matrices
        if len(M) == 0 or not self.contains(la.identity(A, self.n))[0]:
            return False
        if not self.contains(la.inverse(A, M)).all():
            return False
        if sample is None:
            for start in range(0, len(M), max(1, CHUNK // len(M))):
                block = M[start:start + max(1, CHUNK // len(M))]
                prods = la.matmul(A, np.repeat(block, len(M), axis=0), np.tile(M, (len(block), 1, 1)))
                if not self.contains(prods).all():
                    return False
            return True
        rng = rng if rng is not None else np.random.default_rng(0)
        i = rng.integers(len(M), size=sample)
        j = rng.integers(len(M), size=sample)
        return bool(self.contains(la.matmul(A, M[i], M[j])).all())

    def is_subgroup(self, rng=None) -> bool:
        if len(self) <= 10**4:
            return self.subgroup_check(None)
        return self.subgroup_check(1000, rng) and self.generated_by_subset()

    def generated_by_subset(self) -> bool:
        return self.generators() is not None

    def generators(self) -> np.ndarray | None:
        """Greedy generators: repeatedly take the canonically first element
        outside the span so far. Returns None if the span leaves the set."""
        if self._gens is not None:
            return self._gens
        A, n = self.ring, self.n
        gens = np.zeros((0, n, n), dtype=la.INDEX)
        span = PointSet(A, n, la.identity(A, n))
        while len(span) < len(self):
            outside = np.nonzero(~span.contains(self.matrices))[0]
            gens = np.concatenate([gens, self.matrices[outside[0]][None]])
            span = closure(A, gens, limit=len(self), start=span)
            if span is None or not span.issubset(self):
                return None
        self._gens = gens
        return gens

    def set_generators(self, gens: np.ndarray):
        self._gens = la.as_batch(gens)

    def is_abelian(self) -> bool:
        g = self.generators()
        A = self.ring
        a = np.repeat(g, len(g), axis=0)
        b = np.tile(g, (len(g), 1, 1))
        return bool((la.matmul(A, a, b) == la.matmul(A, b, a)).all())

    def is_normal_in(self, gens: np.ndarray) -> bool:
        """Conjugates of this set's generators by ``gens`` stay inside."""
        A, h = self.ring, self.generators()
        g = la.as_batch(gens)
        gi = la.inverse(A, g)
        G = np.repeat(g, len(h), axis=0)
        Gi = np.repeat(gi, len(h), axis=0)
        H = np.tile(h, (len(g), 1, 1))
        return bool(self.contains(la.conjugate(A, G, H, Gi)).all())

    def exponent_divides(self, e: int) -> bool:
        A = self.ring
        out = la.power(A, self.matrices, e)
        return bool((out == la.identity(A, self.n)).all())

    def product_set(self, other: PointSet, guard: int = 10**7) -> PointSet:
        """{x y : x in self, y in other}."""
        total = len(self) * len(other)
        if total > guard:
            raise SizeGuardError("product set", total, guard)
        A = self.ring
        parts = []
        step = max(1, CHUNK // max(1, len(other)))
        for s in range(0, len(self), step):
            X = self.matrices[s:s + step]
            parts.append(la.matmul(A, np.repeat(X, len(other), axis=0),
                                   np.tile(other.matrices, (len(X), 1, 1))))
        return PointSet(A, self.n, np.concatenate(parts) if parts else None)


def closure(A: LocalRing, gens: np.ndarray, n: int | None = None, limit: int | None = None,
            start: PointSet | None = None, conjugators: np.ndarray | None = None) -> PointSet | None:
    """Subgroup generated by ``gens`` (and ``start``) by breadth-first search.

    With ``conjugators`` the set is also closed under conjugation by them,
    giving the normal closure in the group they generate. Returns None as
    soon as the set grows past ``limit``.
    """
    gens = la.as_batch(gens)
    n = gens.shape[-1] if n is None else n
    if start is None:
        start = PointSet(A, n, la.identity(A, n))
    known = start.keys
    frontier = start.matrices
    if len(gens) == 0 and conjugators is None:
        return start
    ops = []
    if len(gens):
        ops.append(("mul", gens, None))
    if conjugators is not None and len(conjugators):
        c = la.as_batch(conjugators)
        ops.append(("conj", c, la.inverse(A, c)))
    pending = [frontier]
    collected = [start.matrices]
    while pending:
        frontier = np.concatenate(pending)
        pending = []
        for s in range(0, len(frontier), CHUNK):
            F = frontier[s:s + CHUNK]
            for kind, ms, inv in ops:
                for idx in range(len(ms)):
                    if kind == "mul":
                        new = la.matmul(A, F, ms[idx][None])
                    else:
                        new = la.conjugate(A, ms[idx][None], F, inv[idx][None])
                    keys = encode(A, new)
                    keys, first = np.unique(keys, return_index=True)
                    fresh = ~_isin_sorted(known, keys)
                    if not fresh.any():
                        continue
                    keys, new = keys[fresh], new[first[fresh]]
                    known = np.union1d(known, keys)
                    if limit is not None and len(known) > limit:
                        return None
                    pending.append(new)
                    collected.append(new)
    mats = np.concatenate(collected)
    return PointSet(A, n, mats)
