"""GL_n, SL_n and their standard subgroup patterns at the level of A-points."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg as la
from .pointsets import CHUNK, PointSet, SizeGuardError
from .rings import LocalRing

DEFAULT_GUARD = 10**7

GL, SL = "GL", "SL"
KINDS = ("GL", "SL", "torus", "borel", "unipotent", "parabolic", "monomial", "kernel", "preimage")


class NotAGroupElement(ValueError):
    pass


@dataclass(frozen=True)
class GroupPattern:
    """A subgroup of GL_n(A) cut out by entry predicates.

    ``ambient`` is GL or SL; ``shape`` is the block composition of a
    parabolic, ``level`` the congruence level of a kernel, and ``residue``
    the pattern over the residue field whose preimage a ``preimage`` is.
    """

    kind: str
    n: int
    ring: LocalRing
    ambient: str = GL
    shape: tuple[int, ...] | None = None
    level: int | None = None
    residue: GroupPattern | None = field(default=None, compare=True)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown pattern kind {self.kind!r}")
        if self.ambient not in (GL, SL):
            raise ValueError(f"ambient must be GL or SL, not {self.ambient!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.kind == "parabolic":
            if not self.shape or sum(self.shape) != self.n or min(self.shape) < 1:
                raise ValueError(f"{self.shape} is not a composition of {self.n}")
        if self.kind == "kernel" and not (self.level is not None and 0 <= self.level <= self.ring.length):
            raise ValueError(f"kernel level {self.level} outside 0..{self.ring.length}")
        if self.kind == "preimage":
            res = self.residue
            if res is None or res.ring != self.ring.residue_ring() or res.n != self.n:
                raise ValueError("preimage needs a residue pattern over the residue field")
            if res.ambient != self.ambient:
                raise ValueError("residue pattern and preimage must share the ambient group")

    # -- naming ---------------------------------------------------------------

    @property
    def label(self) -> str:
        base = f"{self.ambient}{self.n}"
        if self.kind in (GL, SL):
            return base
        if self.kind == "parabolic":
            return f"parabolic{self.shape}({base})"
        if self.kind == "kernel":
            return f"kernel{self.level}({base})"
        if self.kind == "preimage":
            return f"preimage[{self.residue.label}]"
        return f"{self.kind}({base})"

    def __repr__(self):
        return f"<{self.label} over {self.ring}>"

    @property
    def dim(self) -> int:
        """Dimension of the ambient group scheme."""
        return self.n * self.n - (1 if self.ambient == SL else 0)

    def over(self, ring: LocalRing) -> GroupPattern:
        """The same pattern over another ring of the same family."""
        res = self.residue
        if res is not None:
            res = res.over(ring.residue_ring())
        level = None if self.level is None else min(self.level, ring.length)
        return replace(self, ring=ring, residue=res, level=level)

    def at_length(self, length: int) -> GroupPattern:
        return self.over(self.ring.truncate(length))

    # -- membership -----------------------------------------------------------

    def contains(self, X: np.ndarray) -> np.ndarray:
        X = la.as_batch(X)
        if X.shape[1:] != (self.n, self.n):
            raise la.DimensionError(f"expected {self.n}x{self.n} matrices, got {X.shape[1:]}")
        A, n = self.ring, self.n
        d = la.det(A, X)
        ok = (d == A.one_index) if self.ambient == SL else A.unit_mask[d].copy()
        rows, cols = np.indices((n, n))
        if self.kind == "torus":
            ok &= (X[:, rows != cols] == 0).all(axis=1)
        elif self.kind in ("borel", "unipotent"):
            ok &= (X[:, rows > cols] == 0).all(axis=1)
            if self.kind == "unipotent":
                ok &= (X[:, rows == cols] == A.one_index).all(axis=1)
        elif self.kind == "parabolic":
            blk = _block_index(self.shape)
            ok &= (X[:, blk[rows] > blk[cols]] == 0).all(axis=1)
        elif self.kind == "monomial":
            nz = X != 0
            ok &= (nz.sum(axis=1) == 1).all(axis=1) & (nz.sum(axis=2) == 1).all(axis=1)
        elif self.kind == "kernel":
            if self.level:
                red = la.reduce_entries(A, X, self.level)
                ok &= (red == la.identity(A.truncate(self.level), n)).all(axis=(1, 2))
        elif self.kind == "preimage":
            ok &= self.residue.contains(la.reduce_entries(A, X, 1))
        return ok

    def __contains__(self, g: la.Matrix) -> bool:
        if g.ring != self.ring:
            raise la.DimensionError(f"matrix over {g.ring}, pattern over {self.ring}")
        return bool(self.contains(g.entries)[0])

    # -- order ----------------------------------------------------------------

    def order(self) -> int:
        A, n = self.ring, self.n
        q, r = A.q, A.length
        u = A.unit_count
        sl = self.ambient == SL
        if self.kind in (GL, SL):
            return gl_order(n, q, r) // (u if sl else 1)
        if self.kind == "torus":
            return u ** (n - 1 if sl else n)
        if self.kind == "unipotent":
            return q ** (r * n * (n - 1) // 2)
        if self.kind == "borel":
            return u**n * q ** (r * n * (n - 1) // 2) // (u if sl else 1)
        if self.kind == "parabolic":
            levi = math.prod(gl_order(b, q, r) for b in self.shape)
            upper = (n * n - sum(b * b for b in self.shape)) // 2
            return levi * q ** (r * upper) // (u if sl else 1)
        if self.kind == "monomial":
            return math.factorial(n) * u ** (n - 1 if sl else n)
        if self.kind == "kernel":
            if self.level == 0:
                return GroupPattern(self.ambient, n, A, self.ambient).order()
            return q ** ((r - self.level) * self.dim)
        return self.residue.order() * q ** ((r - 1) * self.dim)

    # -- generators -----------------------------------------------------------

    def generators(self) -> np.ndarray:
        A, n = self.ring, self.n
        sl = self.ambient == SL
        gens: list[np.ndarray] = []
        if self.kind in (GL, SL):
            if not sl:
                gens += _torus_from_units(A, n, A.unit_gens, sl)
            gens += _elementary(A, n, [(i, j) for i in range(n) for j in range(n) if i != j])
        elif self.kind == "torus":
            gens += _torus_from_units(A, n, A.unit_gens, sl)
        elif self.kind == "unipotent":
            gens += _elementary(A, n, [(i, j) for i in range(n) for j in range(i + 1, n)])
        elif self.kind == "borel":
            gens += _torus_from_units(A, n, A.unit_gens, sl)
            gens += _elementary(A, n, [(i, j) for i in range(n) for j in range(i + 1, n)])
        elif self.kind == "parabolic":
            blk = _block_index(self.shape)
            gens += _torus_from_units(A, n, A.unit_gens, sl)
            gens += _elementary(A, n, [(i, j) for i in range(n) for j in range(n)
                                    if i != j and blk[i] <= blk[j]])
        elif self.kind == "monomial":
            gens += _torus_from_units(A, n, A.unit_gens, sl)
            for i in range(n - 1):
                w = la.identity(A, n)
                w[i, i] = w[i + 1, i + 1] = 0
                w[i, i + 1] = A.one_index
                w[i + 1, i] = A.neg_table[A.one_index] if sl else A.one_index
                gens.append(w)
        elif self.kind == "kernel":
            if self.level == 0:
                return GroupPattern(self.ambient, n, A, self.ambient).generators()
            add = _ideal_additive_gens(A, self.level)
            mult = _congruence_unit_gens(A, self.level)
            gens += [la.elementary(A, n, i, j, a) for i in range(n) for j in range(n) if i != j for a in add]
            gens += _torus_from_units(A, n, mult, sl)
        else:
            res = self.residue.generators()
            gens += [lift_point(A.residue_ring(), g, self.ambient, A).entries for g in res]
            gens += list(GroupPattern("kernel", n, A, self.ambient, level=min(1, A.length)).generators())
        if not gens:
            return np.zeros((0, n, n), dtype=la.INDEX)
        return np.stack(gens)

    # -- enumeration ----------------------------------------------------------

    def _factors(self):
        """(positions, values) blocks whose product space contains the
        pattern; values are index offsets added into a zero matrix."""
        A, n = self.ring, self.n
        units = np.nonzero(A.unit_mask)[0]
        allv = np.arange(A.cardinality)
        diag = [(i, i) for i in range(n)]
        upper = [(i, j) for i in range(n) for j in range(i + 1, n)]
        single = lambda pos, vals: ([pos], np.asarray(vals).reshape(-1, 1))  # noqa: E731
        if self.kind == "torus":
            return [single(p, units) for p in diag]
        if self.kind == "unipotent":
            return [single(p, [A.one_index]) for p in diag] + [single(p, allv) for p in upper]
        if self.kind == "borel":
            return [single(p, units) for p in diag] + [single(p, allv) for p in upper]
        if self.kind == "parabolic":
            out, start = [], 0
            for b in self.shape:
                block = GroupPattern(GL, b, A).enumerate(guard=None).matrices.reshape(-1, b * b)
                pos = [(start + i, start + j) for i in range(b) for j in range(b)]
                out.append((pos, block))
                start += b
            blk = _block_index(self.shape)
            out += [single((i, j), allv) for i in range(n) for j in range(n) if blk[i] < blk[j]]
            return out
        if self.kind == "kernel":
            span = A.q ** (A.length - self.level)
            off = np.arange(span)
            return ([single(p, A.one_index + off if self.level else units) for p in diag]
                    + [single((i, j), off if self.level else allv)
                       for i in range(n) for j in range(n) if i != j])
        # GL, SL, preimage: residue points and then their fibres
        k = A.residue_ring()
        res = self.residue if self.kind == "preimage" else GroupPattern(GL, n, k, GL)
        if self.kind == SL:
            res = GroupPattern(SL, n, k, SL)
        if A.is_field and self.kind in (GL, SL):
            cand = _all_matrices(k, n)
            points = cand[res.contains(cand)] if len(cand) else cand
        else:
            points = res.enumerate(guard=None).matrices
        high = points.reshape(-1, n * n) * A.q ** (A.length - 1)
        pos = [(i, j) for i in range(n) for j in range(n)]
        low = np.arange(A.q ** (A.length - 1))
        return [(pos, high)] + ([single(p, low) for p in pos] if A.length > 1 else [])

    def candidates(self):
        """Chunks of the product space, unfiltered."""
        if self.kind == "monomial":
            yield from self._monomial_chunks()
            return
        yield from product_space(self.n, self._factors())

    def _monomial_chunks(self):
        A, n = self.ring, self.n
        units = np.nonzero(A.unit_mask)[0]
        for perm in itertools.permutations(range(n)):
            yield from product_space(n, [([(i, perm[i])], units.reshape(-1, 1)) for i in range(n)])

    def candidate_count(self) -> int:
        if self.kind == "monomial":
            return math.factorial(self.n) * self.ring.unit_count**self.n
        return math.prod(len(v) for _, v in self._factors())

    def enumerate(self, guard: int | None = DEFAULT_GUARD) -> PointSet:
        order = self.order()
        if guard is not None and order > guard:
            raise SizeGuardError(f"|{self.label}({self.ring})|", order, guard)
        parts = [c[self.contains(c)] for c in self.candidates()]
        mats = np.concatenate(parts) if parts else np.zeros((0, self.n, self.n), dtype=la.INDEX)
        pts = PointSet(self.ring, self.n, mats, name=self.label)
        if len(pts) != order:
            raise AssertionError(f"{self.label} over {self.ring}: enumerated {len(pts)}, expected {order}")
        pts.set_generators(self.generators())
        return pts

    # -- sampling -------------------------------------------------------------

    def random(self, rng: np.random.Generator, count: int = 1) -> np.ndarray:
        """Uniform samples by rejection from the entry odometer."""
        A, n = self.ring, self.n
        out, have = [], 0
        while have < count:
            batch = max(64, 4 * (count - have))
            if self.kind in (GL, SL):
                X = rng.integers(A.cardinality, size=(batch, n, n))
            elif self.kind == "monomial":
                X = np.zeros((batch, n, n), dtype=la.INDEX)
                perms = np.array(list(itertools.permutations(range(n))))
                p = perms[rng.integers(len(perms), size=batch)]
                units = np.nonzero(A.unit_mask)[0]
                vals = units[rng.integers(len(units), size=(batch, n))]
                X[np.arange(batch)[:, None], np.arange(n)[None], p] = vals
            else:
                X = np.zeros((batch, n, n), dtype=la.INDEX)
                for pos, vals in self._factors():
                    pick = vals[rng.integers(len(vals), size=batch)]
                    for c, (i, j) in enumerate(pos):
                        X[:, i, j] += pick[:, c]
            X = X[self.contains(X)]
            out.append(X)
            have += len(X)
        return np.concatenate(out)[:count]

    def random_element(self, rng: np.random.Generator) -> la.Matrix:
        return la.Matrix(self.ring, self.random(rng, 1)[0])


def _block_index(shape) -> np.ndarray:
    return np.repeat(np.arange(len(shape)), shape)


def gl_order(n: int, q: int, r: int) -> int:
    return q ** ((r - 1) * n * n) * math.prod(q**n - q**i for i in range(n))


def _all_matrices(A: LocalRing, n: int) -> np.ndarray:
    N = A.cardinality
    idx = np.arange(N ** (n * n))
    digits = [(idx // N ** (n * n - 1 - k)) % N for k in range(n * n)]
    return np.stack(digits, axis=1).reshape(-1, n, n).astype(la.INDEX)


def product_space(n: int, factors, chunk: int = CHUNK):
    """Yield (B, n, n) chunks of the mixed-radix product of the factors."""
    sizes = [len(v) for _, v in factors]
    total = math.prod(sizes)
    for start in range(0, total, chunk):
        flat = np.arange(start, min(total, start + chunk))
        X = np.zeros((len(flat), n, n), dtype=la.INDEX)
        rem = flat
        for (pos, vals), size in zip(reversed(factors), reversed(sizes)):
            rem, digit = np.divmod(rem, size)
            pick = vals[digit]
            for c, (i, j) in enumerate(pos):
                X[:, i, j] += pick[:, c]
        yield X


def _elementary(A: LocalRing, n: int, positions) -> list[np.ndarray]:
    return [la.elementary(A, n, i, j, a) for i, j in positions for a in A.additive_gens]


def _torus_from_units(A: LocalRing, n: int, units, sl: bool) -> list[np.ndarray]:
    out = []
    for u in units:
        if sl:
            for i in range(n - 1):
                d = la.identity(A, n)
                d[i, i] = u
                d[i + 1, i + 1] = A.inv_table[u]
                out.append(d)
        else:
            for i in range(n):
                d = la.identity(A, n)
                d[i, i] = u
                out.append(d)
    return out


def _ideal_additive_gens(A: LocalRing, level: int) -> list[int]:
    """Greedy additive generators of m^level = indices below q^(r-level)."""
    span_size = A.q ** (A.length - level)
    gens, span = [], {0}
    for x in range(span_size):
        if x in span:
            continue
        gens.append(x)
        span = _additive_span(A, gens)
    return gens


def _additive_span(A: LocalRing, gens) -> set[int]:
    span, frontier = {0}, [0]
    while frontier:
        new = []
        for y in frontier:
            for g in gens:
                z = int(A.add_table[y, g])
                if z not in span:
                    span.add(z)
                    new.append(z)
        frontier = new
    return span


def _congruence_unit_gens(A: LocalRing, level: int) -> list[int]:
    """Greedy generators of the multiplicative group 1 + m^level."""
    members = A.one_index + np.arange(A.q ** (A.length - level))
    gens, span = [], {A.one_index}
    for x in members.tolist():
        if x in span:
            continue
        gens.append(x)
        frontier = list(span)
        while frontier:
            new = []
            for y in frontier:
                for g in gens:
                    z = int(A.mul_table[y, g])
                    if z not in span:
                        span.add(z)
                        new.append(z)
            frontier = new
    return gens


# -- constructors -------------------------------------------------------------

def general_linear(n: int, A: LocalRing) -> GroupPattern:
    return GroupPattern(GL, n, A, GL)


def special_linear(n: int, A: LocalRing) -> GroupPattern:
    return GroupPattern(SL, n, A, SL)


def ambient_group(kind: str, n: int, A: LocalRing) -> GroupPattern:
    if kind not in (GL, SL):
        raise ValueError(f"group kind must be GL or SL, not {kind!r}")
    return GroupPattern(kind, n, A, kind)


def torus(kind: str, n: int, A: LocalRing) -> GroupPattern:
    return GroupPattern("torus", n, A, kind)


def borel(kind: str, n: int, A: LocalRing) -> GroupPattern:
    return GroupPattern("borel", n, A, kind)


def unipotent(kind: str, n: int, A: LocalRing) -> GroupPattern:
    return GroupPattern("unipotent", n, A, kind)


def parabolic(kind: str, shape, A: LocalRing) -> GroupPattern:
    shape = tuple(int(b) for b in shape)
    return GroupPattern("parabolic", sum(shape), A, kind, shape=shape)


def monomial(kind: str, n: int, A: LocalRing) -> GroupPattern:
    return GroupPattern("monomial", n, A, kind)


def congruence_kernel(kind: str, n: int, A: LocalRing, level: int) -> GroupPattern:
    return GroupPattern("kernel", n, A, kind, level=level)


def trivial(kind: str, n: int, A: LocalRing) -> GroupPattern:
    return congruence_kernel(kind, n, A, A.length)


def preimage(residue: GroupPattern, A: LocalRing) -> GroupPattern:
    return GroupPattern("preimage", residue.n, A, residue.ambient, residue=residue)


# -- homomorphisms and lifting ------------------------------------------------

def reduce_hom(g: la.Matrix, length: int) -> la.Matrix:
    """The reduction homomorphism G(A) -> G(A/m^length)."""
    return g.reduce(length)


def lift_point(source: LocalRing, g, kind: str, target: LocalRing) -> la.Matrix:
    """Lift a point of GL_n or SL_n along target -> source.

    GL points lift by zero-filling digits; for SL the first column is then
    divided by the determinant, which reduces to 1 and so leaves the
    reduction unchanged.
    """
    entries = g.entries if isinstance(g, la.Matrix) else np.asarray(g)
    if target.family != source.family or target.field != source.field or target.length < source.length:
        raise ValueError(f"{target} does not reduce onto {source}")
    n = entries.shape[-1]
    if not ambient_group(kind, n, source).contains(entries)[0]:
        raise NotAGroupElement(f"not a point of {kind}{n}({source})")
    h = la.zero_fill(source, entries, target).astype(la.INDEX)
    if kind == SL:
        d = int(la.det(target, h)[0])
        h[:, 0] = target.mul_table[h[:, 0], target.inv_table[d]]
    return la.Matrix(target, h)


def conj(g: la.Matrix, h: la.Matrix) -> la.Matrix:
    return g.conj(h)


def conj_set(g: la.Matrix, S: PointSet) -> PointSet:
    return S.conj(g)


def block_diagonal(A: LocalRing, blocks) -> np.ndarray:
    """Block-diagonal embedding of a tuple of square batches (same length)."""
    sizes = [b.shape[-1] for b in blocks]
    n = sum(sizes)
    out = np.zeros((len(blocks[0]), n, n), dtype=la.INDEX)
    s = 0
    for b, k in zip(blocks, sizes):
        out[:, s:s + k, s:s + k] = b
        s += k
    return out
