"""Batched matrix arithmetic over a LocalRing.

A batch is an integer array of shape ``(B, n, n)`` holding element indices;
every routine here works through the ring's lookup tables so whole batches
are processed with numpy fancy indexing.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .rings import LocalRing, RingElement, format_digits, parse_digits, ring_make

INDEX = np.intp


class SingularMatrixError(ArithmeticError):
    pass


class DimensionError(ValueError):
    pass


def identity(A: LocalRing, n: int, batch: int | None = None) -> np.ndarray:
    eye = np.eye(n, dtype=INDEX) * A.one_index
    if batch is None:
        return eye
    return np.broadcast_to(eye, (batch, n, n)).copy()


def elementary(A: LocalRing, n: int, i: int, j: int, a: int) -> np.ndarray:
    """I + a*E_ij (for i == j this is the diagonal matrix with 1 + a at i)."""
    m = identity(A, n)
    m[i, j] = A.add_table[m[i, j], a]
    return m


def diagonal(A: LocalRing, values) -> np.ndarray:
    n = len(values)
    m = np.zeros((n, n), dtype=INDEX)
    m[np.arange(n), np.arange(n)] = values
    return m


def as_batch(X) -> np.ndarray:
    X = np.asarray(X, dtype=INDEX)
    return X[None] if X.ndim == 2 else X


def matmul(A: LocalRing, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Entrywise-table product of two broadcastable batches."""
    X, Y = np.broadcast_arrays(as_batch(X), as_batch(Y))
    n = X.shape[-1]
    add, mul = A.add_table, A.mul_table
    out = np.empty(X.shape, dtype=INDEX)
    for i in range(n):
        for j in range(n):
            acc = mul[X[:, i, 0], Y[:, 0, j]]
            for k in range(1, n):
                acc = add[acc, mul[X[:, i, k], Y[:, k, j]]]
            out[:, i, j] = acc
    return out


def matvec(A: LocalRing, X: np.ndarray, v: np.ndarray) -> np.ndarray:
    n = X.shape[-1]
    out = np.empty(v.shape, dtype=INDEX)
    for i in range(n):
        acc = A.mul_table[X[..., i, 0], v[..., 0]]
        for k in range(1, n):
            acc = A.add_table[acc, A.mul_table[X[..., i, k], v[..., k]]]
        out[..., i] = acc
    return out


@lru_cache(maxsize=None)
def _permutations(n: int):
    perms, signs = [], []
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        perms.append(perm)
        signs.append(inversions % 2)
    return perms, signs


MAX_LEIBNIZ = 6


def det(A: LocalRing, X: np.ndarray) -> np.ndarray:
    """Leibniz expansion; returns one element index per matrix in the batch."""
    X = as_batch(X)
    n = X.shape[-1]
    if n > MAX_LEIBNIZ:
        raise DimensionError(f"determinant of {n}x{n} matrices is not supported")
    add, mul, neg = A.add_table, A.mul_table, A.neg_table
    total = np.zeros(len(X), dtype=INDEX)
    for perm, odd in zip(*_permutations(n)):
        term = X[:, 0, perm[0]]
        for i in range(1, n):
            term = mul[term, X[:, i, perm[i]]]
        total = add[total, neg[term] if odd else term]
    return total


def is_invertible(A: LocalRing, X: np.ndarray) -> np.ndarray:
    return A.unit_mask[det(A, X)]


def inverse(A: LocalRing, X: np.ndarray, check: bool = True):
    """Gauss-Jordan elimination with unit pivots.

    With ``check`` a singular matrix anywhere in the batch raises; otherwise
    returns ``(inverses, ok_mask)`` with garbage rows where ok is False.
    A single matrix gives a single matrix back.
    """
    single = np.ndim(X) == 2
    M = as_batch(X).copy()
    B, n, _ = M.shape
    inv = identity(A, n, B)
    ok = np.ones(B, dtype=bool)
    rows = np.arange(B)
    add, mul, neg = A.add_table, A.mul_table, A.neg_table
    for c in range(n):
        units = A.unit_mask[M[:, c:, c]]
        has = units.any(axis=1)
        ok &= has
        piv = np.argmax(units, axis=1) + c
        for T in (M, inv):
            top = T[rows, c].copy()
            T[rows, c] = T[rows, piv]
            T[rows, piv] = top
        s = A.inv_table[M[:, c, c]]
        s = np.where(s < 0, 0, s)
        M[:, c] = mul[s[:, None], M[:, c]]
        inv[:, c] = mul[s[:, None], inv[:, c]]
        for i in range(n):
            if i == c:
                continue
            f = neg[M[:, i, c]][:, None]
            M[:, i] = add[M[:, i], mul[f, M[:, c]]]
            inv[:, i] = add[inv[:, i], mul[f, inv[:, c]]]
    if single:
        inv = inv[0]
    if check:
        if not ok.all():
            raise SingularMatrixError(f"matrix {int(np.argmin(ok))} of the batch is not invertible")
        return inv
    return inv, ok


def adjugate(A: LocalRing, X: np.ndarray) -> np.ndarray:
    """Classical adjoint via cofactors; used as an inversion oracle."""
    X = as_batch(X)
    B, n, _ = X.shape
    if n == 1:
        return identity(A, 1, B)
    out = np.empty_like(X)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(X, j, axis=1), i, axis=2)
            d = det(A, minor)
            out[:, i, j] = A.neg_table[d] if (i + j) % 2 else d
    return out


def conjugate(A: LocalRing, G: np.ndarray, H: np.ndarray, G_inv: np.ndarray | None = None) -> np.ndarray:
    """g h g^-1 over broadcastable batches."""
    if G_inv is None:
        G_inv = inverse(A, G)
    return matmul(A, matmul(A, G, H), G_inv)


def power(A: LocalRing, X: np.ndarray, e: int) -> np.ndarray:
    X = as_batch(X)
    result = identity(A, X.shape[-1], len(X))
    base = X
    while e:
        if e & 1:
            result = matmul(A, result, base)
        e >>= 1
        if e:
            base = matmul(A, base, base)
    return result


def reduce_entries(A: LocalRing, X: np.ndarray, length: int) -> np.ndarray:
    """Entrywise reduction to the length-``length`` ring of the same family."""
    if not 1 <= length <= A.length:
        raise ValueError(f"length {length} outside 1..{A.length}")
    return np.asarray(X) // A.q ** (A.length - length)


def zero_fill(A: LocalRing, X: np.ndarray, target: LocalRing) -> np.ndarray:
    """Digit extension by zeros from A to a longer ring of the same family."""
    return np.asarray(X) * A.q ** (target.length - A.length)


class Matrix:
    """A single square matrix over a LocalRing, immutable."""

    __slots__ = ("ring", "entries")

    def __init__(self, ring: LocalRing, entries):
        arr = np.array(entries, dtype=INDEX)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= ring.cardinality):
            raise ValueError(f"entries outside {ring}")
        arr.setflags(write=False)
        self.ring = ring
        self.entries = arr

    @classmethod
    def from_elements(cls, rows) -> Matrix:
        rows = [list(r) for r in rows]
        ring = rows[0][0].ring
        return cls(ring, [[ring.element(x).index for x in r] for r in rows])

    @classmethod
    def identity(cls, ring: LocalRing, n: int) -> Matrix:
        return cls(ring, identity(ring, n))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, ij) -> RingElement:
        return RingElement(self.ring, int(self.entries[ij]))

    def _check(self, other: Matrix):
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other).__name__}")
        if other.ring != self.ring or other.n != self.n:
            raise DimensionError(f"{self.n}x{self.n} over {self.ring} vs {other.n}x{other.n} over {other.ring}")

    def __matmul__(self, other: Matrix) -> Matrix:
        self._check(other)
        return Matrix(self.ring, matmul(self.ring, self.entries, other.entries)[0])

    def det(self) -> RingElement:
        return RingElement(self.ring, int(det(self.ring, self.entries)[0]))

    def inverse(self) -> Matrix:
        return Matrix(self.ring, inverse(self.ring, self.entries))

    def conj(self, h: Matrix) -> Matrix:
        self._check(h)
        return self @ h @ self.inverse()

    def reduce(self, length: int) -> Matrix:
        return Matrix(self.ring.truncate(length), reduce_entries(self.ring, self.entries, length))

    def is_identity(self) -> bool:
        return bool((self.entries == identity(self.ring, self.n)).all())

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and other.ring == self.ring
            and np.array_equal(other.entries, self.entries)
        )

    def __hash__(self):
        return hash((self.ring, self.entries.tobytes()))

    def serialize(self) -> str:
        return serialize(self.ring, self.entries)

    def __repr__(self):
        rows = "; ".join(" ".join(self[i, j].digits() for j in range(self.n)) for i in range(self.n))
        return f"Matrix({self.ring}, [{rows}])"


def serialize(A: LocalRing, X: np.ndarray) -> str:
    X = np.asarray(X)
    body = ",".join(format_digits(A.coords(int(e)), A.q) for e in X.reshape(-1))
    return f"{X.shape[-1]};{A.spec};{body}"


def deserialize(text: str) -> Matrix:
    try:
        n_text, spec, body = text.split(";")
        n = int(n_text)
    except ValueError:
        raise ValueError(f"malformed matrix {text!r}") from None
    A = ring_make(spec)
    cells = body.split(",")
    if len(cells) != n * n:
        raise ValueError(f"expected {n * n} entries, found {len(cells)}")
    return Matrix(A, np.array([parse_digits(c, A).index for c in cells]).reshape(n, n))
