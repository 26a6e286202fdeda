"""Prime-power finite fields with table-driven arithmetic.

Elements of F_q (q = p^d) are the integers 0..q-1; the integer
``a = sum(c_j * p**j)`` stands for the residue class of ``sum(c_j x^j)``
modulo the defining polynomial.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

MAX_FIELD_DEGREE = 6
MAX_FIELD_ORDER = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def prime_power(n: int) -> tuple[int, int] | None:
    """Return ``(p, e)`` with ``n == p**e`` or None if n is not a prime power."""
    if n < 2:
        return None
    p = 2
    while n % p:
        p += 1
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return (p, e) if n == 1 else None


# -- polynomials over F_p, coefficient lists low degree first -----------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    m = _trim([c % p for c in m])
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _trim(a)
    return a


def poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _monic(deg: int, p: int):
    """Monic polynomials of the given degree, low coefficients varying
    lexicographically with the constant term most significant."""
    for low in itertools.product(range(p), repeat=deg):
        yield list(low) + [1]


def is_irreducible(poly: list[int] | tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    f = _trim([c % p for c in poly])
    deg = len(f) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for g in _monic(d, p):
            if not poly_mod(list(f), g, p):
                return False
    return True


@lru_cache(maxsize=None)
def default_modulus(p: int, d: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree d over F_p."""
    for f in _monic(d, p):
        if is_irreducible(f, p):
            return tuple(f)
    raise AssertionError(f"no irreducible polynomial of degree {d} over F_{p}")


class FiniteField:
    """The field F_{p^d} realized as F_p[x]/(modulus)."""

    def __init__(self, p: int, d: int = 1, modulus=None):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if d < 1 or d > MAX_FIELD_DEGREE:
            raise ValueError(f"extension degree {d} outside 1..{MAX_FIELD_DEGREE}")
        if p**d > MAX_FIELD_ORDER:
            raise ValueError(f"field order {p**d} exceeds {MAX_FIELD_ORDER}")
        if modulus is None:
            modulus = default_modulus(p, d)
        else:
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != d + 1 or modulus[-1] != 1:
                raise ValueError(f"modulus {modulus} is not monic of degree {d}")
            if not is_irreducible(modulus, p):
                raise ValueError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.d = d
        self.q = p**d
        self.modulus = modulus
        self._build_tables()

    def _build_tables(self):
        q, p, d = self.q, self.p, self.d
        coeffs = np.array([self.coeffs(a) for a in range(q)], dtype=np.intp).reshape(q, d)
        weights = p ** np.arange(d)
        add = (coeffs[:, None, :] + coeffs[None, :, :]) % p
        self.add_table = (add @ weights).astype(np.intp)
        self.neg_table = (((-coeffs) % p) @ weights).astype(np.intp)
        mul = np.zeros((q, q), dtype=np.intp)
        for a in range(q):
            ca = self.coeffs(a)
            for b in range(a, q):
                prod = poly_mod(poly_mul(ca, self.coeffs(b), p), list(self.modulus), p)
                v = sum(c * p**j for j, c in enumerate(prod))
                mul[a, b] = mul[b, a] = v
        self.mul_table = mul
        inv = np.full(q, -1, dtype=np.intp)
        rows, cols = np.nonzero(mul == 1)
        inv[rows] = cols
        self.inv_table = inv
        for t in (self.add_table, self.neg_table, self.mul_table, self.inv_table):
            t.setflags(write=False)

    def coeffs(self, a: int) -> list[int]:
        out = []
        for _ in range(self.d):
            a, c = divmod(a, self.p)
            out.append(c)
        return out

    def from_coeffs(self, cs) -> int:
        cs = poly_mod(list(cs), list(self.modulus), self.p) if len(cs) > self.d else list(cs)
        return sum((c % self.p) * self.p**j for j, c in enumerate(cs))

    def elements(self) -> range:
        return range(self.q)

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.add_table[a, self.neg_table[b]])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return int(self.inv_table[a])

    def power(self, a: int, e: int) -> int:
        out = 1
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.d, self.modulus) == (
            other.p,
            other.d,
            other.modulus,
        )

    def __hash__(self):
        return hash((self.p, self.d, self.modulus))

    def __repr__(self):
        return f"FiniteField(p={self.p}, d={self.d}, modulus={self.modulus})"

    def __str__(self):
        return f"F{self.q}"


@lru_cache(maxsize=None)
def finite_field(p: int, d: int = 1, modulus: tuple[int, ...] | None = None) -> FiniteField:
    return FiniteField(p, d, modulus)


def solve_linear(F: FiniteField, rows: list[list[int]], rhs: list[int]):
    """Solve ``rows @ x = rhs`` over F.

    Returns ``(particular, null_basis)`` or None when inconsistent. Free
    variables are set to zero in the particular solution; the null basis
    has one vector per free variable, ordered by variable index.
    """
    m = len(rows)
    nvars = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    row = 0
    for col in range(nvars):
        piv = next((i for i in range(row, m) if aug[i][col]), None)
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        s = F.inv(aug[row][col])
        aug[row] = [F.mul(s, v) for v in aug[row]]
        for i in range(m):
            if i != row and aug[i][col]:
                c = aug[i][col]
                aug[i] = [F.sub(v, F.mul(c, w)) for v, w in zip(aug[i], aug[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    if any(aug[i][nvars] for i in range(row, m)):
        return None
    particular = [0] * nvars
    for i, col in enumerate(pivots):
        particular[col] = aug[i][nvars]
    free = [c for c in range(nvars) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * nvars
        v[f] = 1
        for i, col in enumerate(pivots):
            v[col] = F.neg(aug[i][f])
        basis.append(v)
    return particular, basis


def rank(F: FiniteField, vectors: list[list[int]]) -> int:
    if not vectors:
        return 0
    sol = solve_linear(F, [list(col) for col in zip(*vectors)], [0] * len(vectors[0]))
    # columns are the vectors; rank = number of pivots = nvars - nullity
    return len(vectors) - len(sol[1])
