"""Universal p-typical Witt polynomials over the integers.

The sum, product and negation polynomials are produced by the ghost
recursion ``p^i S_i = w_i(X) + w_i(Y) - sum_{j<i} p^j S_j^{p^(i-j)}`` run in
exact integer arithmetic, so every division by ``p^i`` is an assertable
integrality checkpoint.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .fields import is_prime

MAX_DEPTH = 4
_BITS = 12
_MASK = (1 << _BITS) - 1
_CHECK_PRIME = 2_147_483_647


class WittIntegralityError(RuntimeError):
    """A division in the ghost recursion was not exact (internal defect)."""


class IntegerPolynomial:
    """Sparse polynomial with integer coefficients.

    Monomials are packed into a single int, ``_BITS`` bits per variable, so
    multiplying monomials is adding keys.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[int, int] | None = None):
        self.nvars = nvars
        self.terms = terms if terms is not None else {}

    @classmethod
    def variable(cls, nvars: int, i: int) -> IntegerPolynomial:
        return cls(nvars, {1 << (_BITS * i): 1})

    @classmethod
    def constant(cls, nvars: int, c: int) -> IntegerPolynomial:
        return cls(nvars, {0: c} if c else {})

    def exponents(self, key: int) -> tuple[int, ...]:
        return tuple((key >> (_BITS * i)) & _MASK for i in range(self.nvars))

    def __add__(self, other: IntegerPolynomial) -> IntegerPolynomial:
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return IntegerPolynomial(self.nvars, out)

    def __neg__(self) -> IntegerPolynomial:
        return IntegerPolynomial(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: IntegerPolynomial) -> IntegerPolynomial:
        return self + (-other)

    def scale(self, c: int) -> IntegerPolynomial:
        if c == 0:
            return IntegerPolynomial(self.nvars)
        return IntegerPolynomial(self.nvars, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other: IntegerPolynomial) -> IntegerPolynomial:
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        acc: dict[int, int] = defaultdict(int)
        for mb, cb in b.items():
            for ma, ca in a.items():
                acc[ma + mb] += ca * cb
        return IntegerPolynomial(self.nvars, {m: c for m, c in acc.items() if c})

    def __pow__(self, e: int) -> IntegerPolynomial:
        result = IntegerPolynomial.constant(self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def exact_div(self, c: int) -> IntegerPolynomial:
        out = {}
        for m, v in self.terms.items():
            qt, rem = divmod(v, c)
            if rem:
                raise WittIntegralityError(
                    f"coefficient {v} of monomial {self.exponents(m)} not divisible by {c}"
                )
            out[m] = qt
        return IntegerPolynomial(self.nvars, out)

    def __eq__(self, other):
        return isinstance(other, IntegerPolynomial) and self.terms == other.terms

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def max_degree(self) -> int:
        return max((max(self.exponents(m)) for m in self.terms), default=0)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int]]:
        """Terms in graded lexicographic order (highest first)."""
        items = [(self.exponents(m), c) for m, c in self.terms.items()]
        items.sort(key=lambda t: (sum(t[0]), t[0]), reverse=True)
        return items

    def evaluate(self, point) -> int:
        total = 0
        for exps, c in ((self.exponents(m), c) for m, c in self.terms.items()):
            v = c
            for x, e in zip(point, exps):
                if e:
                    v *= x**e
            total += v
        return total

    def as_arrays(self) -> tuple[np.ndarray, list[int]]:
        keys = list(self.terms)
        exps = np.array([self.exponents(m) for m in keys], dtype=np.int64).reshape(len(keys), self.nvars)
        return exps, [self.terms[m] for m in keys]

    def format(self, names) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e
            )
            mag = abs(c)
            body = mono if mag == 1 and mono else (f"{mag}*{mono}" if mono else str(mag))
            parts.append(("- " if c < 0 else "+ ") + body)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def ghost(coords, p: int) -> list[int]:
    """Ghost components ``w_i = sum_{j<=i} p^j x_j^(p^(i-j))``."""
    return [sum(p**j * coords[j] ** (p ** (i - j)) for j in range(i + 1)) for i in range(len(coords))]


def _ghost_poly(Z: list[IntegerPolynomial], i: int, p: int) -> IntegerPolynomial:
    acc = IntegerPolynomial(Z[0].nvars)
    for j in range(i + 1):
        acc = acc + (Z[j] ** (p ** (i - j))).scale(p**j)
    return acc


@dataclass(frozen=True, eq=False)
class WittPolynomialTable:
    p: int
    n: int
    sums: tuple[IntegerPolynomial, ...]
    products: tuple[IntegerPolynomial, ...]
    negations: tuple[IntegerPolynomial, ...]
    _powers: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def nvars(self) -> int:
        return 2 * (self.n + 1)

    def variable_names(self) -> list[str]:
        return [f"X{i}" for i in range(self.n + 1)] + [f"Y{i}" for i in range(self.n + 1)]

    def families(self):
        return (("S", self.sums), ("P", self.products), ("I", self.negations))


def _recursion(p: int, n: int, target, powers: dict, tag: str) -> list[IntegerPolynomial]:
    """Solve ``w_i(Z) = target(i)`` for Z_0..Z_n, caching Z_j^(p^k)."""
    out: list[IntegerPolynomial] = []
    for i in range(n + 1):
        t = target(i)
        for j in range(i):
            pw = out[j] ** (p ** (i - j))
            powers[(tag, j, i - j)] = pw
            t = t - pw.scale(p**j)
        out.append(t.exact_div(p**i))
    return out


@lru_cache(maxsize=None)
def witt_table(p: int, n: int) -> WittPolynomialTable:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not 0 <= n <= MAX_DEPTH:
        raise ValueError(f"depth {n} outside 0..{MAX_DEPTH}")
    nv = 2 * (n + 1)
    X = [IntegerPolynomial.variable(nv, i) for i in range(n + 1)]
    Y = [IntegerPolynomial.variable(nv, n + 1 + i) for i in range(n + 1)]
    gx = [_ghost_poly(X, i, p) for i in range(n + 1)]
    gy = [_ghost_poly(Y, i, p) for i in range(n + 1)]
    powers: dict = {}
    sums = _recursion(p, n, lambda i: gx[i] + gy[i], powers, "S")
    products = _recursion(p, n, lambda i: gx[i] * gy[i], powers, "P")
    if p == 2:
        negations = _recursion(p, n, lambda i: -gx[i], powers, "I")
    else:
        # odd p: w_i(-X) = -w_i(X) because every exponent p^(i-j) is odd
        negations = [-x for x in X]
    table = WittPolynomialTable(p, n, tuple(sums), tuple(products), tuple(negations), powers)
    check = verify_ghost_identity(table, points=0)
    if not check:
        raise WittIntegralityError(f"ghost identity fails: {check.failure}")
    return table


@dataclass(frozen=True)
class GhostCheck:
    ok: bool
    failure: str | None = None

    def __bool__(self):
        return self.ok


def _symbolic_ghost(table: WittPolynomialTable, tag: str, family, i: int) -> IntegerPolynomial:
    p = table.p
    acc = family[i].scale(p**i)
    for j in range(i):
        pw = table._powers.get((tag, j, i - j))
        if pw is None:
            pw = family[j] ** (p ** (i - j))
        acc = acc + pw.scale(p**j)
    return acc


def _eval_mod(poly: IntegerPolynomial, pts: np.ndarray, P: int) -> np.ndarray:
    """Evaluate at every row of ``pts`` (shape (k, nvars)) modulo P."""
    k = pts.shape[0]
    if poly.is_zero():
        return np.zeros(k, dtype=np.int64)
    exps, coeffs = poly.as_arrays()
    emax = int(exps.max())
    pw = np.ones((k, poly.nvars, emax + 1), dtype=np.int64)
    for e in range(1, emax + 1):
        pw[:, :, e] = pw[:, :, e - 1] * pts % P
    vals = np.tile(np.array([c % P for c in coeffs], dtype=np.int64), (k, 1))
    for v in range(poly.nvars):
        col = exps[:, v]
        if col.any():
            vals = vals * pw[:, v, :][:, col] % P
    return vals.sum(axis=1) % P


def verify_ghost_identity(table: WittPolynomialTable, points: int = 100, seed: int = 0) -> GhostCheck:
    """Check ``w(S)=w(X)+w(Y)``, ``w(P)=w(X)w(Y)``, ``w(I)=-w(X)``.

    The polynomial identities are expanded exactly. With ``points > 0`` both
    sides are also evaluated (mod a 31-bit prime) at random integer points.
    """
    p, n, nv = table.p, table.n, table.nvars
    X = [IntegerPolynomial.variable(nv, i) for i in range(n + 1)]
    Y = [IntegerPolynomial.variable(nv, n + 1 + i) for i in range(n + 1)]
    for i in range(n + 1):
        gx, gy = _ghost_poly(X, i, p), _ghost_poly(Y, i, p)
        for tag, fam, rhs in (
            ("S", table.sums, gx + gy),
            ("P", table.products, gx * gy),
            ("I", table.negations, -gx),
        ):
            if _symbolic_ghost(table, tag, fam, i) != rhs:
                return GhostCheck(False, f"symbolic w_{i}({tag})")
    if points:
        rng = np.random.default_rng(seed)
        P = _CHECK_PRIME
        pts = rng.integers(0, P, size=(points, nv), dtype=np.int64)
        xs, ys = pts[:, : n + 1], pts[:, n + 1 :]
        vals = {tag: [_eval_mod(f, pts, P) for f in fam] for tag, fam in table.families()}

        def ghost_mod(cols, i):
            acc = np.zeros(points, dtype=np.int64)
            for j in range(i + 1):
                e = p ** (i - j)
                acc = (acc + pow(p, j, P) * _powmod(cols[j], e, P)) % P
            return acc

        for i in range(n + 1):
            gx = ghost_mod([xs[:, j] for j in range(n + 1)], i)
            gy = ghost_mod([ys[:, j] for j in range(n + 1)], i)
            if not np.array_equal(ghost_mod(vals["S"], i), (gx + gy) % P):
                return GhostCheck(False, f"numeric w_{i}(S)")
            if not np.array_equal(ghost_mod(vals["P"], i), gx * gy % P):
                return GhostCheck(False, f"numeric w_{i}(P)")
            if not np.array_equal(ghost_mod(vals["I"], i), (-gx) % P):
                return GhostCheck(False, f"numeric w_{i}(I)")
    return GhostCheck(True)


def _powmod(a: np.ndarray, e: int, P: int) -> np.ndarray:
    out = np.ones_like(a)
    base = a % P
    while e:
        if e & 1:
            out = out * base % P
        e >>= 1
        if e:
            base = base * base % P
    return out


def dump_table(table: WittPolynomialTable) -> str:
    names = table.variable_names()
    lines = []
    for tag, fam in table.families():
        for i, f in enumerate(fam):
            lines.append(f"{tag}{i} = {f.format(names)}")
    return "\n".join(lines) + "\n"


def reduce_mod_p(poly: IntegerPolynomial, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Exponent matrix and F_p coefficients of the nonzero terms mod p."""
    exps, coeffs = poly.as_arrays()
    cs = np.array([c % p for c in coeffs], dtype=np.intp)
    keep = cs != 0
    return exps[keep], cs[keep]
