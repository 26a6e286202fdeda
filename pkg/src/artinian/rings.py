"""Finite Artinian local rings: F_q[t]/t^r and truncated Witt rings W_r(F_q).

Every element is a length-r vector of residue-field digits (t-adic digits,
or Witt coordinates). Elements are also numbered by ``index``, the integer
whose base-q expansion reads the digits with ``coords[0]`` most significant,
so integer order is the canonical lexicographic order, reduction to length
r' is ``index // q**(r - r')`` and the units are exactly the indices
``>= q**(r-1)``.

All arithmetic is precomputed into lookup tables when a ring is built.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache, total_ordering

import numpy as np

from . import witt
from .fields import FiniteField, finite_field, prime_power

EQUAL_CHAR = "EqualChar"
UNRAMIFIED = "Unramified"
MAX_CARDINALITY = 1024


class RingSpecError(ValueError):
    """Unparseable or unsupported ring descriptor."""


class NonUnitError(ArithmeticError):
    def __init__(self, element):
        super().__init__(f"{element!r} is not a unit")
        self.element = element


class MixedRingError(TypeError):
    pass


class LocalRing:
    """A finite local ring of one of the two supported families."""

    def __init__(self, family: str, field: FiniteField, length: int):
        if family not in (EQUAL_CHAR, UNRAMIFIED):
            raise RingSpecError(f"unsupported family {family!r}")
        if length < 1:
            raise RingSpecError(f"length {length} must be >= 1")
        if field.q**length > MAX_CARDINALITY:
            raise RingSpecError(
                f"cardinality {field.q}^{length} exceeds the table limit {MAX_CARDINALITY}"
            )
        if family == UNRAMIFIED and length > witt.MAX_DEPTH + 1:
            raise RingSpecError(f"Witt length {length} exceeds the supported {witt.MAX_DEPTH + 1}")
        self.family = family
        self.field = field
        self.length = length
        self.p = field.p
        self.q = field.q
        self.cardinality = field.q**length
        self.witt_table = witt.witt_table(field.p, length - 1) if family == UNRAMIFIED else None
        self._build_tables()
        self.unit_gens = tuple(self._unit_generators())
        self.additive_gens = tuple(self._additive_generators())

    # -- construction ---------------------------------------------------------

    def _coord_array(self) -> np.ndarray:
        N, q, r = self.cardinality, self.q, self.length
        idx = np.arange(N)
        return np.stack([(idx // q ** (r - 1 - i)) % q for i in range(r)], axis=1)

    def _index_of(self, coords: np.ndarray) -> np.ndarray:
        q, r = self.q, self.length
        out = np.zeros(coords.shape[:-1], dtype=np.intp)
        for i in range(r):
            out = out * q + coords[..., i]
        return out

    def _build_tables(self):
        F, N, r = self.field, self.cardinality, self.length
        C = self._coord_array()
        a = np.repeat(C, N, axis=0)
        b = np.tile(C, (N, 1))
        fadd, fmul = F.add_table, F.mul_table
        if self.family == EQUAL_CHAR:
            s = fadd[a, b]
            prod = np.zeros_like(a)
            for k in range(r):
                acc = np.zeros(len(a), dtype=np.intp)
                for i in range(k + 1):
                    acc = fadd[acc, fmul[a[:, i], b[:, k - i]]]
                prod[:, k] = acc
            neg = F.neg_table[C]
        else:
            s = np.stack([self._eval_witt(f, a, b) for f in self.witt_table.sums], axis=1)
            prod = np.stack([self._eval_witt(f, a, b) for f in self.witt_table.products], axis=1)
            neg = np.stack(
                [self._eval_witt(f, C, np.zeros_like(C)) for f in self.witt_table.negations], axis=1
            )
        self.add_table = self._index_of(s).reshape(N, N)
        self.mul_table = self._index_of(prod).reshape(N, N)
        self.neg_table = self._index_of(neg)
        self.sub_table = self.add_table[:, self.neg_table]
        self.unit_mask = np.arange(N) >= N // self.q
        inv = np.full(N, -1, dtype=np.intp)
        rows, cols = np.nonzero(self.mul_table == self.one_index)
        inv[rows] = cols
        self.inv_table = inv
        for t in (self.add_table, self.mul_table, self.neg_table, self.sub_table,
                  self.unit_mask, self.inv_table):
            t.setflags(write=False)

    def _eval_witt(self, poly, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Evaluate an integer Witt polynomial, reduced mod p, at F_q points."""
        F = self.field
        exps, cs = witt.reduce_mod_p(poly, F.p)
        out = np.zeros(len(a), dtype=np.intp)
        if len(cs) == 0:
            return out
        emax = int(exps.max())
        pw = np.zeros((F.q, emax + 1), dtype=np.intp)
        pw[:, 0] = 1
        for e in range(1, emax + 1):
            pw[:, e] = F.mul_table[pw[:, e - 1], np.arange(F.q)]
        cols = np.concatenate([a, b], axis=1)
        for exp, c in zip(exps, cs):
            v = np.full(len(a), int(c), dtype=np.intp)
            for var, e in enumerate(exp):
                if e:
                    v = F.mul_table[v, pw[cols[:, var], e]]
            out = F.add_table[out, v]
        return out

    def _unit_generators(self) -> list[int]:
        units = [x for x in range(self.cardinality) if self.unit_mask[x]]
        gens, span = [], {self.one_index}
        for u in units:
            if u in span:
                continue
            gens.append(u)
            frontier = list(span)
            while frontier:
                new = set()
                for x in frontier:
                    for g in gens:
                        y = int(self.mul_table[x, g])
                        if y not in span:
                            new.add(y)
                span |= new
                frontier = list(new)
        return gens

    def _additive_generators(self) -> list[int]:
        gens, span = [], {0}
        for x in range(self.cardinality):
            if x in span:
                continue
            gens.append(x)
            frontier = list(span)
            while frontier:
                new = set()
                for y in frontier:
                    for g in gens:
                        z = int(self.add_table[y, g])
                        if z not in span:
                            new.add(z)
                span |= new
                frontier = list(new)
        return gens

    # -- descriptors ----------------------------------------------------------

    @property
    def one_index(self) -> int:
        return self.cardinality // self.q

    @property
    def pi_index(self) -> int:
        """The uniformizer: t, or the Witt vector p*1 = (0, 1, 0, ...)."""
        return self.cardinality // self.q**2 if self.length > 1 else 0

    @property
    def spec(self) -> str:
        if self.family == EQUAL_CHAR:
            return f"F{self.q}" if self.length == 1 else f"F{self.q}[t]/t^{self.length}"
        return f"W{self.length}(F{self.q})"

    def __repr__(self):
        return f"LocalRing({self.spec})"

    def __str__(self):
        return self.spec

    def key(self):
        return (self.family, self.field.p, self.field.d, self.field.modulus, self.length)

    def __eq__(self, other):
        return isinstance(other, LocalRing) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __reduce__(self):
        return (_local_ring, (self.family, self.field.p, self.field.d, self.field.modulus, self.length))

    @property
    def is_field(self) -> bool:
        return self.length == 1

    @property
    def unit_count(self) -> int:
        return self.cardinality - self.cardinality // self.q

    def truncate(self, length: int) -> LocalRing:
        if not 1 <= length <= self.length:
            raise ValueError(f"length {length} outside 1..{self.length}")
        if length == self.length:
            return self
        return _local_ring(self.family, self.field.p, self.field.d, self.field.modulus, length)

    def residue_ring(self) -> LocalRing:
        return self.truncate(1)

    # -- elements -------------------------------------------------------------

    def __call__(self, value) -> RingElement:
        return self.element(value)

    def element(self, value) -> RingElement:
        if isinstance(value, RingElement):
            if value.ring != self:
                raise MixedRingError(f"{value!r} does not belong to {self}")
            return value
        if isinstance(value, (list, tuple)):
            return self.from_coords(value)
        value = int(value)
        if not 0 <= value < self.cardinality:
            raise ValueError(f"index {value} outside 0..{self.cardinality - 1}")
        return RingElement(self, value)

    def from_coords(self, coords) -> RingElement:
        coords = list(coords) + [0] * (self.length - len(coords))
        if len(coords) != self.length or any(not 0 <= c < self.q for c in coords):
            raise ValueError(f"bad coordinates {coords} for {self}")
        idx = 0
        for c in coords:
            idx = idx * self.q + int(c)
        return RingElement(self, idx)

    def coords(self, index: int) -> tuple[int, ...]:
        q, r = self.q, self.length
        return tuple((index // q ** (r - 1 - i)) % q for i in range(r))

    def elements(self):
        return [RingElement(self, i) for i in range(self.cardinality)]

    @property
    def zero(self) -> RingElement:
        return RingElement(self, 0)

    @property
    def one(self) -> RingElement:
        return RingElement(self, self.one_index)

    @property
    def pi(self) -> RingElement:
        return RingElement(self, self.pi_index)

    def teichmuller_index(self, a: int) -> int:
        # Witt vector [a] = (a, 0, 0, ...); for F_q[t]/t^r the constant a
        return int(a) * (self.cardinality // self.q)

    def psi_index(self, level: int, a: int) -> int:
        """``pi^level * teichmuller(a)``: identifies k with m^level / m^(level+1)."""
        x = self.teichmuller_index(a)
        for _ in range(level):
            x = int(self.mul_table[self.pi_index, x])
        return x

    def power_index(self, x: int, e: int) -> int:
        out = self.one_index
        for _ in range(e):
            out = int(self.mul_table[out, x])
        return out


@lru_cache(maxsize=None)
def _local_ring(family: str, p: int, d: int, modulus: tuple[int, ...], length: int) -> LocalRing:
    return LocalRing(family, finite_field(p, d, modulus), length)


@total_ordering
@dataclass(frozen=True)
class RingElement:
    ring: LocalRing
    index: int

    @property
    def coords(self) -> tuple[int, ...]:
        return self.ring.coords(self.index)

    def _other(self, other) -> int:
        if isinstance(other, RingElement):
            if other.ring != self.ring:
                raise MixedRingError(f"operands from {self.ring} and {other.ring}")
            return other.index
        if isinstance(other, int):
            return _int_index(self.ring, other)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return RingElement(self.ring, int(self.ring.add_table[self.index, o]))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return RingElement(self.ring, int(self.ring.sub_table[self.index, o]))

    def __rsub__(self, other):
        return RingElement(self.ring, self._other(other)) - self

    def __mul__(self, other):
        o = self._other(other)
        return RingElement(self.ring, int(self.ring.mul_table[self.index, o]))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElement(self.ring, int(self.ring.neg_table[self.index]))

    def __pow__(self, e: int):
        if e < 0:
            return inv_unit(self) ** (-e)
        return RingElement(self.ring, self.ring.power_index(self.index, e))

    def is_unit(self) -> bool:
        return bool(self.ring.unit_mask[self.index])

    def inverse(self) -> RingElement:
        return inv_unit(self)

    def residue(self) -> int:
        return self.coords[0]

    def reduce(self, length: int) -> RingElement:
        return reduce(self, length)

    def digits(self) -> str:
        return format_digits(self.coords, self.ring.q)

    def __lt__(self, other):
        if not isinstance(other, RingElement):
            return NotImplemented
        return (self.ring.spec, self.index) < (other.ring.spec, other.index)

    def __repr__(self):
        return f"{self.ring.spec}<{self.digits()}>"


def _int_index(ring: LocalRing, n: int) -> int:
    """Image of the integer n under Z -> ring."""
    one, acc = ring.one_index, 0
    base = one if n >= 0 else int(ring.neg_table[one])
    for _ in range(abs(n) % (ring.p**ring.length)):
        acc = int(ring.add_table[acc, base])
    return acc


def format_digits(coords, q: int) -> str:
    if q <= 10:
        return "".join(str(c) for c in coords)
    return ".".join(str(c) for c in coords)


def parse_digits(text: str, ring: LocalRing) -> RingElement:
    coords = [int(c) for c in (text.split(".") if ring.q > 10 else text)]
    return ring.from_coords(coords)


def is_unit(x: RingElement) -> bool:
    return x.is_unit()


def inv_unit(x: RingElement) -> RingElement:
    if not x.is_unit():
        raise NonUnitError(x)
    return RingElement(x.ring, int(x.ring.inv_table[x.index]))


def reduce(x: RingElement, length: int) -> RingElement:
    target = x.ring.truncate(length)
    return RingElement(target, x.index // x.ring.q ** (x.ring.length - length))


def residue(x: RingElement) -> int:
    return x.residue()


def teichmuller(a: int, A: LocalRing) -> RingElement:
    if not 0 <= a < A.q:
        raise ValueError(f"{a} is not an element of {A.field}")
    return RingElement(A, A.teichmuller_index(a))


# -- descriptor grammar -----------------------------------------------------

_EQ = re.compile(r"F(\d+)\[t\]/t\^(\d+)")
_FIELD = re.compile(r"F(\d+)")
_WITT = re.compile(r"W(\d+)\(F(\d+)\)")
_ZPOW = re.compile(r"Z/(\d+)\^(\d+)")
_ZN = re.compile(r"Z/(\d+)")


def _field_for(q: int, token: str, modulus) -> FiniteField:
    pp = prime_power(q)
    if pp is None:
        raise RingSpecError(f"field order {q} in {token!r} is not a prime power")
    p, d = pp
    try:
        return finite_field(p, d, tuple(modulus) if modulus is not None else None)
    except ValueError as exc:
        raise RingSpecError(f"{token!r}: {exc}") from None


def ring_make(spec: str, modulus=None) -> LocalRing:
    """Build a ring from ``F<q>[t]/t^<r> | W<r>(F<q>) | Z/<p>^<r> | Z/<p^r>``.

    ``F<q>`` alone is accepted as ``F<q>[t]/t^1``.
    """
    text = spec.strip()
    if any(ch.isspace() for ch in text):
        raise RingSpecError(f"whitespace in ring descriptor {spec!r}")
    try:
        if m := _EQ.fullmatch(text):
            F = _field_for(int(m[1]), f"F{m[1]}", modulus)
            return _local_ring(EQUAL_CHAR, F.p, F.d, F.modulus, _length(m[2], text))
        if m := _FIELD.fullmatch(text):
            F = _field_for(int(m[1]), text, modulus)
            return _local_ring(EQUAL_CHAR, F.p, F.d, F.modulus, 1)
        if m := _WITT.fullmatch(text):
            F = _field_for(int(m[2]), f"F{m[2]}", modulus)
            return _local_ring(UNRAMIFIED, F.p, F.d, F.modulus, _length(m[1], text))
        if m := _ZPOW.fullmatch(text):
            p = int(m[1])
            pp = prime_power(p)
            if pp is None or pp[1] != 1:
                raise RingSpecError(f"{m[1]!r} in {text!r} is not prime")
            F = finite_field(p)
            return _local_ring(UNRAMIFIED, p, 1, F.modulus, _length(m[2], text))
        if m := _ZN.fullmatch(text):
            pp = prime_power(int(m[1]))
            if pp is None:
                raise RingSpecError(f"{m[1]!r} in {text!r} is not a prime power")
            F = finite_field(pp[0])
            return _local_ring(UNRAMIFIED, pp[0], 1, F.modulus, pp[1])
    except RingSpecError:
        raise
    except ValueError as exc:
        raise RingSpecError(f"{text!r}: {exc}") from None
    bad = _first_bad_token(text)
    raise RingSpecError(f"cannot parse ring descriptor {spec!r} at token {bad!r}")


def _length(token: str, text: str) -> int:
    r = int(token)
    if r < 1:
        raise RingSpecError(f"length {token!r} in {text!r} must be >= 1")
    return r


def _first_bad_token(text: str) -> str:
    tokens = re.findall(r"\d+|[A-Za-z]+|.", text)
    if not tokens:
        return text
    head = tokens[0]
    if head not in ("F", "W", "Z"):
        return head
    for tok in tokens[1:]:
        if not (tok.isdigit() or tok in ("[", "]", "t", "/", "^", "(", ")", "F")):
            return tok
    return tokens[-1]
