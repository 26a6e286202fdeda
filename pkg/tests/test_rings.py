import itertools

import numpy as np
import pytest
from hypothesis import given

from artinian.rings import (
    EQUAL_CHAR,
    MixedRingError,
    NonUnitError,
    RingSpecError,
    format_digits,
    inv_unit,
    parse_digits,
    reduce,
    ring_make,
    teichmuller,
)
from artinian.rings import _int_index

from .conftest import SMALL_RINGS, ring_with_elements, rings


def test_descriptor_grammar():
    assert ring_make("F3[t]/t^2").spec == "F3[t]/t^2"
    assert ring_make("F4").spec == "F4"
    assert ring_make("Z/8") == ring_make("Z/2^3") == ring_make("W3(F2)")
    assert ring_make("Z/9").spec == "W2(F3)"
    A = ring_make("F9[t]/t^2")
    assert (A.p, A.q, A.length, A.cardinality) == (3, 9, 2, 81)


@pytest.mark.parametrize("spec,token", [
    ("G3", "G"),
    ("F6[t]/t^2", "6"),
    ("Z/6", "6"),
    ("F3[t]/t^0", "0"),
    ("F3[t] / t^2", " "),
])
def test_descriptor_errors_cite_token(spec, token):
    with pytest.raises(RingSpecError) as exc:
        ring_make(spec)
    assert repr(token).strip("'") in str(exc.value)


def test_cardinality_cap():
    with pytest.raises(RingSpecError):
        ring_make("F2[t]/t^11")
    with pytest.raises(RingSpecError):
        ring_make("Z/1024")


@pytest.mark.parametrize("p,r", [(2, 2), (2, 3), (3, 2), (5, 2), (3, 3), (2, 4)])
def test_witt_vectors_are_integers_mod_prime_power(p, r):
    A = ring_make(f"W{r}(F{p})")
    image = [_int_index(A, n) for n in range(p**r)]
    assert sorted(image) == list(range(p**r))
    for a, b in itertools.product(range(p**r), repeat=2):
        assert A.add_table[image[a], image[b]] == image[(a + b) % p**r]
        assert A.mul_table[image[a], image[b]] == image[(a * b) % p**r]


def test_witt_carry():
    A = ring_make("W2(F2)")
    one = A.from_coords([1, 0])
    assert (one + one).coords == (0, 1)
    assert (one + one + one + one) == A.zero


@pytest.mark.parametrize("spec", [s for s in SMALL_RINGS if ring_make(s).cardinality <= 64])
def test_ring_axioms_exhaustive(spec):
    A = ring_make(spec)
    N = A.cardinality
    add, mul = A.add_table, A.mul_table
    idx = np.arange(N)
    assert (add[idx, 0] == idx).all() and (mul[idx, A.one_index] == idx).all()
    assert (add[idx, A.neg_table] == 0).all()
    assert (add == add.T).all() and (mul == mul.T).all()
    a, b, c = np.meshgrid(idx, idx, idx, indexing="ij")
    assert (add[add[a, b], c] == add[a, add[b, c]]).all()
    assert (mul[mul[a, b], c] == mul[a, mul[b, c]]).all()
    assert (mul[a, add[b, c]] == add[mul[a, b], mul[a, c]]).all()


@given(rings())
def test_local_structure(A):
    # units are exactly the elements with nonzero residue, and there are (q-1) q^(r-1) of them
    units = [x for x in A.elements() if x.is_unit()]
    assert len(units) == A.unit_count == (A.q - 1) * A.q ** (A.length - 1)
    assert all(x.residue() != 0 for x in units)
    assert A.pi ** A.length == A.zero
    assert A.length == 1 or A.pi ** (A.length - 1) != A.zero


@given(ring_with_elements(3))
def test_element_arithmetic(data):
    A, (x, y, z) = data
    assert (x + y) * z == x * z + y * z
    assert x - x == A.zero
    assert -(-x) == x
    if x.is_unit():
        assert x * x.inverse() == A.one
        assert inv_unit(x) == x.inverse()
    else:
        with pytest.raises(NonUnitError):
            inv_unit(x)


@given(ring_with_elements(2))
def test_reduction_is_a_homomorphism(data):
    A, (x, y) = data
    for length in range(1, A.length + 1):
        assert reduce(x + y, length) == reduce(x, length) + reduce(y, length)
        assert reduce(x * y, length) == reduce(x, length) * reduce(y, length)
    assert reduce(x, 1).index == x.residue()


@given(ring_with_elements(1))
def test_digit_strings_round_trip(data):
    A, (x,) = data
    text = x.digits()
    assert text == format_digits(x.coords, A.q)
    assert parse_digits(text, A) == x


@given(rings())
def test_teichmuller_is_multiplicative(A):
    for a, b in itertools.product(range(A.q), repeat=2):
        ab = A.field.mul(a, b)
        assert teichmuller(a, A) * teichmuller(b, A) == teichmuller(ab, A)
        assert teichmuller(a, A).residue() == a


def test_equal_characteristic_teichmuller_is_constant_polynomial():
    A = ring_make("F4[t]/t^3")
    assert A.family == EQUAL_CHAR
    assert teichmuller(3, A).coords == (3, 0, 0)


def test_mixed_rings_rejected():
    A, B = ring_make("Z/4"), ring_make("F2[t]/t^2")
    with pytest.raises(MixedRingError):
        A.one + B.one


def test_order_is_lexicographic():
    A = ring_make("F3[t]/t^2")
    xs = sorted(A.elements())
    assert [x.coords for x in xs] == sorted(x.coords for x in xs)


def test_large_field_digits_are_dotted():
    A = ring_make("F11")
    assert A(7).digits() == "7"
    B = ring_make("F16[t]/t^2")
    x = B.from_coords([12, 3])
    assert x.digits() == "12.3"
    assert parse_digits("12.3", B) == x
