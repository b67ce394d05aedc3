import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from a1degree import errors
from a1degree.fields import (
    PrimeField,
    PuiseuxSeriesField,
    QQ,
    RationalFunctionField,
    SimpleExtension,
    enumerate_elements,
    field_trace,
    is_square,
    smallest_nonresidue,
    square_class,
)


# -- construction guards ----------------------------------------------------

def test_characteristic_two_rejected():
    with pytest.raises(errors.UnsupportedCharacteristic):
        PrimeField(2)


def test_composite_modulus_rejected():
    with pytest.raises(ValueError):
        PrimeField(15)


def test_reducible_minimal_polynomial_rejected(f5):
    # x^2 - 4 = (x-2)(x+2)
    with pytest.raises(errors.ReducibleMinimalPolynomial):
        SimpleExtension(f5, "b", [-4, 0, 1])
    with pytest.raises(errors.ReducibleMinimalPolynomial):
        SimpleExtension(QQ, "a", [-4, 0, 1])


def test_inseparable_minimal_polynomial_rejected(f5):
    # x^5 - 2 has derivative 0 over F_5
    with pytest.raises(errors.InseparableMinimalPolynomial):
        SimpleExtension(f5, "b", [-2, 0, 0, 0, 0, 1])


def test_wild_ramification_rejected(f5):
    with pytest.raises(errors.UnsupportedCharacteristic):
        PuiseuxSeriesField(f5, 5, 8)


# -- is_square --------------------------------------------------------------

def test_is_square_four_over_q():
    assert is_square(QQ.element(4)) is True


def test_is_square_minus_one_mod_5(f5):
    assert is_square(f5.element(-1)) is True


def test_is_square_minus_one_mod_7(f7):
    assert is_square(f7.element(-1)) is False
    # exhaustive cross-check over all of F_7
    squares = {(x * x).data for x in f7.enumerate_elements()}
    assert f7.element(-1).data not in squares


def test_is_square_zero_raises():
    with pytest.raises(errors.ZeroInput):
        is_square(QQ.zero())


def test_is_square_quadratic_extension():
    k = SimpleExtension(QQ, "a", [-2, 0, 1])  # Q(sqrt 2)
    assert is_square(k.element(2)) is True       # (sqrt 2)^2
    assert is_square(k.generator()) is None or is_square(k.generator()) in (True, False)
    assert is_square(k.element(3)) is False
    # 3 + 2*sqrt(2) = (1 + sqrt 2)^2
    assert is_square(k.element(3) + k.generator() * 2) is True


def test_is_square_rational_functions():
    kz = RationalFunctionField(QQ, "z")
    z = kz.variable()
    assert is_square(z * z) is True
    assert is_square(z) is False
    assert is_square(z * z * 4) is True
    assert is_square(z * z * 3) is False


def test_is_square_puiseux():
    field = PuiseuxSeriesField(QQ, 1, 12)
    t = field.t()
    one = field.one()
    assert is_square(t) is False                     # odd valuation
    assert is_square(t * t * (one - t)) is True      # unit tail is a square
    assert is_square(t * t * (one - t) * 3) is False


# -- square_class -----------------------------------------------------------

def test_square_class_eighteen():
    cls = square_class(QQ.element(18))
    assert cls.representative == QQ.element(2)


def test_square_class_puiseux_t_times_unit():
    field = PuiseuxSeriesField(QQ, 1, 12)
    t = field.t()
    cls = square_class(t * (field.one() - t))
    # valuation parity 1, unit class 1: the representative is t itself
    assert (cls.representative - t).is_zero()
    assert cls.key == ("pu", 1, ("Q", 1))


def test_square_class_finite_square_is_one(f5, f49):
    for field in (f5, f49):
        for x in field.enumerate_elements():
            if x.is_zero():
                continue
            if is_square(x):
                assert square_class(x).representative == field.one()
            else:
                assert square_class(x).representative == smallest_nonresidue(field)


def test_square_class_ratfun_squarefree_part(f5):
    kz = RationalFunctionField(QQ, "z")
    z = kz.variable()
    # z^3 - z^2 = z^2 (z - 1) ~ (z - 1) mod squares
    cls = square_class(z ** 3 - z * z)
    assert (cls.representative - (z - 1)).is_zero()


def test_square_class_mod_squares_random():
    rng = random.Random(11)
    for _ in range(40):
        a = Fraction(rng.randint(1, 400), rng.randint(1, 40)) * rng.choice([1, -1])
        b = Fraction(rng.randint(1, 40), rng.randint(1, 40))
        lhs = square_class(QQ.element(a * b * b))
        rhs = square_class(QQ.element(a))
        assert lhs.key == rhs.key


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=10 ** 6),
       st.integers(min_value=1, max_value=1000))
def test_square_class_ab_squared_property(a, b):
    lhs = square_class(QQ.element(Fraction(a) * b * b))
    assert lhs.key == square_class(QQ.element(a)).key


# -- traces -----------------------------------------------------------------

def test_trace_of_sqrt2_is_zero():
    k = SimpleExtension(QQ, "a", [-2, 0, 1])
    assert field_trace(k.generator(), QQ) == QQ.zero()


def test_trace_of_one_in_f25(f5, f25):
    assert field_trace(f25.one(), f5) == f5.element(2)


def test_trace_linearity(f5, f25):
    rng = random.Random(3)
    elements = list(f25.enumerate_elements())
    scalars = list(f5.enumerate_elements())
    for _ in range(25):
        a, b = rng.choice(elements), rng.choice(elements)
        lam = rng.choice(scalars)
        lhs = field_trace(f25.embed(lam) * a + b, f5)
        rhs = lam * field_trace(a, f5) + field_trace(b, f5)
        assert lhs == rhs


def test_trace_tower_composition(f5, f25):
    # degree-4 tower F_5 < F_25 < F_625: traces compose
    n = smallest_nonresidue(f25)
    f625 = SimpleExtension(f25, "d", [-n, f25.zero(), f25.one()])
    rng = random.Random(17)
    elements = list(f25.enumerate_elements())
    for _ in range(20):
        lo = rng.choice(elements)
        hi = rng.choice(elements)
        x = f625.from_vector([lo, hi])
        direct = field_trace(x, f5)
        composed = field_trace(field_trace(x, f25), f5)
        assert direct == composed


def test_trace_needs_extension():
    with pytest.raises(errors.NotAnExtension):
        field_trace(QQ.element(1), PrimeField(5))


# -- enumeration ------------------------------------------------------------

def test_enumerate_f5(f5):
    elements = list(enumerate_elements(f5))
    assert len(elements) == 5
    assert len({x.data for x in elements}) == 5


def test_enumerate_f49(f49):
    assert len(list(enumerate_elements(f49))) == 49


def test_enumerate_f125(f5):
    f125 = None
    # first irreducible cubic in the deterministic scan
    from a1degree.degree import canonical_extension
    f125 = canonical_extension(f5, 3)
    assert f125.order() == 125
    assert len(list(enumerate_elements(f125))) == 125


def test_enumerate_rejects_infinite():
    with pytest.raises(errors.InfiniteField):
        list(enumerate_elements(QQ))


def test_enumerate_respects_bound(f5):
    with pytest.raises(errors.InfiniteField):
        list(enumerate_elements(f5, bound=3))


def test_square_count_exhaustive(f5, f7, f25, f49):
    for field in (f5, f7, f25, f49):
        q = field.order()
        count = sum(1 for x in field.enumerate_elements()
                    if not x.is_zero() and is_square(x))
        assert count == (q - 1) // 2


# -- Puiseux arithmetic -----------------------------------------------------

def test_puiseux_invert_geometric():
    field = PuiseuxSeriesField(QQ, 1, 10)
    inv = (field.one() - field.t()).inverse()
    coeffs = dict(inv.data[0])
    assert all(coeffs[k] == QQ.element(1) for k in range(10))
    assert inv.data[1] == 10


def test_puiseux_sqrt_of_t_needs_doubling():
    field = PuiseuxSeriesField(QQ, 1, 10)
    with pytest.raises(errors.LeadingCoeffNotSquare):
        field.sqrt(field.t())
    doubled = field.with_ramification(2)
    root = doubled.sqrt(doubled.embed(field.t()))
    assert (root - doubled.uniformizer()).is_zero()


def test_puiseux_uniformizer_squares_to_t():
    field = PuiseuxSeriesField(QQ, 2, 12)
    s = field.uniformizer()
    assert (s * s - field.t()).is_zero()
    assert s * s == field.t()


def test_puiseux_sqrt_reports_needed_extension():
    field = PuiseuxSeriesField(QQ, 1, 10)
    with pytest.raises(errors.LeadingCoeffNotSquare) as info:
        field.sqrt(field.element(3) * field.t() ** 2)
    assert info.value.needed_minimal_polynomial is not None


def test_puiseux_precision_rules():
    field = PuiseuxSeriesField(QQ, 1, 8)
    t = field.t()
    exact = field.one() + t  # polynomial: exact
    assert exact.data[1] is None
    inv = exact.inverse()
    assert inv.data[1] == 8  # materialised window
    prod = inv * t ** 3
    assert prod.data[1] == 11  # valuation shifts the guarantee
    mixed = exact + inv
    assert mixed.data[1] == 8


def test_puiseux_zero_to_precision_valuation_raises():
    field = PuiseuxSeriesField(QQ, 1, 6)
    tail = (field.one() - field.t()).inverse() - (field.one() - field.t()).inverse()
    assert tail.is_zero()
    with pytest.raises(errors.PrecisionExhausted):
        field.valuation(tail)


def test_puiseux_division_by_fuzzy_zero():
    field = PuiseuxSeriesField(QQ, 1, 6)
    fuzzy = (field.one() - field.t()).inverse() * 0
    with pytest.raises(errors.ZeroDivision):
        fuzzy.inverse()


# -- mixed arithmetic / embeddings -------------------------------------------

def test_embedding_chain():
    k = SimpleExtension(QQ, "a", [-2, 0, 1])
    field = PuiseuxSeriesField(k, 2, 8)
    x = field.embed(QQ.element(3))
    assert x == field.element(3)
    y = field.embed(k.generator())
    assert (y * y - field.element(2)).is_zero()
    with pytest.raises(errors.FieldMismatch):
        PrimeField(5).embed(QQ.element(1))


def test_mixed_operands_resolve_in_larger_field():
    k = SimpleExtension(QQ, "a", [-2, 0, 1])
    total = QQ.element(3) + k.generator()
    assert total.field == k
    assert field_trace(total, QQ) == QQ.element(6)
