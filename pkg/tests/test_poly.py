import random
from fractions import Fraction

import pytest

from a1degree import errors
from a1degree.fields import PrimeField, PuiseuxSeriesField, QQ, square_class
from a1degree.poly import (
    Polynomial,
    gradient,
    hessian_determinant,
    jacobian_determinant,
    parse,
)

X12 = ("x1", "x2")


def rand_poly(rng, field, variables, max_deg=3, terms=4):
    out = Polynomial.zero(field, variables)
    span = field.order() if field.is_finite() else 13
    for _ in range(terms):
        exps = tuple(rng.randint(0, max_deg) for _ in variables)
        coeff = field.element(rng.randrange(span) - span // 2)
        out = out + Polynomial(field, variables, {exps: coeff})
    return out


# -- parsing ----------------------------------------------------------------

def test_parse_cusp():
    f = parse("x2^2 - x1^3", QQ, X12)
    assert f.coefficient((0, 2)) == QQ.element(1)
    assert f.coefficient((3, 0)) == QQ.element(-1)
    assert f.total_degree() == 3


def test_parse_zero():
    assert parse("0", QQ, X12).is_zero()


def test_parse_deformation_g():
    g = parse("3*x1 + 2*x2 + 2*x1^3 - t*x1^3", QQ, ("x1", "x2", "t"))
    assert g.coefficient((1, 0, 0)) == QQ.element(3)
    assert g.coefficient((3, 0, 1)) == QQ.element(-1)
    assert g.coefficient((3, 0, 0)) == QQ.element(2)


def test_parse_rational_coefficient():
    f = parse("1/2*x1 - 2/3", QQ, X12)
    assert f.coefficient((1, 0)) == QQ.element(Fraction(1, 2))
    assert f.coefficient((0, 0)) == QQ.element(Fraction(-2, 3))


def test_parse_round_trip():
    rng = random.Random(5)
    f5 = PrimeField(5)
    for field in (QQ, f5):
        for _ in range(20):
            p = rand_poly(rng, field, X12)
            assert parse(p.render(), field, X12) == p


def test_parse_error_positions():
    with pytest.raises(errors.ParseError) as info:
        parse("x1 + 3x2", QQ, X12)
    assert info.value.position == 6
    with pytest.raises(errors.UnknownVariable) as info:
        parse("x1 + w", QQ, X12)
    assert info.value.position == 5
    with pytest.raises(errors.ParseError):
        parse("x1 + ", QQ, X12)
    with pytest.raises(errors.ParseError):
        parse("(x1 + x2)^2", QQ, X12)  # powers attach to variables only


def test_parse_coefficient_outside_field():
    f5 = PrimeField(5)
    with pytest.raises(errors.ZeroDivision):
        parse("1/5*x1", f5, X12)


def test_parse_extension_generator_coefficient():
    from a1degree.fields import SimpleExtension
    k = SimpleExtension(QQ, "a", [-2, 0, 1])
    f = parse("a*x1 + a^2", k, X12)
    assert f.coefficient((1, 0)) == k.generator()
    assert f.coefficient((0, 0)) == k.element(2)


# -- calculus ---------------------------------------------------------------

def test_gradient_cusp():
    f = parse("x2^2 - x1^3", QQ, X12)
    gx = gradient(f)
    assert gx[0] == parse("-3*x1^2", QQ, X12)
    assert gx[1] == parse("2*x2", QQ, X12)


def test_gradient_constant_is_zero_vector():
    f = Polynomial.constant(QQ, X12, 7)
    assert all(g.is_zero() for g in gradient(f))


def test_gradient_of_deformation_skips_t():
    vars3 = ("x1", "x2", "t")
    f = parse("x2^2 - x1^3", QQ, vars3)
    g = parse("3*x1 + 2*x2 + 2*x1^3 - t*x1^3", QQ, vars3)
    ft = f + parse("t", QQ, vars3) * g
    d1, d2 = gradient(ft)
    assert d1 == parse("-3*x1^2 + 3*t + 6*t*x1^2 - 3*t^2*x1^2", QQ, vars3)
    assert d2 == parse("2*x2 + 2*t", QQ, vars3)


def test_jacobian_of_cusp_gradient():
    # hand cofactor expansion: det [[-6 x1, 0], [0, 2]] = -12 x1
    system = [parse("-3*x1^2", QQ, X12), parse("2*x2", QQ, X12)]
    assert jacobian_determinant(system) == parse("-12*x1", QQ, X12)


def test_jacobian_of_identity():
    system = [parse("x1", QQ, X12), parse("x2", QQ, X12)]
    assert jacobian_determinant(system) == Polynomial.constant(QQ, X12, 1)


def test_jacobian_of_diagonal_node():
    # grad(a1 x1^2 + a2 x2^2) = (2 a1 x1, 2 a2 x2): determinant 4 a1 a2
    for a1, a2 in ((1, 1), (1, -1), (3, 5)):
        system = [parse(f"{2 * a1}*x1", QQ, X12),
                  parse(f"{2 * a2}*x2", QQ, X12)]
        jac = jacobian_determinant(system)
        assert jac == Polynomial.constant(QQ, X12, 4 * a1 * a2)
        # the class of 4 a1 a2 is the class of a1 a2
        assert square_class(jac.coefficient((0, 0))).key == \
            square_class(QQ.element(a1 * a2)).key


def test_jacobian_requires_square_system():
    with pytest.raises(errors.NonSquareSystem):
        jacobian_determinant([parse("x1", QQ, X12)])


def test_hessian_examples():
    assert hessian_determinant(parse("x1^2 + x2^2", QQ, X12)) == \
        Polynomial.constant(QQ, X12, 4)
    assert hessian_determinant(parse("x1^2 - x2^2", QQ, X12)) == \
        Polynomial.constant(QQ, X12, -4)
    assert hessian_determinant(parse("x2^2 - x1^3", QQ, X12)) == \
        parse("-12*x1", QQ, X12)


def test_hessian_diagonal_quadric():
    f = parse("3*x1^2 + 5*x2^2", QQ, X12)
    assert hessian_determinant(f) == Polynomial.constant(QQ, X12, 60)


# -- evaluation and substitution ----------------------------------------------

def test_evaluate_cusp_at_origin():
    f = parse("x2^2 - x1^3", QQ, X12)
    assert f.evaluate_at([QQ.zero(), QQ.zero()]).is_zero()
    assert f.evaluate_at([QQ.element(1), QQ.element(1)]).is_zero()
    assert f.evaluate_at([QQ.element(2), QQ.element(1)]) == QQ.element(-7)


def test_evaluate_arity_checked():
    f = parse("x2^2 - x1^3", QQ, X12)
    with pytest.raises(errors.ArityMismatch):
        f.evaluate_at([QQ.zero()])


def test_substitute_into_puiseux_series():
    # -12 x1 at x1 = sqrt(t)/(1-t): geometric series oracle
    field = PuiseuxSeriesField(QQ, 2, 16)
    branch = field.sqrt(field.t()) * (field.one() - field.t()).inverse()
    value = parse("-12*x1", QQ, ("x1",)).evaluate({"x1": branch})
    oracle = field.zero()
    for k in range(8):  # truncation of -12 * sum t^(k + 1/2)
        oracle = oracle + field.from_terms([(2 * k + 1, -12)])
    assert (value - oracle).is_zero()


def test_homogenize_dehomogenize():
    f = parse("x2^2 - x1^3 + x1", QQ, X12)
    big = f.homogenize("x0")
    one = QQ.element(1)
    # setting x0 = 1 recovers f
    restored = big.substitute("x0", Polynomial.constant(QQ, big.variables, one))
    assert restored.drop_variable("x0") == f


def test_translation():
    f = parse("z^2", QQ, ("z",))
    shifted = f.translate({"z": QQ.element(1)})
    assert shifted == parse("z^2 + 2*z + 1", QQ, ("z",))


# -- ring axioms and differential identities -----------------------------------

def test_ring_axioms_random():
    rng = random.Random(23)
    f5 = PrimeField(5)
    for field in (f5, QQ):
        for _ in range(25):
            a = rand_poly(rng, field, X12)
            b = rand_poly(rng, field, X12)
            c = rand_poly(rng, field, X12)
            assert (a + b) + c == a + (b + c)
            assert a * (b + c) == a * b + a * c
            assert a * b == b * a
            assert (a * b) * c == a * (b * c)


def test_euler_relation_on_homogenizations():
    rng = random.Random(29)
    for _ in range(10):
        f = rand_poly(rng, QQ, X12)
        if f.is_zero():
            continue
        big = f.homogenize("x0")
        d = big.total_degree()
        total = Polynomial.zero(QQ, big.variables)
        for v in big.variables:
            total = total + Polynomial.variable(QQ, big.variables, v) * big.partial(v)
        assert total == big * d


def _compose_simultaneous(f, replacements):
    """f(r_1(x), ..., r_n(x)) with all substitutions applied at once."""
    out = Polynomial.zero(f.field, f.variables)
    for exps, coeff in f.terms.items():
        term = Polynomial.constant(f.field, f.variables, coeff)
        for name, e in zip(f.variables, exps):
            if e:
                term = term * replacements[name] ** e
        out = out + term
    return out


def test_jacobian_under_linear_substitution():
    # chain rule: J(f o A) = (J f o A) * det A for linear A
    rng = random.Random(31)
    f7 = PrimeField(7)
    done = 0
    while done < 10:
        a, b, c, d = (rng.randrange(7) for _ in range(4))
        det = (a * d - b * c) % 7
        if det == 0:
            continue
        done += 1
        fs = [rand_poly(rng, f7, X12), rand_poly(rng, f7, X12)]
        x1 = Polynomial.variable(f7, X12, "x1")
        x2 = Polynomial.variable(f7, X12, "x2")
        lin = {"x1": x1 * f7.element(a) + x2 * f7.element(b),
               "x2": x1 * f7.element(c) + x2 * f7.element(d)}
        composed = [_compose_simultaneous(f, lin) for f in fs]
        lhs = jacobian_determinant(composed)
        rhs = _compose_simultaneous(jacobian_determinant(fs), lin) \
            * f7.element(det)
        assert lhs == rhs
