"""Exact arithmetic for a tower of fields.

The tower starts at Q or an odd prime field F_p and grows by three
constructions:

* ``SimpleExtension`` -- adjoin a root of a monic separable polynomial,
* ``RationalFunctionField`` -- adjoin a transcendental variable,
* ``PuiseuxSeriesField`` -- truncated series in t^(1/m) over a coefficient
  field, with explicit precision bookkeeping.

Elements are immutable ``FieldElement`` wrappers around canonical payloads
(``Fraction``, residue, coefficient tuple, reduced fraction of coefficient
tuples, or an exponent->coefficient map).  All operations are pure, so
values can be shared freely across threads.

Characteristic 2 is rejected at construction time, everywhere.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .errors import (
    FieldMismatch,
    InfiniteField,
    InseparableMinimalPolynomial,
    LeadingCoeffNotSquare,
    NotAnExtension,
    PrecisionExhausted,
    ReducibleMinimalPolynomial,
    UnsupportedCharacteristic,
    ZeroDivision,
    ZeroInput,
)

ENUMERATION_BOUND = 10_000


class FieldElement:
    """An element of some field in the tower.  Immutable."""

    __slots__ = ("field", "data")

    def __init__(self, field, data):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("field elements are immutable")

    # arithmetic ------------------------------------------------------

    def _pair(self, other):
        if isinstance(other, FieldElement):
            if other.field == self.field:
                return other
            # mixed arithmetic is resolved in the bigger field
            if self.field.embeds(other.field):
                return self.field.embed(other)
            if other.field.embeds(self.field):
                return other
            raise FieldMismatch(f"cannot combine {self.field} and {other.field}")
        if isinstance(other, (int, Fraction)):
            return self.field.from_fraction(Fraction(other))
        return NotImplemented

    def __add__(self, other):
        o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        if o.field != self.field:  # other is the bigger field
            return o + self
        return FieldElement(self.field, self.field._add(self.data, o.data))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, self.field._neg(self.data))

    def __sub__(self, other):
        o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        if o.field != self.field:
            return o * self
        return FieldElement(self.field, self.field._mul(self.data, o.data))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivision(f"division by zero in {self.field}")
        return FieldElement(self.field, self.field._inv(self.data))

    def __truediv__(self, other):
        o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        if o.field != self.field:
            return o.field.embed(self) / o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # comparisons -----------------------------------------------------

    def is_zero(self):
        return self.field._is_zero(self.data)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        if o.field != self.field:
            return o == self
        return (self - o).is_zero()

    def __hash__(self):
        return hash((self.field, self.field._hashable(self.data)))

    def __repr__(self):
        return self.field.render(self)

    def __str__(self):
        return self.field.render(self)


class Field:
    """Base descriptor.  Subclasses implement payload arithmetic."""

    characteristic = 0

    def zero(self):
        return self.from_fraction(Fraction(0))

    def one(self):
        return self.from_fraction(Fraction(1))

    def element(self, x):
        """Coerce ``x`` (int, Fraction, or embeddable element) into this field."""
        if isinstance(x, FieldElement):
            return self.embed(x)
        return self.from_fraction(Fraction(x))

    # Embeddings follow the construction tower: a field embeds anything
    # that one of its building blocks embeds.
    def embeds(self, other):
        return other == self

    def embed(self, x):
        if x.field == self:
            return x
        raise FieldMismatch(f"no embedding of {x.field} into {self}")

    def is_finite(self):
        return False

    def order(self):
        raise InfiniteField(f"{self} is infinite")

    def enumerate_elements(self, bound=ENUMERATION_BOUND):
        raise InfiniteField(f"cannot enumerate {self}")

    # extension-tower hooks (overridden where meaningful)
    def finite_parent(self):
        """The next field down when self is a finite extension, else None."""
        return None

    def parent_degree(self):
        raise NotAnExtension(f"{self} is not a finite extension")

    def parent_basis(self):
        raise NotAnExtension(f"{self} is not a finite extension")

    def trace_step(self, x):
        raise NotAnExtension(f"{self} is not a finite extension")

    def render(self, x):
        raise NotImplementedError

    def _hashable(self, data):
        return data


# ---------------------------------------------------------------------------
# dense univariate polynomial helpers (coefficient lists, low degree first)
# ---------------------------------------------------------------------------

def _trim(coeffs):
    while coeffs and coeffs[-1].is_zero():
        coeffs = coeffs[:-1]
    return coeffs


def poly_add(a, b):
    if not a and not b:
        return []
    n = max(len(a), len(b))
    field = (a or b)[0].field
    z = field.zero()
    return _trim([(a[i] if i < len(a) else z) + (b[i] if i < len(b) else z)
                  for i in range(n)])


def poly_neg(a):
    return [-c for c in a]


def poly_mul(a, b):
    if not a or not b:
        return []
    field = a[0].field
    out = [field.zero()] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca.is_zero():
            continue
        for j, cb in enumerate(b):
            out[i + j] = out[i + j] + ca * cb
    return _trim(out)


def poly_scale(a, c):
    return _trim([x * c for x in a])


def poly_divmod(a, b):
    if not b:
        raise ZeroDivision("polynomial division by zero")
    field = b[-1].field
    inv_lead = b[-1].inverse()
    rem = list(a)
    quo = [field.zero()] * max(0, len(a) - len(b) + 1)
    while len(rem) >= len(b):
        c = rem[-1] * inv_lead
        k = len(rem) - len(b)
        quo[k] = c
        for i, cb in enumerate(b):
            rem[k + i] = rem[k + i] - c * cb
        rem = _trim(rem)
        if not rem:
            break
    return _trim(quo), rem


def poly_mod(a, b):
    return poly_divmod(a, b)[1]


def poly_monic(a):
    if not a:
        return a
    return poly_scale(a, a[-1].inverse())


def poly_gcd(a, b):
    while b:
        a, b = b, poly_mod(a, b)
    return poly_monic(a)


def poly_xgcd(a, b):
    """Extended gcd; returns (g, u, v) with u*a + v*b = g, g monic."""
    field = (a or b)[0].field
    r0, r1 = list(a), list(b)
    s0, s1 = [field.one()], []
    t0, t1 = [], [field.one()]
    while r1:
        q, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, poly_add(s0, poly_neg(poly_mul(q, s1)))
        t0, t1 = t1, poly_add(t0, poly_neg(poly_mul(q, t1)))
    if not r0:
        return [], s0, t0
    lead_inv = r0[-1].inverse()
    return poly_scale(r0, lead_inv), poly_scale(s0, lead_inv), poly_scale(t0, lead_inv)


def poly_derivative(a):
    return _trim([a[i] * i for i in range(1, len(a))])


def poly_eval(a, x):
    acc = x.field.zero()
    for c in reversed(a):
        acc = acc * x + c
    return acc


def poly_pow_mod(a, n, modulus):
    field = modulus[-1].field
    result = [field.one()]
    base = poly_mod(a, modulus)
    while n:
        if n & 1:
            result = poly_mod(poly_mul(result, base), modulus)
        base = poly_mod(poly_mul(base, base), modulus)
        n >>= 1
    return result


# ---------------------------------------------------------------------------
# the rationals
# ---------------------------------------------------------------------------

class RationalField(Field):
    characteristic = 0

    def from_fraction(self, q):
        return FieldElement(self, Fraction(q))

    def _add(self, a, b):
        return a + b

    def _neg(self, a):
        return -a

    def _mul(self, a, b):
        return a * b

    def _inv(self, a):
        return 1 / a

    def _is_zero(self, a):
        return a == 0

    def render(self, x):
        return str(x.data)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"


QQ = RationalField()


# ---------------------------------------------------------------------------
# prime fields
# ---------------------------------------------------------------------------

def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class PrimeField(Field):
    def __init__(self, p):
        if p == 2:
            raise UnsupportedCharacteristic("characteristic 2 is not supported")
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p

    def from_fraction(self, q):
        q = Fraction(q)
        if q.denominator % self.p == 0:
            raise ZeroDivision(f"denominator of {q} vanishes mod {self.p}")
        return FieldElement(
            self, q.numerator * pow(q.denominator, -1, self.p) % self.p)

    def _add(self, a, b):
        return (a + b) % self.p

    def _neg(self, a):
        return -a % self.p

    def _mul(self, a, b):
        return (a * b) % self.p

    def _inv(self, a):
        return pow(a, -1, self.p)

    def _is_zero(self, a):
        return a == 0

    def is_finite(self):
        return True

    def order(self):
        return self.p

    def enumerate_elements(self, bound=ENUMERATION_BOUND):
        if self.p > bound:
            raise InfiniteField(f"F_{self.p} exceeds enumeration bound {bound}")
        for a in range(self.p):
            yield FieldElement(self, a)

    def frobenius(self, x):
        return x  # x^p = x on the prime field

    def render(self, x):
        return str(x.data)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return f"F{self.p}"


# ---------------------------------------------------------------------------
# simple algebraic extensions
# ---------------------------------------------------------------------------

class SimpleExtension(Field):
    """base(gen) with gen a root of a monic separable minimal polynomial.

    The payload is a coefficient tuple of length deg(m) over the base.
    Irreducibility is decided over Q and over finite fields; over other
    bases it is accepted as a user assertion and recorded on the
    descriptor (``assumed_irreducible``).
    """

    def __init__(self, base, name, minimal_polynomial):
        if base.characteristic == 2:
            raise UnsupportedCharacteristic("characteristic 2 is not supported")
        coeffs = [base.element(c) for c in minimal_polynomial]
        coeffs = _trim(coeffs)
        if len(coeffs) < 3:
            raise ValueError("minimal polynomial must have degree >= 2")
        if not (coeffs[-1] - base.one()).is_zero():
            raise ValueError("minimal polynomial must be monic")
        self.base = base
        self.name = name
        self.minpoly = tuple(coeffs)
        self.degree = len(coeffs) - 1
        self.characteristic = base.characteristic
        g = poly_gcd(list(coeffs), poly_derivative(list(coeffs)))
        if len(g) != 1:
            raise InseparableMinimalPolynomial(
                f"{name}: gcd(m, m') has degree {len(g) - 1}")
        self.assumed_irreducible = False
        self._check_irreducible()

    def _check_irreducible(self):
        m = list(self.minpoly)
        if self.base.is_finite():
            if not _irreducible_over_finite(m, self.base):
                raise ReducibleMinimalPolynomial(
                    f"{self.name}: reducible over {self.base}")
            return
        if isinstance(self.base, RationalField):
            if _has_rational_root(m):
                raise ReducibleMinimalPolynomial(
                    f"{self.name}: has a rational root")
            if self.degree <= 3:
                return  # no root <=> irreducible in degree 2, 3
            for p in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
                reduced = _reduce_mod_p(m, p)
                if reduced is not None and _irreducible_over_finite(
                        reduced, PrimeField(p)):
                    return
            self.assumed_irreducible = True
            return
        self.assumed_irreducible = True

    def from_fraction(self, q):
        vec = [self.base.from_fraction(q)] + [self.base.zero()] * (self.degree - 1)
        return FieldElement(self, tuple(vec))

    def generator(self):
        vec = [self.base.zero()] * self.degree
        if self.degree == 1:
            raise ValueError("degenerate extension")
        vec[1] = self.base.one()
        return FieldElement(self, tuple(vec))

    def from_vector(self, coeffs):
        vec = [self.base.element(c) for c in coeffs]
        if len(vec) > self.degree:
            vec = poly_mod(vec, list(self.minpoly))
        vec = list(vec) + [self.base.zero()] * (self.degree - len(vec))
        return FieldElement(self, tuple(vec[: self.degree]))

    def embeds(self, other):
        return other == self or self.base.embeds(other)

    def embed(self, x):
        if x.field == self:
            return x
        return self.from_vector([self.base.embed(x)])

    def _add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def _neg(self, a):
        return tuple(-x for x in a)

    def _mul(self, a, b):
        prod = poly_mod(poly_mul(_trim(list(a)), _trim(list(b))), list(self.minpoly))
        prod = list(prod) + [self.base.zero()] * (self.degree - len(prod))
        return tuple(prod)

    def _inv(self, a):
        g, u, _ = poly_xgcd(_trim(list(a)), list(self.minpoly))
        if len(g) != 1:
            raise ZeroDivision("not invertible; minimal polynomial not irreducible?")
        inv = poly_scale(u, g[0].inverse())
        inv = list(inv) + [self.base.zero()] * (self.degree - len(inv))
        return tuple(inv[: self.degree])

    def _is_zero(self, a):
        return all(c.is_zero() for c in a)

    def _hashable(self, data):
        return tuple(c.field._hashable(c.data) for c in data)

    def is_finite(self):
        return self.base.is_finite()

    def order(self):
        return self.base.order() ** self.degree

    def enumerate_elements(self, bound=ENUMERATION_BOUND):
        if not self.is_finite():
            raise InfiniteField(f"cannot enumerate {self}")
        if self.order() > bound:
            raise InfiniteField(f"{self} exceeds enumeration bound {bound}")
        base_list = list(self.base.enumerate_elements(bound))
        for vec in itertools.product(base_list, repeat=self.degree):
            yield FieldElement(self, tuple(vec))

    def frobenius(self, x):
        return x ** self.characteristic

    def finite_parent(self):
        return self.base

    def parent_degree(self):
        return self.degree

    def parent_basis(self):
        return [self.generator() ** i for i in range(self.degree)]

    def trace_step(self, x):
        """Trace down to the base: trace of the multiplication-by-x matrix
        in the power basis {1, gen, ..., gen^(d-1)}."""
        total = self.base.zero()
        for i in range(self.degree):
            col = [self.base.zero()] * self.degree
            col[i] = self.base.one()
            prod = self._mul(x.data, tuple(col))
            total = total + prod[i]
        return total

    def render(self, x):
        terms = []
        for i in range(self.degree - 1, -1, -1):
            c = x.data[i]
            if c.is_zero():
                continue
            cs = c.field.render(c)
            if i == 0:
                terms.append(cs)
            else:
                power = self.name if i == 1 else f"{self.name}^{i}"
                if cs == "1":
                    terms.append(power)
                elif cs == "-1":
                    terms.append(f"-{power}")
                elif any(op in cs[1:] for op in "+-") or "/" in cs:
                    terms.append(f"({cs})*{power}")
                else:
                    terms.append(f"{cs}*{power}")
        if not terms:
            return "0"
        out = terms[0]
        for t in terms[1:]:
            out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
        return out

    def __eq__(self, other):
        return (isinstance(other, SimpleExtension)
                and other.base == self.base
                and other.name == self.name
                and len(other.minpoly) == len(self.minpoly)
                and all((a - b).is_zero()
                        for a, b in zip(other.minpoly, self.minpoly)))

    def __hash__(self):
        return hash(("ext", hash(self.base), self.name, len(self.minpoly)))

    def __repr__(self):
        return f"{self.base}({self.name})"


def _has_rational_root(m):
    # rational root theorem on the cleared-denominator integer polynomial
    lcm = 1
    for c in m:
        lcm = lcm * c.data.denominator // math.gcd(lcm, c.data.denominator)
    ints = [int(c.data * lcm) for c in m]
    a0, an = ints[0], ints[-1]
    if a0 == 0:
        return True
    for p in _divisors(abs(a0)):
        for q in _divisors(abs(an)):
            for sign in (1, -1):
                r = Fraction(sign * p, q)
                if sum(c * r ** i for i, c in enumerate(ints)) == 0:
                    return True
    return False


def _divisors(n):
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def _reduce_mod_p(m, p):
    try:
        field = PrimeField(p)
        reduced = [field.from_fraction(c.data) for c in m]
    except (ZeroDivision, UnsupportedCharacteristic):
        return None
    if reduced[-1].is_zero():
        return None
    return reduced


def _irreducible_over_finite(m, base):
    """Rabin's irreducibility test over a finite field."""
    d = len(m) - 1
    if d <= 0:
        return False
    q = base.order()
    x = [base.zero(), base.one()]
    xqd = poly_pow_mod(x, q ** d, m)
    if _trim(poly_add(xqd, poly_neg(x))):
        return False
    for ell in sorted({f for f in _prime_factors(d)}):
        xq = poly_pow_mod(x, q ** (d // ell), m)
        g = poly_gcd(poly_add(xq, poly_neg(x)), m)
        if len(g) != 1:
            return False
    return True


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# rational function fields
# ---------------------------------------------------------------------------

class RationalFunctionField(Field):
    """base(var): reduced fractions num/den of univariate polynomials,
    with den monic and gcd(num, den) = 1."""

    def __init__(self, base, var):
        if base.characteristic == 2:
            raise UnsupportedCharacteristic("characteristic 2 is not supported")
        self.base = base
        self.var = var
        self.characteristic = base.characteristic

    def _make(self, num, den):
        num, den = _trim(list(num)), _trim(list(den))
        if not den:
            raise ZeroDivision("zero denominator")
        if not num:
            return FieldElement(self, ((), (self.base.one(),)))
        g = poly_gcd(num, den)
        if len(g) > 1:
            num = poly_divmod(num, g)[0]
            den = poly_divmod(den, g)[0]
        lead = den[-1]
        if not (lead - self.base.one()).is_zero():
            inv = lead.inverse()
            num = poly_scale(num, inv)
            den = poly_scale(den, inv)
        return FieldElement(self, (tuple(num), tuple(den)))

    def from_fraction(self, q):
        return self._make([self.base.from_fraction(q)], [self.base.one()])

    def from_polynomial(self, coeffs):
        return self._make([self.base.element(c) for c in coeffs], [self.base.one()])

    def variable(self):
        return self.from_polynomial([0, 1])

    def embeds(self, other):
        return other == self or self.base.embeds(other)

    def embed(self, x):
        if x.field == self:
            return x
        return self._make([self.base.embed(x)], [self.base.one()])

    def _add(self, a, b):
        (n1, d1), (n2, d2) = a, b
        num = poly_add(poly_mul(list(n1), list(d2)), poly_mul(list(n2), list(d1)))
        den = poly_mul(list(d1), list(d2))
        return self._make(num, den).data

    def _neg(self, a):
        return (tuple(poly_neg(list(a[0]))), a[1])

    def _mul(self, a, b):
        num = poly_mul(list(a[0]), list(b[0]))
        den = poly_mul(list(a[1]), list(b[1]))
        return self._make(num, den).data

    def _inv(self, a):
        return self._make(list(a[1]), list(a[0])).data

    def _is_zero(self, a):
        return not a[0]

    def _hashable(self, data):
        num, den = data
        return (tuple(c.field._hashable(c.data) for c in num),
                tuple(c.field._hashable(c.data) for c in den))

    def _render_poly(self, coeffs):
        terms = []
        for i in range(len(coeffs) - 1, -1, -1):
            c = coeffs[i]
            if c.is_zero():
                continue
            cs = c.field.render(c)
            if i == 0:
                terms.append(cs)
                continue
            power = self.var if i == 1 else f"{self.var}^{i}"
            if cs == "1":
                terms.append(power)
            elif cs == "-1":
                terms.append(f"-{power}")
            elif any(op in cs[1:] for op in "+-") or "/" in cs:
                terms.append(f"({cs})*{power}")
            else:
                terms.append(f"{cs}*{power}")
        if not terms:
            return "0"
        out = terms[0]
        for t in terms[1:]:
            out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
        return out

    def render(self, x):
        num, den = x.data
        ns = self._render_poly(list(num))
        if len(den) == 1:
            return ns
        ds = self._render_poly(list(den))
        if len(num) > 1:
            ns = f"({ns})"
        return f"{ns}/({ds})"

    def __eq__(self, other):
        return (isinstance(other, RationalFunctionField)
                and other.base == self.base and other.var == self.var)

    def __hash__(self):
        return hash(("ratfun", hash(self.base), self.var))

    def __repr__(self):
        return f"{self.base}({self.var})"


# ---------------------------------------------------------------------------
# truncated Puiseux series
# ---------------------------------------------------------------------------

class PuiseuxSeriesField(Field):
    """Truncated series in t^(1/m) over a coefficient field.

    Payload: (coeffs, prec) where coeffs maps exponent numerators (units of
    1/m) to nonzero coefficients and prec is the exponent bound below which
    every term is guaranteed correct.  prec=None marks an exact element
    (polynomial support, no truncation happened).  The descriptor's
    ``steps`` is the retained window: operations that create infinite tails
    (inversion, square roots) keep ``steps`` terms past the valuation.
    """

    def __init__(self, coefficients, ramification=1, steps=16):
        if coefficients.characteristic == 2:
            raise UnsupportedCharacteristic("characteristic 2 is not supported")
        if ramification < 1:
            raise ValueError("ramification must be positive")
        if coefficients.characteristic and ramification % coefficients.characteristic == 0:
            raise UnsupportedCharacteristic(
                f"ramification {ramification} divisible by char "
                f"{coefficients.characteristic} (wild ramification)")
        if steps < 1:
            raise ValueError("precision window must be positive")
        self.coefficients = coefficients
        self.ramification = ramification
        self.steps = steps
        self.characteristic = coefficients.characteristic

    # construction helpers -------------------------------------------

    def _make(self, coeffs, prec):
        clean = {e: c for e, c in coeffs.items()
                 if not c.is_zero() and (prec is None or e < prec)}
        return FieldElement(self, (_freeze(clean), prec))

    def from_fraction(self, q):
        return self._make({0: self.coefficients.from_fraction(q)}, None)

    def from_terms(self, terms, prec=None):
        """terms: iterable of (exponent numerator, coefficient)."""
        coeffs = {}
        for e, c in terms:
            c = self.coefficients.element(c)
            coeffs[e] = coeffs[e] + c if e in coeffs else c
        return self._make(coeffs, prec)

    def t(self):
        """The series t itself (exponent m in units of 1/m)."""
        return self.from_terms([(self.ramification, 1)])

    def uniformizer(self):
        """t^(1/m)."""
        return self.from_terms([(1, 1)])

    def embeds(self, other):
        if other == self:
            return True
        if isinstance(other, PuiseuxSeriesField):
            return (self.ramification % other.ramification == 0
                    and (self.coefficients == other.coefficients
                         or self.coefficients.embeds(other.coefficients)))
        return self.coefficients.embeds(other)

    def embed(self, x):
        if x.field == self:
            return x
        if isinstance(x.field, PuiseuxSeriesField):
            scale = self.ramification // x.field.ramification
            coeffs = {e * scale: self.coefficients.embed(c)
                      for e, c in x.data[0]}
            prec = None if x.data[1] is None else x.data[1] * scale
            return self._make(coeffs, prec)
        return self._make({0: self.coefficients.embed(x)}, None)

    # precision bookkeeping -------------------------------------------

    @staticmethod
    def _low(data):
        """A lower bound for the valuation (prec for a zero-to-precision)."""
        coeffs, prec = data
        if coeffs:
            return min(e for e, _ in coeffs)
        return prec  # None means genuine zero: valuation +infinity

    def _add(self, a, b):
        coeffs = dict(a[0])
        for e, c in b[0]:
            coeffs[e] = coeffs[e] + c if e in coeffs else c
        prec = _min_prec(a[1], b[1])
        return self._make(coeffs, prec).data

    def _neg(self, a):
        return (_freeze({e: -c for e, c in a[0]}), a[1])

    def _mul(self, a, b):
        out = {}
        for e1, c1 in a[0]:
            for e2, c2 in b[0]:
                e = e1 + e2
                prod = c1 * c2
                out[e] = out[e] + prod if e in out else prod
        la, lb = self._low(a), self._low(b)
        cand = []
        if a[1] is not None:
            cand.append(None if lb is None else a[1] + lb)
        if b[1] is not None:
            cand.append(None if la is None else b[1] + la)
        cand = [c for c in cand if c is not None]
        prec = min(cand) if cand else None
        return self._make(out, prec).data

    def _inv(self, a):
        coeffs, prec = a
        if not coeffs:
            raise ZeroDivision("inverting a series that is zero to precision"
                               if prec is not None else "division by zero")
        amap = dict(coeffs)
        v = min(amap)
        lead = amap[v]
        if len(coeffs) == 1:
            # monomial: exact inverse
            return self._make({-v: lead.inverse()},
                              None if prec is None else prec - 2 * v).data
        window = self.steps if prec is None else min(self.steps, prec - v)
        # series division: solve (sum d_k s^(k-v)) * a = 1 term by term
        inv_lead = lead.inverse()
        d = {}
        for k in range(window):
            acc = self.coefficients.one() if k == 0 else self.coefficients.zero()
            for j in range(k):
                c = amap.get(v + (k - j))
                if c is not None:
                    acc = acc - d[j] * c
            d[k] = acc * inv_lead
        out = {-v + k: c for k, c in d.items()}
        return self._make(out, -v + window).data

    def _is_zero(self, a):
        return not a[0]

    def _hashable(self, data):
        coeffs, prec = data
        return (tuple((e, c.field._hashable(c.data)) for e, c in coeffs), prec)

    # leading-term access ---------------------------------------------

    def valuation(self, x):
        """Valuation in units of 1/m; raises on zero-to-precision input."""
        coeffs, prec = x.data
        if not coeffs:
            if prec is None:
                raise ZeroInput("valuation of zero")
            raise PrecisionExhausted(
                f"series is zero to precision t^({prec}/{self.ramification})")
        return min(e for e, _ in coeffs)

    def leading_coefficient(self, x):
        v = self.valuation(x)
        return dict(x.data[0])[v]

    def precision(self, x):
        return x.data[1]

    def truncate(self, x, prec):
        coeffs = {e: c for e, c in x.data[0] if e < prec}
        old = x.data[1]
        return self._make(coeffs, prec if old is None else min(old, prec))

    def sqrt(self, x):
        """Square root staying inside this field: needs even valuation and a
        square leading coefficient.  Reports the quadratic extension to
        adjoin when the leading coefficient is not a square."""
        v = self.valuation(x)
        if v % 2 != 0:
            raise LeadingCoeffNotSquare(
                f"valuation {v}/{self.ramification} is odd; double the "
                f"ramification to {2 * self.ramification} first")
        lead = self.leading_coefficient(x)
        root = coefficient_sqrt(lead)
        if root is None:
            raise LeadingCoeffNotSquare(
                f"leading coefficient {lead} is not a square in "
                f"{self.coefficients}; adjoin a root of c^2 - ({lead})",
                needed_minimal_polynomial=lead)
        prec = x.data[1]
        window = self.steps if prec is None else min(self.steps, prec - v)
        target = v // 2 + window
        y = self._make({v // 2: root}, v // 2 + 1)
        half = self.from_fraction(Fraction(1, 2))
        # Hensel: each pass of y <- (y + x/y)/2 doubles the correct terms,
        # so the precision claim may be lifted ahead of the arithmetic rules
        guard = 0
        while y.data[1] < target:
            claim = min(2 * y.data[1] - v // 2, target)
            lifted = self._make(dict(y.data[0]), claim)
            y = self.truncate((lifted + x / lifted) * half, claim)
            guard += 1
            if guard > 64:
                raise PrecisionExhausted("square root iteration failed to converge")
        check = y * y - x
        if check.data[0] and min(e for e, _ in check.data[0]) < v + window:
            raise PrecisionExhausted("square root verification failed")
        return y

    def with_ramification(self, m):
        if m % self.ramification != 0:
            raise ValueError("new ramification must be a multiple")
        return PuiseuxSeriesField(self.coefficients, m, self.steps)

    def laurent_field(self):
        return PuiseuxSeriesField(self.coefficients, 1, self.steps)

    # extension-tower hooks -------------------------------------------

    def finite_parent(self):
        if self.ramification > 1:
            return self.laurent_field()
        cp = self.coefficients.finite_parent()
        if cp is not None:
            return PuiseuxSeriesField(cp, 1, self.steps)
        return None

    def parent_degree(self):
        if self.ramification > 1:
            return self.ramification
        if self.coefficients.finite_parent() is not None:
            return self.coefficients.parent_degree()
        raise NotAnExtension(f"{self} is not a finite extension")

    def parent_basis(self):
        if self.ramification > 1:
            s = self.uniformizer()
            return [s ** i for i in range(self.ramification)]
        if self.coefficients.finite_parent() is not None:
            return [self.embed(b) for b in self.coefficients.parent_basis()]
        raise NotAnExtension(f"{self} is not a finite extension")

    def trace_step(self, x):
        if self.ramification > 1:
            # trace in the basis {1, s, ..., s^(m-1)}: m times the part
            # supported on integral exponents
            m = self.ramification
            parent = self.laurent_field()
            coeffs = {e // m: c * m for e, c in x.data[0] if e % m == 0}
            prec = x.data[1]
            if prec is not None:
                prec = -((-prec) // m)  # ceil
            return parent._make(coeffs, prec)
        cfield = self.coefficients
        if cfield.finite_parent() is None:
            raise NotAnExtension(f"{self} is not a finite extension")
        parent = PuiseuxSeriesField(cfield.finite_parent(), 1, self.steps)
        coeffs = {e: cfield.trace_step(c) for e, c in x.data[0]}
        return parent._make(coeffs, x.data[1])

    def render(self, x):
        coeffs, prec = x.data
        m = self.ramification

        def power(e):
            if e == 0:
                return ""
            num, den = e, m
            g = math.gcd(num, den)
            num, den = num // g, den // g
            if den == 1:
                return "t" if num == 1 else f"t^{num}"
            return f"t^({num}/{den})"

        terms = []
        for e in sorted(e for e, _ in coeffs):
            c = dict(coeffs)[e]
            cs = c.field.render(c)
            p = power(e)
            if not p:
                terms.append(cs)
            elif cs == "1":
                terms.append(p)
            elif cs == "-1":
                terms.append(f"-{p}")
            elif any(op in cs[1:] for op in "+-") or "/" in cs:
                terms.append(f"({cs})*{p}")
            else:
                terms.append(f"{cs}*{p}")
        if not terms:
            body = "0"
        else:
            body = terms[0]
            for t in terms[1:]:
                body += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
        if prec is not None:
            p = power(prec) or "1"
            body += f" + O({p})"
        return body

    def __eq__(self, other):
        return (isinstance(other, PuiseuxSeriesField)
                and other.coefficients == self.coefficients
                and other.ramification == self.ramification
                and other.steps == self.steps)

    def __hash__(self):
        return hash(("puiseux", hash(self.coefficients),
                     self.ramification, self.steps))

    def __repr__(self):
        return f"{self.coefficients}((t;{self.ramification};{self.steps}))"


def _freeze(coeffs):
    return tuple(sorted(coeffs.items()))


def _min_prec(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    return min(p1, p2)


# ---------------------------------------------------------------------------
# square roots of coefficients
# ---------------------------------------------------------------------------

def coefficient_sqrt(x):
    """Exact square root of a field element, or None when no root exists
    (or existence cannot be decided)."""
    field = x.field
    if x.is_zero():
        return field.zero()
    if isinstance(field, RationalField):
        q = x.data
        if q < 0:
            return None
        rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
        if rn * rn == q.numerator and rd * rd == q.denominator:
            return field.from_fraction(Fraction(rn, rd))
        return None
    if field.is_finite():
        if euler_criterion(x) != 1:
            return None
        for y in field.enumerate_elements():
            if (y * y - x).is_zero():
                return y
        return None
    if isinstance(field, SimpleExtension) and field.degree == 2:
        return _sqrt_quadratic_extension(x)
    return None


def euler_criterion(x):
    """x^((q-1)/2) as an integer +-1 for nonzero x over a finite field."""
    q = x.field.order()
    val = x ** ((q - 1) // 2)
    if (val - x.field.one()).is_zero():
        return 1
    return -1


def _sqrt_quadratic_extension(x):
    """Solve y^2 = x in base(gen), gen^2 + b*gen + c = 0, via the norm trick."""
    field = x.field
    base = field.base
    b = field.minpoly[1]
    c0 = field.minpoly[0]
    half = base.one() / 2
    # shifted generator beta = gen + b/2 has beta^2 = n in the base
    n = b * b * Fraction(1, 4) - c0
    gen = field.generator()
    beta = gen + field.embed(b * half)
    # write x = p + q*beta
    q_coef = x.data[1]
    p_coef = x.data[0] - q_coef * b * half
    if q_coef.is_zero():
        r = coefficient_sqrt(p_coef)
        if r is not None:
            return field.embed(r)
        if n.is_zero():
            return None
        r = coefficient_sqrt(p_coef / n)
        if r is not None:
            return field.embed(r) * beta
        return None
    # y = u + v*beta with u^2 + v^2 n = p, 2uv = q
    disc = p_coef * p_coef - q_coef * q_coef * n  # the norm of x
    w = coefficient_sqrt(disc)
    if w is None:
        return None
    for candidate in (p_coef + w, p_coef - w):
        u2 = candidate * half
        u = coefficient_sqrt(u2)
        if u is not None and not u.is_zero():
            v = q_coef / (u * 2)
            return field.embed(u) + field.embed(v) * beta
    return None


# ---------------------------------------------------------------------------
# squareness, square classes
# ---------------------------------------------------------------------------

def is_square(a):
    """Exact three-valued squareness test: True, False, or None (unknown).

    Decidable over Q, finite fields, quadratic extensions of decidable
    fields, rational function fields with decidable constants, and
    truncated Puiseux series with decidable coefficients.
    """
    if not isinstance(a, FieldElement):
        raise TypeError("expected a field element")
    if a.is_zero():
        raise ZeroInput("squareness of zero is not defined")
    field = a.field
    if isinstance(field, RationalField):
        return a.data > 0 and _squarefree_int(a.data.numerator * a.data.denominator) == 1
    if field.is_finite():
        return euler_criterion(a) == 1
    if isinstance(field, SimpleExtension) and field.degree == 2:
        root = _sqrt_quadratic_extension(a)
        if root is not None:
            return True
        # the norm trick is a decision procedure when the base is decidable
        base_decidable = isinstance(field.base, RationalField) or field.base.is_finite()
        return False if base_decidable else None
    if isinstance(field, RationalFunctionField):
        sq = _ratfun_square_data(a)
        if sq is None:
            return None
        sf_part, const = sq
        if len(sf_part) > 1:
            return False
        return is_square(const)
    if isinstance(field, PuiseuxSeriesField):
        v = field.valuation(a)
        if v % 2 != 0:
            return False
        return is_square(field.leading_coefficient(a))
    return None


def _squarefree_int(n):
    """Signed squarefree part of a nonzero integer."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    for p, e in _factor_int(n).items():
        if e % 2:
            out *= p
    return sign * out


def _factor_int(n):
    factors = {}
    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    d = 17
    while d * d <= n and d < 1_000_000:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 2
    if n > 1:
        if n < 10 ** 12 or _is_prime(n):
            factors[n] = factors.get(n, 0) + 1
        else:
            # Pollard rho for stray large composites
            d = _pollard_rho(n)
            for part in (d, n // d):
                for p, e in _factor_int(part).items():
                    factors[p] = factors.get(p, 0) + e
    return factors


def _pollard_rho(n):
    if n % 2 == 0:
        return 2
    x, y, c, d = 2, 2, 1, 1
    while d == 1:
        x = (x * x + c) % n
        y = (y * y + c) % n
        y = (y * y + c) % n
        d = math.gcd(abs(x - y), n)
        if d == n:
            c += 1
            x = y = 2
            d = 1
    return d


def _ratfun_square_data(a):
    """(monic squarefree part of num*den, constant class) or None."""
    field = a.field
    num, den = a.data
    f = poly_mul(list(num), list(den))
    lead = f[-1]
    f = poly_monic(f)
    sf = _squarefree_class_part(f, field.base)
    return sf, lead


def _squarefree_class_part(f, base):
    """Monic g with f = g * (square), g squarefree.  f monic."""
    if len(f) <= 1:
        return [base.one()]
    df = poly_derivative(f)
    if not df:
        # f = g(z^p); a p-th power is an odd power of its root mod squares
        p = base.characteristic
        g = []
        for i in range(0, len(f), p):
            c = f[i]
            # coefficient Frobenius root: c^(q/p)
            g.append(c ** (base.order() // p) if base.is_finite() else c)
        return _squarefree_class_part(_trim(g), base)
    a = poly_gcd(f, df)
    if len(a) == 1:
        return f
    b = poly_divmod(f, a)[0]
    c = _squarefree_class_part(a, base)
    d = poly_gcd(b, c)
    rest = poly_mul(poly_divmod(b, d)[0], poly_divmod(c, d)[0])
    return poly_monic(rest)


class SquareClass:
    """An element of F^x/(F^x)^2 with a canonical representative where the
    field admits one.  Classes with equal keys are definitely equal; equal
    classes over fields without canonical keys are detected pairwise via
    ``is_square`` of the ratio."""

    __slots__ = ("field", "representative", "key")

    def __init__(self, field, representative, key):
        self.field = field
        self.representative = representative
        self.key = key

    def __repr__(self):
        return f"<{self.representative}>"

    def same_class(self, other):
        """True / False / None comparison."""
        if self.field != other.field:
            raise FieldMismatch("square classes over different fields")
        if self.key is not None and other.key is not None:
            return self.key == other.key
        try:
            return is_square(self.representative / other.representative)
        except PrecisionExhausted:
            return None

    def inverse_class(self):
        # a and 1/a differ by the square a^2
        return self

    def times(self, other):
        return square_class(self.representative * other.representative)

    def __eq__(self, other):
        return isinstance(other, SquareClass) and self.same_class(other) is True

    def __hash__(self):
        return hash((self.field, self.key))


def smallest_nonresidue(field):
    """First nonsquare in canonical enumeration order of a finite field."""
    for x in field.enumerate_elements():
        if x.is_zero():
            continue
        if euler_criterion(x) == -1:
            return x
    raise ValueError("no nonresidue found; field of characteristic 2?")


def square_class(a):
    """Canonical square class of a nonzero element.

    Normalisation: Q -> signed squarefree integer; finite fields -> 1 or
    the smallest nonresidue; rational functions -> constant class times
    monic squarefree part; Puiseux -> (valuation parity, leading
    coefficient class).  Fields without a canonical choice keep the raw
    representative and compare via ``is_square`` of ratios.
    """
    if a.is_zero():
        raise ZeroInput("square class of zero is not defined")
    field = a.field
    if isinstance(field, RationalField):
        sf = _squarefree_int(a.data.numerator * a.data.denominator)
        return SquareClass(field, field.from_fraction(sf), ("Q", sf))
    if field.is_finite():
        if euler_criterion(a) == 1:
            return SquareClass(field, field.one(), ("sq",))
        return SquareClass(field, smallest_nonresidue(field), ("ns",))
    if isinstance(field, RationalFunctionField):
        data = _ratfun_square_data(a)
        if data is not None:
            sf, const = data
            const_cls = square_class(const)
            rep = field._make(poly_scale(sf, const_cls.representative),
                              [field.base.one()])
            key = None
            if const_cls.key is not None:
                key = ("rf", const_cls.key,
                       tuple(c.field._hashable(c.data) for c in sf))
            return SquareClass(field, rep, key)
    if isinstance(field, PuiseuxSeriesField):
        v = field.valuation(a)
        lead_cls = square_class(field.leading_coefficient(a))
        rep = field.from_terms([(v % 2, lead_cls.representative)])
        key = None if lead_cls.key is None else ("pu", v % 2, lead_cls.key)
        return SquareClass(field, rep, key)
    if isinstance(field, SimpleExtension) and field.degree == 2:
        sq = is_square(a)
        if sq is True:
            return SquareClass(field, field.one(), None)
    return SquareClass(field, a, None)


# ---------------------------------------------------------------------------
# traces along the tower
# ---------------------------------------------------------------------------

def extension_chain(upper, lower):
    """Descriptor chain [upper, ..., lower] through finite-extension steps."""
    chain = [upper]
    current = upper
    while current != lower:
        parent = current.finite_parent()
        if parent is None:
            raise NotAnExtension(f"{lower} is not below {upper} in the tower")
        chain.append(parent)
        current = parent
        if len(chain) > 32:
            raise NotAnExtension("extension chain too deep")
    return chain


def extension_degree(upper, lower):
    chain = extension_chain(upper, lower)
    d = 1
    for f in chain[:-1]:
        d *= f.parent_degree()
    return d


def field_trace(a, down_to):
    """Field trace of ``a`` down the tower to ``down_to``; composes along
    intermediate extensions."""
    if not isinstance(a, FieldElement):
        raise TypeError("expected a field element")
    current = a
    chain = extension_chain(a.field, down_to)
    for field in chain[:-1]:
        current = field.trace_step(current)
    return current


def enumerate_elements(field, bound=ENUMERATION_BOUND):
    """Stream every element of a finite field exactly once."""
    return field.enumerate_elements(bound)
