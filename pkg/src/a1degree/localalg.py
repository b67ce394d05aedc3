"""Zero-dimensional local algebras by degree truncation.

Given a square system f = (f_1 .. f_n) with an isolated zero at a point x,
the quotient O = k[x_1..x_n]_x / (f) is a finite-dimensional vector space.
It is computed here without Groebner machinery: after translating x to the
origin, row-reduce the span of {monomial * f_i} inside the space of
polynomials of degree < N, for N = 1, 2, ...  When two consecutive
truncation orders give the same quotient dimension, the chain
(f) + m^N = (f) + m^(N+1) has stabilised, so m^N <= (f) + m^(N+1) and
Nakayama's lemma forces m^N into (f) locally: the truncated quotient *is*
the local algebra, and N is recorded as the certificate order.

The surviving monomial basis is the set of graded-lex smallest monomials,
which makes normal forms (and hence the multiplication table) canonical.
"""

from __future__ import annotations

import itertools

from .errors import (
    ArityMismatch,
    JacobianVanishesInAlgebra,
    NotAZero,
    NotIsolated,
)
from .poly import Polynomial, jacobian_determinant

DEFAULT_MAX_ORDER = 32


def _grlex_key(mono):
    # sort key: ascending graded lex
    return (sum(mono), mono)


def _monomials_below(nvars, order):
    out = []
    for total in range(order):
        for combo in itertools.product(range(total + 1), repeat=nvars):
            if sum(combo) == total:
                out.append(combo)
    return sorted(out, key=_grlex_key)


class _Reducer:
    """Row echelon data for the ideal span inside degrees < order."""

    def __init__(self, field, order):
        self.field = field
        self.order = order
        self.pivots = {}  # leading monomial -> normalized row (dict mono->coeff)

    def _leading(self, row):
        # largest monomial under graded lex
        return max(row, key=_grlex_key)

    def reduce(self, row):
        row = dict(row)
        while row:
            lead = self._leading(row)
            piv = self.pivots.get(lead)
            if piv is None:
                return row
            c = row[lead]
            for mono, val in piv.items():
                cur = row.get(mono, self.field.zero()) - c * val
                if cur.is_zero():
                    row.pop(mono, None)
                else:
                    row[mono] = cur
        return row

    def insert(self, row):
        row = self.reduce(row)
        if not row:
            return False
        lead = self._leading(row)
        inv = row[lead].inverse()
        row = {mono: c * inv for mono, c in row.items()}
        # keep fully reduced rows: eliminate the new pivot everywhere
        for other_lead, other in self.pivots.items():
            c = other.get(lead)
            if c is None:
                continue
            for mono, val in row.items():
                cur = other.get(mono, self.field.zero()) - c * val
                if cur.is_zero():
                    other.pop(mono, None)
                else:
                    other[mono] = cur
        self.pivots[lead] = row
        return True


def _ideal_reducer(field, translated, nvars, order):
    reducer = _Reducer(field, order)
    for u in _monomials_below(nvars, order):
        for f in translated:
            row = {}
            for e, c in f.terms.items():
                mono = tuple(a + b for a, b in zip(u, e))
                if sum(mono) < order:
                    row[mono] = row[mono] + c if mono in row else c
            row = {m: c for m, c in row.items() if not c.is_zero()}
            if row:
                reducer.insert(row)
    return reducer


class LocalAlgebra:
    """The finite quotient at an isolated zero, with certificate data."""

    def __init__(self, field, variables, point, system, translated,
                 certificate_order, reducer, basis):
        self.field = field
        self.variables = variables
        self.point = point
        self.system = system
        self.translated = translated
        self.certificate_order = certificate_order
        self._reducer = reducer
        self.basis = basis  # exponent tuples, graded-lex ascending
        self.dimension = len(basis)
        self._index = {mono: i for i, mono in enumerate(basis)}

    def basis_polynomials(self):
        return [Polynomial(self.field, self.variables, {mono: self.field.one()})
                for mono in self.basis]

    def _coords(self, row):
        vec = [self.field.zero()] * self.dimension
        for mono, c in row.items():
            i = self._index.get(mono)
            if i is None:
                raise AssertionError(f"unreduced monomial {mono}")
            vec[i] = c
        return vec

    def reduce_translated(self, p):
        """Normal form of a polynomial already written in coordinates
        centred at the zero."""
        if p.variables != self.variables:
            p = p.with_variables(self.variables)
        row = {}
        for e, c in p.terms.items():
            # degrees >= the certificate order lie in the ideal
            if sum(e) < self.certificate_order:
                row[e] = row[e] + c if e in row else c
        row = {m: c for m, c in row.items() if not c.is_zero()}
        return self._coords(self._reducer.reduce(row))

    def normal_form(self, p):
        """Coordinates of the image of ``p`` (in the original coordinates)
        on the monomial basis."""
        if p.field != self.field:
            p = p.map_coefficients(self.field)
        shift = dict(zip(self.variables, self.point))
        return self.reduce_translated(
            p.with_variables(self.variables).translate(shift))

    def multiply(self, i, j):
        """Coordinates of basis[i] * basis[j]."""
        mono = tuple(a + b for a, b in zip(self.basis[i], self.basis[j]))
        p = Polynomial(self.field, self.variables, {mono: self.field.one()})
        return self.reduce_translated(p)

    def jacobian_image(self):
        jf = jacobian_determinant(self.translated)
        coords = self.reduce_translated(jf)
        if all(c.is_zero() for c in coords):
            raise JacobianVanishesInAlgebra(
                "the jacobian element is zero in the local algebra")
        return coords

    def __repr__(self):
        monos = ", ".join(
            "*".join(f"{v}^{e}" if e > 1 else v
                     for v, e in zip(self.variables, mono) if e) or "1"
            for mono in self.basis)
        return (f"LocalAlgebra(dim={self.dimension}, basis=[{monos}], "
                f"certified at order {self.certificate_order})")


def local_quotient(system, point, max_order=DEFAULT_MAX_ORDER):
    """Build the local algebra of a square system at a zero with
    coordinates in the base field.

    Iterates truncation orders until the quotient dimension stabilises and
    returns the certified algebra; raises ``NotAZero`` if the point is not
    a common zero and ``NotIsolated`` if the dimension keeps growing past
    ``max_order``.
    """
    system = list(system)
    if not system:
        raise ArityMismatch("empty system")
    field = system[0].field
    variables = system[0].x_variables()
    for f in system:
        if f.x_variables() != variables or "t" in f.variables:
            raise ArityMismatch("system components must share plain x-variables")
    if len(point) != len(variables):
        raise ArityMismatch(
            f"point has {len(point)} coordinates for variables {variables}")
    point = [field.element(c) for c in point]
    for f in system:
        if not f.evaluate_at(point).is_zero():
            raise NotAZero(f"{f} does not vanish at the point")
    shift = dict(zip(variables, point))
    translated = [f.with_variables(variables).translate(shift) for f in system]

    nvars = len(variables)
    previous = None
    previous_reducer = None
    for order in range(1, max_order + 1):
        reducer = _ideal_reducer(field, translated, nvars, order)
        dim = len(_monomials_below(nvars, order)) - len(reducer.pivots)
        if previous is not None and dim == previous:
            cert = order - 1
            basis_set = [m for m in _monomials_below(nvars, cert)
                         if m not in previous_reducer.pivots]
            return LocalAlgebra(field, variables, point, system, translated,
                                cert, previous_reducer,
                                sorted(basis_set, key=_grlex_key))
        previous = dim
        previous_reducer = reducer
    raise NotIsolated(
        f"dimension still growing at truncation order {max_order}; "
        "the zero is probably not isolated")
