"""Sparse multivariate polynomials over the field tower.

A polynomial stores its field, an ordered tuple of variable names and a
sparse map from exponent vectors to nonzero coefficients.  The variable
``t`` is the distinguished deformation parameter: it may appear in a
polynomial, but ``gradient`` and the Jacobian/Hessian operators only ever
differentiate the remaining variables.

The text grammar (used by the CLI and by tests) is

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := coefficient | var ('^' nat)? | '(' expr ')'

with coefficients written as integers, fractions ``p/q``, or names of
generators of the coefficient field.  Implicit multiplication is a syntax
error; all errors cite a position.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    ArityMismatch,
    FieldMismatch,
    NonSquareSystem,
    ParseError,
    UnknownVariable,
)
from .fields import FieldElement, PuiseuxSeriesField, RationalFunctionField, SimpleExtension

DEFORMATION_VARIABLE = "t"


class Polynomial:
    __slots__ = ("field", "variables", "terms")

    def __init__(self, field, variables, terms):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "variables", tuple(variables))
        clean = {}
        arity = len(self.variables)
        for exps, coeff in terms.items():
            if len(exps) != arity:
                raise ArityMismatch(
                    f"exponent vector {exps} does not match variables {self.variables}")
            c = field.element(coeff)
            if not c.is_zero():
                clean[tuple(exps)] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("polynomials are immutable")

    # -- construction helpers -----------------------------------------

    @classmethod
    def zero(cls, field, variables):
        return cls(field, variables, {})

    @classmethod
    def constant(cls, field, variables, value):
        return cls(field, variables, {(0,) * len(variables): field.element(value)})

    @classmethod
    def variable(cls, field, variables, name):
        variables = tuple(variables)
        if name not in variables:
            raise UnknownVariable(f"unknown variable {name!r}", name, 0)
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(field, variables, {exps: field.one()})

    # -- ring structure ------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.field != self.field or other.variables != self.variables:
                raise FieldMismatch("polynomials over different rings")
            return other
        return Polynomial.constant(self.field, self.variables, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return Polynomial(self.field, self.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.field, self.variables,
                          {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            c = self.field.element(other)
            return Polynomial(self.field, self.variables,
                              {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                terms[e] = terms[e] + prod if e in terms else prod
        return Polynomial(self.field, self.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Polynomial.constant(self.field, self.variables, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            other = self._coerce(other)
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.field, self.variables,
                     tuple(sorted((e, c.field._hashable(c.data))
                                  for e, c in self.terms.items()))))

    # -- structure -----------------------------------------------------

    def is_zero(self):
        return not self.terms

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name):
        i = self.variables.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), self.field.zero())

    def x_variables(self):
        """Variables that differential operators act on (everything but t)."""
        return tuple(v for v in self.variables if v != DEFORMATION_VARIABLE)

    # -- calculus ------------------------------------------------------

    def partial(self, name):
        i = self.variables.index(name)
        terms = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            new = list(e)
            new[i] -= 1
            key = tuple(new)
            val = c * e[i]
            terms[key] = terms[key] + val if key in terms else val
        return Polynomial(self.field, self.variables, terms)

    # -- evaluation and substitution ------------------------------------

    def evaluate(self, values):
        """Evaluate with every variable assigned.

        ``values`` maps variable names to field elements, all in one target
        field into which the coefficient field embeds (e.g. an extension or
        a Puiseux series field).
        """
        missing = [v for v in self.variables if v not in values]
        if missing:
            raise ArityMismatch(f"no value given for {missing}")
        target = self.field
        for v in self.variables:
            x = values[v]
            if isinstance(x, FieldElement) and x.field != target:
                if x.field.embeds(target):
                    target = x.field
        point = {v: target.element(values[v]) for v in self.variables}
        acc = target.zero()
        for e, c in self.terms.items():
            term = target.element(c)
            for name, exp in zip(self.variables, e):
                if exp:
                    term = term * point[name] ** exp
            acc = acc + term
        return acc

    def evaluate_at(self, point):
        """Evaluate at a coordinate vector for the x-variables (and t, if
        present, must be included at the end)."""
        names = self.variables
        if len(point) != len(names):
            raise ArityMismatch(
                f"point has {len(point)} coordinates, expected {len(names)}")
        return self.evaluate(dict(zip(names, point)))

    def substitute(self, name, replacement):
        """Substitute a polynomial (same ring) or a constant for a variable."""
        i = self.variables.index(name)
        if not isinstance(replacement, Polynomial):
            replacement = Polynomial.constant(self.field, self.variables, replacement)
        replacement = self._coerce(replacement)
        out = Polynomial.zero(self.field, self.variables)
        powers = {0: Polynomial.constant(self.field, self.variables, 1)}
        for e, c in self.terms.items():
            k = e[i]
            if k not in powers:
                powers[k] = replacement ** k
            rest = list(e)
            rest[i] = 0
            out = out + Polynomial(self.field, self.variables, {tuple(rest): c}) * powers[k]
        return out

    def translate(self, assignment):
        """Shift variables: x -> x + a for (name, a) pairs in ``assignment``."""
        out = self
        for name, a in assignment.items():
            shifted = (Polynomial.variable(self.field, self.variables, name)
                       + Polynomial.constant(self.field, self.variables, a))
            out = out.substitute(name, shifted)
        return out

    def drop_variable(self, name):
        i = self.variables.index(name)
        terms = {}
        for e, c in self.terms.items():
            if e[i] != 0:
                raise ArityMismatch(f"{name} still occurs")
            terms[e[:i] + e[i + 1:]] = c
        return Polynomial(self.field, self.variables[:i] + self.variables[i + 1:], terms)

    def with_variables(self, variables):
        """Reinterpret over a variable superset (order preserved on overlap)."""
        variables = tuple(variables)
        positions = []
        for v in self.variables:
            if v not in variables:
                raise ArityMismatch(f"variable {v} missing from {variables}")
            positions.append(variables.index(v))
        terms = {}
        for e, c in self.terms.items():
            new = [0] * len(variables)
            for pos, exp in zip(positions, e):
                new[pos] = exp
            terms[tuple(new)] = c
        return Polynomial(self.field, variables, terms)

    def map_coefficients(self, target_field):
        """Base change: embed every coefficient into ``target_field``."""
        return Polynomial(target_field, self.variables,
                          {e: target_field.element(c) for e, c in self.terms.items()})

    def homogenize(self, newvar="x0"):
        d = self.total_degree()
        variables = (newvar,) + self.variables
        terms = {}
        for e, c in self.terms.items():
            terms[(d - sum(e),) + e] = c
        return Polynomial(self.field, variables, terms)

    # -- rendering -------------------------------------------------------

    def render(self):
        if not self.terms:
            return "0"
        def order(e):
            return (-sum(e), tuple(-x for x in e))
        parts = []
        for e in sorted(self.terms, key=order):
            c = self.terms[e]
            cs = c.field.render(c)
            mono = "*".join(
                (name if exp == 1 else f"{name}^{exp}")
                for name, exp in zip(self.variables, e) if exp)
            if not mono:
                body = f"({cs})" if _needs_parens(cs) else cs
            elif cs == "1":
                body = mono
            elif cs == "-1":
                body = f"-{mono}"
            elif _needs_parens(cs):
                body = f"({cs})*{mono}"
            else:
                body = f"{cs}*{mono}"
            parts.append(body)
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        return self.render()


def _needs_parens(cs):
    return any(op in cs[1:] for op in "+-") or "/" in cs or "*" in cs or "O(" in cs


# ---------------------------------------------------------------------------
# differential operators
# ---------------------------------------------------------------------------

def gradient(f):
    """Partial derivatives with respect to the x-variables; the deformation
    variable t is never differentiated."""
    return tuple(f.partial(v) for v in f.x_variables())


def jacobian_determinant(fs):
    fs = list(fs)
    if not fs:
        raise NonSquareSystem("empty system")
    xvars = fs[0].x_variables()
    for f in fs:
        if f.x_variables() != xvars:
            raise NonSquareSystem("components use different variables")
    if len(fs) != len(xvars):
        raise NonSquareSystem(
            f"{len(fs)} components but {len(xvars)} variables {xvars}")
    rows = [[f.partial(v) for v in xvars] for f in fs]
    return _poly_det(rows)


def hessian_determinant(f):
    return jacobian_determinant(gradient(f))


def _poly_det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = Polynomial.zero(rows[0][0].field, rows[0][0].variables)
    for j in range(n):
        entry = rows[0][j]
        if entry.is_zero():
            continue
        minor = [[rows[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = entry * _poly_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_OPERATORS = set("+-*^()/")


def _tokenize(text):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OPERATORS:
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("num", int(text[i:j]), i))
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", text, i)
    tokens.append(("end", None, len(text)))
    return tokens


def field_constant(field, name):
    """Look up a generator name in the coefficient field tower, returning
    the generator embedded into ``field``, or None."""
    current = field
    lifts = []
    while True:
        if isinstance(current, SimpleExtension):
            if current.name == name:
                x = current.generator()
                for lift in reversed(lifts):
                    x = lift.embed(x)
                return x
            lifts.append(current)
            current = current.base
        elif isinstance(current, RationalFunctionField):
            if current.var == name:
                x = current.variable()
                for lift in reversed(lifts):
                    x = lift.embed(x)
                return x
            lifts.append(current)
            current = current.base
        elif isinstance(current, PuiseuxSeriesField):
            if name == "t":
                x = current.t()
                for lift in reversed(lifts):
                    x = lift.embed(x)
                return x
            lifts.append(current)
            current = current.coefficients
        else:
            return None


class _Parser:
    def __init__(self, text, field, variables):
        self.text = text
        self.field = field
        self.variables = tuple(variables)
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.advance()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", self.text, tok[2])
        return tok

    def parse(self):
        out = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", self.text, tok[2])
        return out

    def expr(self):
        negate = False
        if self.peek()[0] == "-":
            self.advance()
            negate = True
        acc = self.term()
        if negate:
            acc = -acc
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.factor()
        while self.peek()[0] == "*":
            self.advance()
            acc = acc * self.factor()
        return acc

    def factor(self):
        tok = self.peek()
        if tok[0] == "num":
            self.advance()
            value = Fraction(tok[1])
            if self.peek()[0] == "/":
                self.advance()
                den = self.expect("num")
                if den[1] == 0:
                    raise ParseError("zero denominator", self.text, den[2])
                value = Fraction(tok[1], den[1])
            base = Polynomial.constant(self.field, self.variables, value)
            if self.peek()[0] == "^":
                caret = self.advance()
                raise ParseError("exponents apply to variables only",
                                 self.text, caret[2])
            return base
        if tok[0] == "name":
            self.advance()
            mono = self._resolve(tok)
            if self.peek()[0] == "^":
                self.advance()
                exp = self.expect("num")
                return mono ** exp[1]
            return mono
        if tok[0] == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            if self.peek()[0] == "^":
                caret = self.advance()
                raise ParseError("exponents apply to variables only",
                                 self.text, caret[2])
            return inner
        raise ParseError(f"unexpected {tok[1]!r}", self.text, tok[2])

    def _resolve(self, tok):
        name = tok[1]
        if name in self.variables:
            return Polynomial.variable(self.field, self.variables, name)
        constant = field_constant(self.field, name)
        if constant is not None:
            return Polynomial.constant(self.field, self.variables, constant)
        raise UnknownVariable(f"unknown variable {name!r}", self.text, tok[2])


def parse(text, field, variables):
    """Parse the grammar above into a ``Polynomial``; errors cite positions."""
    return _Parser(text, field, variables).parse()
