"""Text grammars shared by the CLI: field descriptors, GW classes,
coordinate points, and branch seeds.

Field descriptors:

    Q                      the rationals
    F5, F7, ...            odd prime fields
    Q(a):a^2-2             simple extension (minimal polynomial after ':')
    F5(b):b^2-2
    Q(z)                   rational functions
    Q(z)(y):y^2-z^3+z      towers; only the last step may carry a ':'
    Q((t;2;16))            Puiseux series: ramification 2, precision 16

GW classes are sums like ``15<1> + 12<-1>``; the text between angle
brackets is any coefficient expression of the field.  Seeds are
semicolon-separated ``var: expr`` pairs whose expressions may use
fractional powers ``t^(p/m)``.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError
from .fields import (
    PrimeField,
    PuiseuxSeriesField,
    QQ,
    RationalFunctionField,
    SimpleExtension,
)
from .gw import GwElement
from .poly import _tokenize, field_constant, parse as parse_poly


def parse_field(text):
    """Parse a field descriptor string."""
    text = text.strip()
    pos = 0
    if text.startswith("Q"):
        field = QQ
        pos = 1
    elif text.startswith("F"):
        j = 1
        while j < len(text) and text[j].isdigit():
            j += 1
        if j == 1:
            raise ParseError("expected a prime after F", text, 1)
        field = PrimeField(int(text[1:j]))
        pos = j
    else:
        raise ParseError("field must start with Q or F<p>", text, 0)
    while pos < len(text):
        if text.startswith("((", pos):
            close = text.find("))", pos)
            if close < 0:
                raise ParseError("unterminated Puiseux descriptor", text, pos)
            inner = text[pos + 2: close]
            parts = inner.split(";")
            if len(parts) != 3 or parts[0].strip() != "t":
                raise ParseError(
                    "Puiseux descriptor must look like ((t;m;N))", text, pos)
            try:
                ram, steps = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError("ramification and precision must be integers",
                                 text, pos) from None
            field = PuiseuxSeriesField(field, ram, steps)
            pos = close + 2
            continue
        if text[pos] == "(":
            close = text.find(")", pos)
            if close < 0:
                raise ParseError("unterminated '('", text, pos)
            name = text[pos + 1: close].strip()
            if not name.isidentifier():
                raise ParseError(f"bad generator name {name!r}", text, pos + 1)
            pos = close + 1
            if pos < len(text) and text[pos] == ":":
                minpoly_text = text[pos + 1:]
                if not minpoly_text:
                    raise ParseError("missing minimal polynomial", text, pos)
                field = _extension(field, name, minpoly_text, text, pos + 1)
                pos = len(text)
            else:
                field = RationalFunctionField(field, name)
            continue
        raise ParseError(f"unexpected {text[pos]!r}", text, pos)
    return field


def _extension(base, name, minpoly_text, full_text, offset):
    try:
        p = parse_poly(minpoly_text, base, (name,))
    except ParseError as exc:
        raise ParseError(str(exc), full_text, offset + exc.position) from None
    degree = p.degree_in(name)
    coeffs = [base.zero()] * (degree + 1)
    for e, c in p.terms.items():
        coeffs[e[0]] = c
    return SimpleExtension(base, name, coeffs)


def parse_element(text, field):
    """One field element, written in the polynomial coefficient grammar."""
    p = parse_poly(text, field, ())
    return p.coefficient(())


def parse_point(text, field):
    """Comma-separated coordinates."""
    return [parse_element(part, field) for part in text.split(",")]


def parse_gw(text, field):
    """A GW class: ``[mult]<element>`` terms joined by + and -."""
    entries = []
    pos = 0
    sign = 1
    first = True
    n = len(text)
    while pos < n:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        if not first or text[pos] in "+-":
            if text[pos] == "+":
                sign = 1
            elif text[pos] == "-":
                sign = -1
            elif first:
                sign = 1
                pos -= 1
            else:
                raise ParseError("expected + or - between terms", text, pos)
            pos += 1
            while pos < n and text[pos].isspace():
                pos += 1
        first = False
        mult = 0
        digits = False
        while pos < n and text[pos].isdigit():
            mult = mult * 10 + int(text[pos])
            pos += 1
            digits = True
        if not digits:
            mult = 1
        if pos >= n or text[pos] != "<":
            raise ParseError("expected '<'", text, pos)
        close = text.find(">", pos)
        if close < 0:
            raise ParseError("unterminated '<'", text, pos)
        element = parse_element(text[pos + 1: close], field)
        entries.append((element, sign * mult))
        pos = close + 1
    result = GwElement.zero(field)
    for element, mult in entries:
        result = result + GwElement.symbol(element) * mult
    return result


# ---------------------------------------------------------------------------
# seeds: series expressions with fractional powers of t
# ---------------------------------------------------------------------------

def parse_series(text, series_field):
    """A truncated-series expression: sums of products of coefficients and
    powers t^(p/m); exponent denominators must divide the ramification."""
    tokens = _tokenize(text)
    parser = _SeriesParser(text, tokens, series_field)
    value = parser.expr()
    tok = parser.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected {tok[1]!r}", text, tok[2])
    return value


class _SeriesParser:
    def __init__(self, text, tokens, field):
        self.text = text
        self.tokens = tokens
        self.field = field
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
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}",
                             self.text, tok[2])
        return tok

    def expr(self):
        sign = 1
        if self.peek()[0] == "-":
            self.advance()
            sign = -1
        acc = self.term() * sign
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
        if tok[0] == "-":
            self.advance()
            return -self.factor()
        if tok[0] == "num":
            self.advance()
            value = Fraction(tok[1])
            if self.peek()[0] == "/":
                self.advance()
                den = self.expect("num")
                value = Fraction(tok[1], den[1])
            return self.field.from_fraction(value)
        if tok[0] == "name":
            self.advance()
            if tok[1] == "t":
                exponent = Fraction(self.field.ramification,
                                    self.field.ramification)
                if self.peek()[0] == "^":
                    self.advance()
                    exponent = self._exponent()
                key = exponent * self.field.ramification
                if key.denominator != 1:
                    raise ParseError(
                        f"exponent {exponent} needs ramification divisible by "
                        f"{exponent.denominator}", self.text, tok[2])
                return self.field.from_terms([(int(key), 1)])
            constant = field_constant(self.field, tok[1])
            if constant is None:
                raise ParseError(f"unknown name {tok[1]!r}", self.text, tok[2])
            if self.peek()[0] == "^":
                self.advance()
                e = self.expect("num")
                return constant ** e[1]
            return constant
        if tok[0] == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {tok[1]!r}", self.text, tok[2])

    def _exponent(self):
        tok = self.peek()
        if tok[0] == "num":
            self.advance()
            return Fraction(tok[1])
        if tok[0] == "(":
            self.advance()
            num = self.expect("num")
            self.expect("/")
            den = self.expect("num")
            self.expect(")")
            return Fraction(num[1], den[1])
        raise ParseError("expected an exponent", self.text, tok[2])


def parse_seed(text, series_field, variables):
    """Seeds like ``x1: t^(1/2)*1; x2: -t`` -> coordinate vector."""
    assignments = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise ParseError("seed entries look like 'var: expr'", text,
                             text.find(chunk))
        name, expr = chunk.split(":", 1)
        name = name.strip()
        if name not in variables:
            raise ParseError(f"unknown seed variable {name!r}", text,
                             text.find(chunk))
        assignments[name] = parse_series(expr.strip(), series_field)
    missing = [v for v in variables if v not in assignments]
    if missing:
        raise ParseError(f"seed misses {missing}", text, len(text))
    return [assignments[v] for v in variables]


def seed_ramification(text):
    """Least ramification making all t-exponents in a seed integral."""
    ram = 1
    for chunk in text.split(";"):
        if ":" in chunk:
            chunk = chunk.split(":", 1)[1]
        tokens = _tokenize(chunk)
        for i, tok in enumerate(tokens):
            if tok[0] == "(" and i + 3 < len(tokens) \
                    and tokens[i + 1][0] == "num" and tokens[i + 2][0] == "/" \
                    and tokens[i + 3][0] == "num":
                frac = Fraction(tokens[i + 1][1], tokens[i + 3][1])
                ram = ram * frac.denominator // _gcd(ram, frac.denominator)
    return ram


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# variable inference for CLI polynomial inputs -------------------------------

ALLOWED_VARIABLES = tuple(f"x{i}" for i in range(1, 10)) + ("u", "y", "z", "t")


def infer_variables(texts, field, force_t=False):
    """Collect variable names used across polynomial inputs, in canonical
    order (x1..x9 first, then u, y, z, with t last)."""
    seen = set()
    for text in texts:
        for kind, value, pos in _tokenize(text):
            if kind != "name":
                continue
            if field_constant(field, value) is not None:
                continue
            if value not in ALLOWED_VARIABLES:
                raise ParseError(
                    f"{value!r} is neither a variable (x1..x9, u, y, z, t) "
                    "nor a generator of the field", text, pos)
            seen.add(value)
    if force_t:
        seen.add("t")
    ordered = [v for v in ALLOWED_VARIABLES if v in seen and v != "t"]
    if "t" in seen:
        ordered.append("t")
    return tuple(ordered)
