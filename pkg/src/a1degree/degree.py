"""Local and global A1-degrees.

Three independent routes to the same Grothendieck-Witt classes:

* ``local_degree_simple`` -- at a simple zero q, the class <Jf(q)>
  transferred from the residue field of q;
* ``local_degree_ekl`` -- at any isolated zero, the EKL form: the pairing
  (a, b) |-> eta(ab) on the local algebra, with eta normalised so that the
  jacobian element maps to the algebra dimension;
* ``bezout_form_p1`` -- for endomorphisms A/B of the projective line, the
  symmetric matrix of (A(X)B(Y) - A(Y)B(X))/(X - Y);

plus ``global_degree_finite_field`` / ``global_degree_p1``, which sum
transfers of <Jf> over an exhaustively enumerated fiber, one Frobenius
orbit at a time.  The test-suite cross-checks all of these against each
other.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    ArityMismatch,
    CharDividesDimension,
    DegenerateEkl,
    DegenerateForm,
    DegenerateZero,
    DegreeOrder,
    FiberEscapesBound,
    IrregularValue,
    NotAZero,
    NotCoprime,
)
from .fields import (
    SimpleExtension,
    field_trace,
    poly_gcd,
    smallest_nonresidue,
    _irreducible_over_finite,
)
from .gw import BilinearForm, GwElement, diagonalize, transfer
from .localalg import DEFAULT_MAX_ORDER, local_quotient
from .poly import Polynomial, jacobian_determinant


# ---------------------------------------------------------------------------
# the EKL form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EklForm:
    algebra: object
    eta: tuple          # values of the functional on the monomial basis
    gram: BilinearForm
    gw_class: GwElement


def ekl_form(system, point, max_order=DEFAULT_MAX_ORDER):
    """EKL data of an isolated zero: local algebra, normalised functional,
    Gram matrix and its GW class."""
    algebra = local_quotient(system, point, max_order=max_order)
    field = algebra.field
    d = algebra.dimension
    if field.characteristic and d % field.characteristic == 0:
        raise CharDividesDimension(
            f"char {field.characteristic} divides dim {d}; "
            "the socle construction is not supported")
    jvec = algebra.jacobian_image()
    pivot = max(i for i, c in enumerate(jvec) if not c.is_zero())
    eta = [field.zero()] * d
    eta[pivot] = field.element(d) / jvec[pivot]
    rows = []
    for i in range(d):
        row = []
        for j in range(d):
            coords = algebra.multiply(i, j)
            row.append(sum((eta[k] * coords[k] for k in range(d)),
                           field.zero()))
        rows.append(row)
    gram = BilinearForm(field, rows)
    try:
        cls = diagonalize(gram)
    except DegenerateForm as exc:
        raise DegenerateEkl(
            "EKL Gram matrix is degenerate: this contradicts "
            "well-definedness and indicates a bug") from exc
    return EklForm(algebra=algebra, eta=tuple(eta), gram=gram, gw_class=cls)


def ekl_form_with_eta(algebra, eta):
    """EKL Gram for a caller-supplied admissible functional (used to test
    independence of the choice)."""
    field = algebra.field
    d = algebra.dimension
    jvec = algebra.jacobian_image()
    pairing = sum((eta[k] * jvec[k] for k in range(d)), field.zero())
    if not (pairing - field.element(d)).is_zero():
        raise ValueError("functional is not normalised on the jacobian element")
    rows = [[sum((eta[k] * algebra.multiply(i, j)[k] for k in range(d)),
                 field.zero())
             for j in range(d)] for i in range(d)]
    return BilinearForm(field, rows)


def local_degree_ekl(system, point, max_order=DEFAULT_MAX_ORDER):
    return ekl_form(system, point, max_order=max_order).gw_class


# ---------------------------------------------------------------------------
# simple zeros
# ---------------------------------------------------------------------------

def local_degree_simple(system, point, down_to=None):
    """<Jf(q)>, transferred to ``down_to`` when q lives in an extension.

    ``point`` is a coordinate vector over the base field or over a
    separable extension of it (separability is enforced when extensions
    are constructed)."""
    system = list(system)
    base = system[0].field
    down_to = down_to or base
    point_field = base
    for c in point:
        if hasattr(c, "field") and c.field != base and c.field.embeds(base):
            point_field = c.field
    coords = [point_field.element(c) for c in point]
    local = [f.map_coefficients(point_field) if point_field != base else f
             for f in system]
    for f in local:
        if not f.evaluate_at(coords).is_zero():
            raise NotAZero(f"{f} does not vanish at the point")
    jf = jacobian_determinant(local).evaluate_at(coords)
    if jf.is_zero():
        raise DegenerateZero(
            "jacobian vanishes at the zero; use the EKL route")
    return transfer(GwElement.symbol(jf), down_to)


# ---------------------------------------------------------------------------
# Bezout forms on P^1
# ---------------------------------------------------------------------------

def _as_univariate(p):
    if len(p.variables) != 1:
        raise ArityMismatch(f"{p} is not univariate")
    coeffs = [p.field.zero()] * (p.total_degree() + 1)
    for e, c in p.terms.items():
        coeffs[e[0]] = c
    return coeffs


def bezout_matrix(num, den):
    """The symmetric matrix c_ij of (A(X)B(Y) - A(Y)B(X))/(X - Y)."""
    field = num.field
    a = _as_univariate(num)
    b = _as_univariate(den)
    n = len(a) - 1
    if len(b) - 1 >= n or not b:
        raise DegreeOrder("need deg A > deg B >= 0 (map pointed at infinity)")
    g = poly_gcd(a, b)
    if len(g) != 1:
        raise NotCoprime("A and B share a factor")
    zero = field.zero()
    grid = {}

    def bump(i, j, c):
        if not c.is_zero():
            grid[(i, j)] = grid.get((i, j), zero) + c

    # numerator A(X)B(Y) - A(Y)B(X)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            bump(i, j, ca * cb)
            bump(j, i, -(ca * cb))
    # exact division by (X - Y), top X-degree first
    quotient = {}
    for i in range(n + len(b) - 1, 0, -1):
        row = {j: c for (xi, j), c in grid.items() if xi == i}
        for j, c in row.items():
            quotient[(i - 1, j)] = quotient.get((i - 1, j), zero) + c
            # subtract c * X^(i-1) * Y^j * (X - Y)
            grid[(i, j)] = grid[(i, j)] - c
            bump(i - 1, j + 1, c)
    if any(not c.is_zero() for c in grid.values()):
        raise AssertionError("Bezout numerator not divisible by X - Y")
    rows = [[quotient.get((i, j), zero) for j in range(n)] for i in range(n)]
    return BilinearForm(field, rows)


def bezout_form_p1(num, den):
    """Degree of the pointed map A/B on P^1 as the class of its Bezout form."""
    return diagonalize(bezout_matrix(num, den))


# ---------------------------------------------------------------------------
# global degrees over finite fields
# ---------------------------------------------------------------------------

_EXTENSION_CACHE = {}


def canonical_extension(field, r):
    """F_{q^r} as a simple extension with a deterministic minimal polynomial
    (x^2 - smallest nonresidue for r = 2, first irreducible in the scan
    otherwise)."""
    if r == 1:
        return field
    key = (field, r)
    cached = _EXTENSION_CACHE.get(key)
    if cached is not None:
        return cached
    if r == 2:
        n = smallest_nonresidue(field)
        ext = SimpleExtension(field, f"w{r}", [-n, field.zero(), field.one()])
    else:
        ext = None
        elements = list(field.enumerate_elements())
        for tail in _vectors(elements, r):
            candidate = list(tail) + [field.one()]
            if _irreducible_over_finite(candidate, field):
                ext = SimpleExtension(field, f"w{r}", candidate)
                break
        if ext is None:
            raise ArityMismatch(f"no irreducible polynomial of degree {r}?")
    _EXTENSION_CACHE[key] = ext
    return ext


def _vectors(elements, r):
    import itertools
    return itertools.product(elements, repeat=r)


def solve_system(system, ext_field):
    """All common zeros of the system over a finite field, by enumeration
    with early pruning (variables substituted one at a time; a branch dies
    as soon as some component becomes a nonzero constant)."""
    system = [f.map_coefficients(ext_field) for f in system]
    variables = system[0].x_variables()
    elements = list(ext_field.enumerate_elements())
    solutions = []

    def nonzero_constant(p):
        # stored terms never hold zero coefficients
        return bool(p.terms) and all(x == 0 for e in p.terms for x in e)

    def descend(polys, idx, partial):
        if idx == len(variables):
            solutions.append(tuple(partial))
            return
        name = variables[idx]
        for val in elements:
            nxt = []
            dead = False
            for p in polys:
                q = p.substitute(name, val)
                if nonzero_constant(q):
                    dead = True
                    break
                nxt.append(q)
            if not dead:
                descend(nxt, idx + 1, partial + [val])

    descend(list(system), 0, [])
    return solutions


def frobenius_orbit(point, base_order):
    """Orbit of a point under coordinatewise x -> x^q."""
    orbit = [point]
    current = point
    while True:
        current = tuple(c ** base_order for c in current)
        if all((a - b).is_zero() for a, b in zip(current, point)):
            return orbit
        orbit.append(current)
        if len(orbit) > 64:
            raise AssertionError("runaway Frobenius orbit")


def _orbit_key(point):
    return tuple(c.field._hashable(c.data) for c in point)


def fiber_orbits(system, value, base_field, max_ext):
    """Frobenius orbits of the fiber f^(-1)(value), grouped by the degree
    of their residue field.  Returns a list of (representative, degree,
    extension field)."""
    shifted = []
    for f, y in zip(system, value):
        shifted.append(f - Polynomial.constant(f.field, f.variables, y))
    q = base_field.order()
    found = []
    seen = set()
    for r in range(1, max_ext + 1):
        ext = canonical_extension(base_field, r)
        for sol in solve_system(shifted, ext):
            orbit = frobenius_orbit(sol, q)
            if len(orbit) != r:
                continue  # lives in a smaller field; found at that level
            rep = min(orbit, key=_orbit_key)
            key = (r, _orbit_key(rep))
            if key in seen:
                continue
            seen.add(key)
            found.append((rep, r, ext))
    return found


def global_degree_finite_field(system, value, max_ext=3,
                               expected_count=None):
    """Degree of an endomorphism of affine n-space over F_q at a value
    point: the sum over fiber orbits of Tr <Jf(point)>.

    Raises ``IrregularValue`` when some fiber point has vanishing jacobian
    and ``FiberEscapesBound`` when ``expected_count`` geometric points were
    promised but fewer were found within ``max_ext``.
    """
    system = list(system)
    base = system[0].field
    orbits = fiber_orbits(system, value, base, max_ext)
    total = GwElement.zero(base)
    jf = jacobian_determinant(system)
    for rep, r, ext in orbits:
        jf_ext = jf.map_coefficients(ext) if r > 1 else jf
        val = jf_ext.evaluate_at(rep)
        if val.is_zero():
            raise IrregularValue(f"jacobian vanishes on the fiber at {rep}")
        total = total + transfer(GwElement.symbol(val), base)
    geometric = sum(r for _, r, _ in orbits)
    if expected_count is not None and geometric != expected_count:
        raise FiberEscapesBound(
            f"found {geometric} geometric preimages, expected {expected_count}; "
            f"raise max_ext (currently {max_ext})")
    return total


def global_degree_p1(num, den, value, max_ext=3):
    """Degree of the pointed map A/B on P^1 over F_q by fiber enumeration
    at an affine regular value: roots of A - y*B, weighted by <(A'B - AB')>.

    The count of geometric preimages must reach deg A (the fiber of a
    pointed map misses infinity), otherwise ``FiberEscapesBound``."""
    field = num.field
    a = _as_univariate(num)
    b = _as_univariate(den)
    if len(b) - 1 >= len(a) - 1 or not b:
        raise DegreeOrder("need deg A > deg B >= 0")
    g = poly_gcd(a, b)
    if len(g) != 1:
        raise NotCoprime("A and B share a factor")
    y = field.element(value)
    fiber_poly = num - den * y
    derivative = (num.partial(num.variables[0]) * den
                  - num * den.partial(den.variables[0]))
    orbits = fiber_orbits([fiber_poly], [field.zero()], field, max_ext)
    total = GwElement.zero(field)
    for rep, r, ext in orbits:
        d_ext = derivative.map_coefficients(ext) if r > 1 else derivative
        val = d_ext.evaluate_at(rep)
        if val.is_zero():
            raise IrregularValue(f"derivative vanishes at fiber point {rep}")
        total = total + transfer(GwElement.symbol(val), field)
    geometric = sum(r for _, r, _ in orbits)
    if geometric != len(a) - 1:
        raise FiberEscapesBound(
            f"{geometric} geometric preimages of {value}, expected {len(a) - 1}")
    return total


def regular_values_p1(num, den, max_ext=3):
    """Scan F_q for values whose fiber is regular and fully enumerable;
    returns (regular, rejected) lists."""
    field = num.field
    regular, rejected = [], []
    for y in field.enumerate_elements():
        try:
            global_degree_p1(num, den, y, max_ext=max_ext)
            regular.append(y)
        except (IrregularValue, FiberEscapesBound) as exc:
            rejected.append((y, type(exc).__name__))
    return regular, rejected
