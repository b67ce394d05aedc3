"""A1-Milnor numbers, node recognition, and linear-perturbation checks.

The A1-Milnor number of a hypersurface singularity is the local A1-degree
of the gradient.  At a node (nonvanishing Hessian determinant) this is the
rank-one class of the Hessian determinant over the residue field of the
point; at worse singularities it falls through to the EKL form.  Over a
finite field, ``verify_linear_family`` samples linear perturbations
f - a.x, enumerates the critical points of each perturbed function in
bounded extensions, and compares the sum of the transfers of the node
types against the Milnor number -- the degeneration identity that
constrains which node types can appear.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dataclass_field

from .errors import NotANode, SmoothPoint
from .fields import is_square
from .gw import GwElement, gw_equal, transfer
from .localalg import DEFAULT_MAX_ORDER, local_quotient
from .degree import canonical_extension, ekl_form, fiber_orbits
from .poly import Polynomial, gradient, hessian_determinant

SMOOTH = "smooth"
NODE = "node"
HIGHER = "higher"


@dataclass(frozen=True)
class SingularPoint:
    polynomial: Polynomial
    point: tuple
    point_field: object
    kind: str
    hessian_value: object  # Hessian determinant at the point

    def is_node(self):
        return self.kind == NODE


def _localize(f, point):
    """Base-change f to the field its coordinates live in."""
    base = f.field
    target = base
    for c in point:
        if hasattr(c, "field") and c.field != base and c.field.embeds(base):
            target = c.field
    coords = [target.element(c) for c in point]
    local = f.map_coefficients(target) if target != base else f
    return local, coords, target


def classify_point(f, point):
    """Smooth / node / higher singularity of the hypersurface {f = 0}.

    Smooth means f or some partial derivative is nonzero at the point;
    a node additionally has nonvanishing Hessian determinant.
    """
    local, coords, target = _localize(f, point)
    hess_value = hessian_determinant(local).evaluate_at(coords)
    if not local.evaluate_at(coords).is_zero():
        kind = SMOOTH
    elif any(not g.evaluate_at(coords).is_zero() for g in gradient(local)):
        kind = SMOOTH
    elif not hess_value.is_zero():
        kind = NODE
    else:
        kind = HIGHER
    return SingularPoint(polynomial=f, point=tuple(coords),
                         point_field=target, kind=kind,
                         hessian_value=hess_value)


def milnor_number(f, point, max_order=DEFAULT_MAX_ORDER):
    """Local A1-degree of grad f at the point, transferred down to the
    coefficient field of f.

    Only the vanishing of grad f is required (not of f itself): the number
    is attached to the critical point of the function.
    """
    local, coords, target = _localize(f, point)
    grads = gradient(local)
    if any(not g.evaluate_at(coords).is_zero() for g in grads):
        raise SmoothPoint("grad f does not vanish at the point")
    hess_value = hessian_determinant(local).evaluate_at(coords)
    if not hess_value.is_zero():
        cls = GwElement.symbol(hess_value)  # simple zero of the gradient
    else:
        cls = ekl_form(grads, coords, max_order=max_order).gw_class
    return transfer(cls, f.field)


def node_type(f, point):
    """The rank-one class <Hessian determinant at the point> over the
    residue field of the node; agrees with the Milnor number of the
    base-changed polynomial (checked in the test-suite)."""
    sp = classify_point(f, point)
    if sp.kind != NODE:
        raise NotANode(f"point classified as {sp.kind}")
    return GwElement.symbol(sp.hessian_value)


def node_is_split(hessian_value):
    """A plane-curve node is split exactly when the tangent-cone lines are
    rational, i.e. when -Hess is a square in the residue field."""
    return is_square(-hessian_value)


# ---------------------------------------------------------------------------
# linear perturbations over finite fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NodeRecord:
    degree: int           # residue field degree over the base
    split: bool | None    # tangent-cone rationality (plane curves)
    type_class: GwElement
    transferred: GwElement


@dataclass(frozen=True)
class SampleRow:
    coefficients: tuple
    generic: bool
    reason: str
    nodes: tuple
    rhs: GwElement | None
    equal: bool | None


@dataclass
class FamilyReport:
    polynomial: Polynomial
    lhs: GwElement
    expected_geometric: int
    off_locus_orbits: int
    rows: list = dataclass_field(default_factory=list)

    @property
    def generic_rows(self):
        return [r for r in self.rows if r.generic]

    @property
    def generic_fraction(self):
        if not self.rows:
            return 0.0
        return len(self.generic_rows) / len(self.rows)

    def all_generic_equal(self):
        return all(r.equal is True for r in self.generic_rows)


def _orbit_milnor_data(grads, hessian, rep, ext, base, max_order):
    """(transferred milnor number, local dimension) of one gradient zero."""
    grads_ext = [g.map_coefficients(ext) for g in grads] if ext != base else grads
    hess_ext = hessian.map_coefficients(ext) if ext != base else hessian
    hval = hess_ext.evaluate_at(rep)
    if not hval.is_zero():
        return transfer(GwElement.symbol(hval), base), 1
    form = ekl_form(grads_ext, rep, max_order=max_order)
    return transfer(form.gw_class, base), form.algebra.dimension


def verify_linear_family(f, samples, max_ext=3, rng_seed=0,
                         max_order=DEFAULT_MAX_ORDER):
    """Sample linear perturbations f - a.x over F_q and check that the sum
    of transfers of node types equals the Milnor number.

    A sample is *generic* when every critical point of the perturbed
    function was found within degree ``max_ext`` (the geometric count
    matches the degree of the gradient map) and has nonvanishing Hessian.
    Non-generic samples are reported and skipped, never guessed at.
    """
    base = f.field
    grads = list(gradient(f))
    hessian = hessian_determinant(f)
    variables = f.x_variables()
    zero_value = [base.zero()] * len(variables)

    # critical points of f itself: LHS and the expected fiber size
    lhs = GwElement.zero(base)
    expected = 0
    off_locus = 0
    for rep, r, ext in fiber_orbits(grads, zero_value, base, max_ext):
        mu, dim = _orbit_milnor_data(grads, hessian, rep, ext, base, max_order)
        expected += r * dim
        f_ext = f.map_coefficients(ext) if ext != base else f
        if f_ext.evaluate_at(rep).is_zero():
            lhs = lhs + mu
        else:
            off_locus += 1

    report = FamilyReport(polynomial=f, lhs=lhs, expected_geometric=expected,
                          off_locus_orbits=off_locus)
    rng = random.Random(rng_seed)
    elements = list(base.enumerate_elements())
    for _ in range(samples):
        a = tuple(elements[rng.randrange(len(elements))] for _ in variables)
        perturbed = [g - Polynomial.constant(g.field, g.variables, ai)
                     for g, ai in zip(grads, a)]
        orbits = fiber_orbits(perturbed, zero_value, base, max_ext)
        nodes = []
        degenerate = False
        for rep, r, ext in orbits:
            hess_ext = hessian.map_coefficients(ext) if ext != base else hessian
            hval = hess_ext.evaluate_at(rep)
            if hval.is_zero():
                degenerate = True
                break
            nodes.append(NodeRecord(
                degree=r,
                split=node_is_split(hval),
                type_class=GwElement.symbol(hval),
                transferred=transfer(GwElement.symbol(hval), base)))
        if degenerate:
            report.rows.append(SampleRow(
                coefficients=a, generic=False,
                reason="vanishing Hessian at a critical point",
                nodes=(), rhs=None, equal=None))
            continue
        found = sum(r for _, r, _ in orbits)
        if found < expected:
            report.rows.append(SampleRow(
                coefficients=a, generic=False,
                reason=f"fiber escapes degree {max_ext} "
                       f"({found} of {expected} points found)",
                nodes=(), rhs=None, equal=None))
            continue
        rhs = GwElement.zero(base)
        for record in nodes:
            rhs = rhs + record.transferred
        report.rows.append(SampleRow(
            coefficients=a, generic=True, reason="",
            nodes=tuple(nodes), rhs=rhs,
            equal=gw_equal(lhs, rhs)))
    return report
