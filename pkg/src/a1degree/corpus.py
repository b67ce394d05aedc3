"""Bundled regression corpus.

Each entry recomputes one worked identity end to end (degrees of model
maps, the cusp Milnor number, transfer discriminants, the dynamic
bifurcation of the cusp, trace-form Gram matrices, enriched counts) and
checks it against its known value.  ``a1 corpus`` runs the lot and exits
nonzero if anything fails.
"""

from __future__ import annotations

from fractions import Fraction

from .fields import (
    PrimeField,
    PuiseuxSeriesField,
    QQ,
    RationalFunctionField,
    SimpleExtension,
    field_trace,
    is_square,
)
from .gw import (
    BilinearForm,
    GwElement,
    diagonalize,
    from_diagonal,
    gw_equal,
    hyperbolic,
    invariants,
    springer_reconstruct,
    springer_residues,
    transfer,
    trace_form_gram,
)
from .localalg import local_quotient
from .degree import bezout_form_p1, bezout_matrix, ekl_form, global_degree_p1
from .milnor import classify_point, milnor_number, node_type
from .poly import gradient, hessian_determinant, parse
from .puiseux import branch_type, newton_lift, verify_bifurcation

F5 = PrimeField(5)
F7 = PrimeField(7)


def _check_p1_exercises():
    az = bezout_form_p1(parse("3*z", QQ, ("z",)), parse("1", QQ, ("z",)))
    if gw_equal(az, GwElement.symbol(QQ.element(3))) is not True:
        return False, "degree of z -> 3z is not <3>"
    z2 = bezout_form_p1(parse("z^2", QQ, ("z",)), parse("1", QQ, ("z",)))
    if gw_equal(z2, hyperbolic(QQ)) is not True:
        return False, "degree of z -> z^2 is not hyperbolic"
    z2_5 = parse("z^2", F5, ("z",))
    one_5 = parse("1", F5, ("z",))
    fiber = global_degree_p1(z2_5, one_5, 1)
    if gw_equal(fiber, hyperbolic(F5)) is not True:
        return False, "fiber sum over F5 disagrees"
    return True, ""


def _check_ekl_z2():
    form = ekl_form([parse("z^2", QQ, ("z",))], [0])
    reference = diagonalize(BilinearForm(QQ, [[0, 2], [2, 0]]))
    if gw_equal(form.gw_class, reference) is not True:
        return False, "EKL class of z^2 differs from the antidiagonal Gram"
    inv = invariants(form.gw_class)
    if (inv.rank, inv.signature) != (2, 0):
        return False, f"rank/signature {(inv.rank, inv.signature)}"
    return True, ""


def _check_cusp_milnor():
    for field in (QQ, F5, F7):
        f = parse("x2^2 - x1^3", field, ("x1", "x2"))
        mu = milnor_number(f, [0, 0])
        if gw_equal(mu, hyperbolic(field)) is not True:
            return False, f"cusp Milnor number over {field} is {mu}"
    algebra = local_quotient(
        [parse("-3*x1^2", QQ, ("x1", "x2")), parse("2*x2", QQ, ("x1", "x2"))],
        [0, 0])
    if algebra.dimension != 2:
        return False, f"gradient algebra dimension {algebra.dimension}"
    return True, ""


def _check_cusp_gradient():
    f = parse("x2^2 - x1^3", QQ, ("x1", "x2"))
    gx = gradient(f)
    if gx[0] != parse("-3*x1^2", QQ, ("x1", "x2")):
        return False, "d/dx1 wrong"
    g = parse("3*x1 + 2*x2 + 2*x1^3 - t*x1^3", QQ, ("x1", "x2", "t"))
    ft = f.with_variables(("x1", "x2", "t")) \
        + parse("t", QQ, ("x1", "x2", "t")) * g
    d1 = parse("-3*x1^2 + 3*t + 6*t*x1^2 - 3*t^2*x1^2", QQ, ("x1", "x2", "t"))
    d2 = parse("2*x2 + 2*t", QQ, ("x1", "x2", "t"))
    if gradient(ft)[0] != d1 or gradient(ft)[1] != d2:
        return False, "partials of the deformed cusp are wrong"
    return True, ""


def _check_node_types():
    split = parse("x1^2 - x2^2", QQ, ("x1", "x2"))
    if gw_equal(node_type(split, [0, 0]),
                GwElement.symbol(QQ.element(-1))) is not True:
        return False, "split node type is not <-1>"
    nonsplit = parse("x1^2 + x2^2", QQ, ("x1", "x2"))
    if gw_equal(node_type(nonsplit, [0, 0]),
                GwElement.symbol(QQ.element(1))) is not True:
        return False, "non-split node type is not <1>"
    three = parse("x1^2 + x2^2 + x3^2", QQ, ("x1", "x2", "x3"))
    if gw_equal(milnor_number(three, [0, 0, 0]),
                GwElement.symbol(QQ.element(2))) is not True:
        return False, "three-variable node is not <2^n>"
    if classify_point(parse("x2^2 - x1^3", QQ, ("x1", "x2")),
                      [0, 0]).kind != "higher":
        return False, "cusp misclassified"
    return True, ""


def _check_transfer_discriminants():
    f25 = SimpleExtension(F5, "b", [-2, 0, 1])
    f49 = SimpleExtension(F7, "c", [-3, 0, 1])
    tr25 = transfer(GwElement.symbol(f25.element(-1)), F5)
    tr49 = transfer(GwElement.symbol(f49.element(-1)), F7)
    if invariants(tr25).discriminant_is_trivial() is not False:
        return False, "transfer from F25 should have nontrivial discriminant"
    if invariants(tr49).discriminant_is_trivial() is not True:
        return False, "transfer from F49 should have trivial discriminant"
    if is_square(F5.element(-1)) is not True:
        return False, "-1 must be a square mod 5"
    if gw_equal(hyperbolic(F5) + hyperbolic(F5) * 0,
                from_diagonal(F5, [1, -1])) is not True:
        return False, "hyperbolic discriminant check failed"
    return True, ""


def _check_springer():
    laurent = PuiseuxSeriesField(QQ, 1, 16)
    t = laurent.t()
    e = GwElement.symbol(laurent.element(3)) \
        + GwElement.symbol(laurent.element(5) * t)
    first, second = springer_residues(e)
    ok = gw_equal(first, GwElement.symbol(QQ.element(3))) is True \
        and gw_equal(second, GwElement.symbol(QQ.element(5))) is True
    if not ok:
        return False, f"residues of <3> + <5t> came out ({first}, {second})"
    back = springer_reconstruct(laurent, first, second)
    if gw_equal(back, e) is not True:
        return False, "u + t*v reconstruction failed"
    ram2 = PuiseuxSeriesField(QQ, 2, 16)
    value = ram2.element(12) * ram2.sqrt(ram2.t()) * (ram2.one() - ram2.t())
    tr = transfer(GwElement.symbol(value), laurent)
    first, second = springer_residues(tr)
    if not (second.is_zero()
            and gw_equal(first, hyperbolic(QQ)) is True
            and gw_equal(tr, hyperbolic(laurent)) is True):
        return False, "transfer of the odd-valuation unit is not hyperbolic"
    return True, ""


def _check_bifurcation():
    f = parse("x2^2 - x1^3", QQ, ("x1", "x2"))
    g = parse("3*x1 + 2*x2 + 2*x1^3 - t*x1^3", QQ, ("x1", "x2", "t"))
    field = PuiseuxSeriesField(QQ, 2, 16)
    s = field.uniformizer()
    plus = newton_lift(f, g, [s, -field.t()], field)
    minus = newton_lift(f, g, [-s, -field.t()], field)
    oracle = field.sqrt(field.t()) * (field.one() - field.t()).inverse()
    if not (plus.coords[0] - oracle).is_zero():
        return False, "positive branch is not sqrt(t)/(1-t)"
    if not (plus.coords[1] + field.t()).is_zero():
        return False, "x2 coordinate is not -t"
    types = {branch_type(f, g, b).render() for b in (plus, minus)}
    expected = {"<3*t^(1/2)>", "<-3*t^(1/2)>"}
    if types != expected:
        return False, f"branch types {types}"
    report = verify_bifurcation(f, g, [plus, minus], [0, 0])
    if report.verdict is not True:
        return False, f"verdict {report.verdict}: {report.reason}"
    if not report.rhs_second.is_zero():
        return False, "second residue does not vanish"
    return True, ""


def _check_cubic_surface_count():
    lines = from_diagonal(QQ, [1] * 15 + [-1] * 12)
    inv = invariants(lines)
    if (inv.rank, inv.signature) != (27, 3):
        return False, f"got {(inv.rank, inv.signature)}"
    return True, ""


def _check_elliptic_trace():
    kz = RationalFunctionField(QQ, "z")
    curve = SimpleExtension(kz, "y", [
        kz.from_polynomial([0, 1]) - kz.from_polynomial([0, 0, 0, 1]),
        kz.zero(), kz.one()])  # y^2 = z^3 - z
    y = curve.generator()
    two_y = curve.element(2) * y
    basis = [curve.one(), y.inverse()]
    gram = trace_form_gram(two_y, basis=basis)
    expected = [[0, 4], [4, 0]]
    for i in range(2):
        for j in range(2):
            if not (gram.matrix[i][j] - kz.element(expected[i][j])).is_zero():
                return False, f"Gram {gram}"
    if field_trace(two_y, kz) != kz.zero():
        return False, "trace of 2y is not 0"
    cls = transfer(GwElement.symbol(two_y), kz, basis=basis)
    if gw_equal(cls, hyperbolic(kz)) is not True:
        return False, "transfer of <2y> is not hyperbolic"
    return True, ""


def _check_rational_curve_count():
    # eight rational points: the trace form is 8<1>
    count = hyperbolic(QQ) * 2 + from_diagonal(QQ, [1] * 8)
    if invariants(count).rank != 12:
        return False, f"rank {invariants(count).rank}"
    return True, ""


def _check_gw_relations():
    a, b = QQ.element(1), QQ.element(2)
    lhs = GwElement.symbol(a) + GwElement.symbol(b)
    rhs = GwElement.symbol(a + b) + GwElement.symbol(a * b * (a + b))
    if gw_equal(lhs, rhs) is not True:
        return False, "<a> + <b> = <a+b> + <ab(a+b)> fails at (1,2)"
    if gw_equal(GwElement.symbol(QQ.element(2)) * GwElement.symbol(QQ.element(3)),
                GwElement.symbol(QQ.element(6))) is not True:
        return False, "<2><3> != <6>"
    u = F5.element(2)
    if gw_equal(GwElement.symbol(u) + GwElement.symbol(-u),
                hyperbolic(F5)) is not True:
        return False, "<u> + <-u> != h over F5"
    return True, ""


def _check_local_algebra_z2():
    algebra = local_quotient([parse("z^2", QQ, ("z",))], [0])
    if algebra.dimension != 2 or algebra.certificate_order != 2:
        return False, f"dimension {algebra.dimension}"
    jvec = algebra.jacobian_image()
    if [str(c) for c in jvec] != ["0", "2"]:
        return False, f"jacobian element image {jvec}"
    return True, ""


CHECKS = [
    ("projective-line degrees: a*z and z^2", _check_p1_exercises),
    ("EKL form of z^2 is hyperbolic", _check_ekl_z2),
    ("cusp Milnor number over Q, F5, F7", _check_cusp_milnor),
    ("cusp gradient and deformed partials", _check_cusp_gradient),
    ("node types: split, non-split, three variables", _check_node_types),
    ("transfer discriminants from F25 and F49", _check_transfer_discriminants),
    ("Springer residues and reconstruction", _check_springer),
    ("dynamic bifurcation of the cusp", _check_bifurcation),
    ("27 lines: 15<1> + 12<-1>", _check_cubic_surface_count),
    ("elliptic curve trace form of <2y>", _check_elliptic_trace),
    ("twelve rational cubics through eight points", _check_rational_curve_count),
    ("GW generator relations", _check_gw_relations),
    ("local algebra of z^2 with jacobian image", _check_local_algebra_z2),
]


def run_corpus():
    results = []
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, ok, detail))
    return results
