"""Command-line front end.

Exit-code convention: 0 when the computation succeeds (and any verification
came back True); 2 when a verification is mathematically False; 1 for usage
errors, undecidable comparisons, and violated preconditions.  Identical
invocations (including --rng-seed) produce byte-identical output.
"""

from __future__ import annotations

import json
import sys

import click

from . import corpus as corpus_module
from .errors import A1Error, DegenerateZero, UsageError
from .fields import PuiseuxSeriesField, SimpleExtension, field_trace
from .grammar import (
    infer_variables,
    parse_element,
    parse_field,
    parse_gw,
    parse_point,
    parse_seed,
    seed_ramification,
)
from .gw import gw_equal, invariants, springer_residues, transfer, trace_form_gram
from .localalg import local_quotient
from .degree import (
    bezout_form_p1,
    bezout_matrix,
    ekl_form,
    global_degree_finite_field,
    global_degree_p1,
    local_degree_simple,
)
from .milnor import classify_point, milnor_number, node_type, verify_linear_family
from .poly import parse as parse_poly
from .puiseux import newton_lift, verify_bifurcation

SCHEMA = 1


def _emit(payload, as_json, lines):
    if as_json:
        click.echo(json.dumps({"schema": SCHEMA, **payload}, default=str))
    else:
        for line in lines:
            click.echo(line)


def _gram_strings(form):
    return [[str(x) for x in row] for row in form.matrix]


def _invariant_lines(e):
    inv = invariants(e)
    out = [f"rank: {inv.rank}"]
    if inv.det_class is not None:
        out.append(f"det class: {inv.det_class.representative}")
    if inv.discriminant is not None:
        triv = inv.discriminant_is_trivial()
        tag = {True: "trivial", False: "nontrivial", None: "undecided"}[triv]
        out.append(f"discriminant: {inv.discriminant.representative} ({tag})")
    if inv.signature is not None:
        out.append(f"signature: {inv.signature}")
    if inv.hasse_witt:
        nontrivial = {p: s for p, s in inv.hasse_witt.items() if s != 1}
        out.append(f"Hasse-Witt: {nontrivial if nontrivial else 'trivial'}")
    return out


@click.group()
def main():
    """Exact Grothendieck-Witt classes, local A1-degrees, Milnor numbers,
    and Puiseux-series bifurcation checks."""


@main.command("gw-simplify")
@click.option("--field", "field_text", required=True)
@click.option("--json", "as_json", is_flag=True)
@click.argument("expr")
def gw_simplify(field_text, as_json, expr):
    """Canonical form and invariants of a GW class."""
    field = parse_field(field_text)
    e = parse_gw(expr, field)
    inv = invariants(e)
    _emit({"command": "gw-simplify", "class": e.to_json(),
           "rank": inv.rank,
           "discriminant": str(inv.discriminant.representative)
           if inv.discriminant else None,
           "signature": inv.signature},
          as_json, [e.render()] + _invariant_lines(e))


@main.command("gw-equal")
@click.option("--field", "field_text", required=True)
@click.option("--json", "as_json", is_flag=True)
@click.argument("left")
@click.argument("right")
def gw_equal_cmd(field_text, as_json, left, right):
    """Decide equality of two GW classes (True / False / Unknown)."""
    field = parse_field(field_text)
    verdict = gw_equal(parse_gw(left, field), parse_gw(right, field))
    label = {True: "True", False: "False", None: "Unknown"}[verdict]
    _emit({"command": "gw-equal", "equal": verdict}, as_json, [label])
    if verdict is False:
        sys.exit(2)
    if verdict is None:
        sys.exit(1)


@main.command("transfer")
@click.option("--field", "field_text", required=True,
              help="the extension field L")
@click.option("--target", "target_text", required=True,
              help="the field to transfer down to")
@click.option("--basis", "basis_text", default=None,
              help="comma-separated basis elements of L (single step only)")
@click.option("--json", "as_json", is_flag=True)
@click.option("--verbose", is_flag=True)
@click.argument("expr")
def transfer_cmd(field_text, target_text, basis_text, as_json, verbose, expr):
    """Transfer a GW class down a finite extension of the tower."""
    field = parse_field(field_text)
    target = parse_field(target_text)
    e = parse_gw(expr, field)
    basis = None
    if basis_text is not None:
        basis = [parse_element(part, field) for part in basis_text.split(",")]
    result = transfer(e, target, basis=basis)
    lines = [result.render()]
    grams = []
    if verbose or as_json:
        for cls, mult in e.entries:
            form = trace_form_gram(cls.representative, basis=basis)
            grams.append({"symbol": str(cls.representative), "mult": mult,
                          "gram": _gram_strings(form)})
            if verbose:
                lines.append(f"Gram of <{cls.representative}>: {form}")
    lines += _invariant_lines(result)
    _emit({"command": "transfer", "class": result.to_json(), "grams": grams},
          as_json, lines)


@main.command("degree-local")
@click.option("--field", "field_text", required=True)
@click.option("--system", "system_text", required=True,
              help="semicolon-separated components")
@click.option("--point", "point_text", required=True)
@click.option("--json", "as_json", is_flag=True)
@click.option("--verbose", is_flag=True)
def degree_local(field_text, system_text, point_text, as_json, verbose):
    """Local A1-degree of a system at an isolated zero."""
    field = parse_field(field_text)
    parts = [p for p in system_text.split(";") if p.strip()]
    variables = infer_variables(parts, field)
    system = [parse_poly(p, field, variables) for p in parts]
    point = parse_point(point_text, field)
    path = "simple-zero"
    gram = None
    try:
        result = local_degree_simple(system, point)
    except DegenerateZero:
        path = "EKL"
        form = ekl_form(system, point)
        result = form.gw_class
        gram = form.gram
    lines = [result.render(), f"path: {path}"]
    if path == "EKL":
        lines.append(f"local algebra dimension: {gram.rank_size()}")
        if verbose:
            lines.append(f"EKL Gram: {gram}")
    lines += _invariant_lines(result)
    _emit({"command": "degree-local", "class": result.to_json(), "path": path,
           "gram": _gram_strings(gram) if gram else None},
          as_json, lines)


@main.command("degree-p1")
@click.option("--field", "field_text", required=True)
@click.option("--num", "num_text", required=True)
@click.option("--den", "den_text", required=True)
@click.option("--json", "as_json", is_flag=True)
@click.option("--verbose", is_flag=True)
def degree_p1(field_text, num_text, den_text, as_json, verbose):
    """Degree of the pointed map A/B on the projective line (Bezout form)."""
    field = parse_field(field_text)
    variables = infer_variables([num_text, den_text], field)
    if len(variables) != 1:
        raise UsageError(f"A and B must be univariate, got {variables}")
    num = parse_poly(num_text, field, variables)
    den = parse_poly(den_text, field, variables)
    matrix = bezout_matrix(num, den)
    result = bezout_form_p1(num, den)
    lines = [result.render()]
    if verbose:
        lines.append(f"Bezout matrix: {matrix}")
    lines += _invariant_lines(result)
    _emit({"command": "degree-p1", "class": result.to_json(),
           "bezout_matrix": _gram_strings(matrix)},
          as_json, lines)


@main.command("degree-global")
@click.option("--field", "field_text", required=True)
@click.option("--system", "system_text", required=True)
@click.option("--value", "value_text", required=True)
@click.option("--max-ext", default=3, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def degree_global(field_text, system_text, value_text, max_ext, as_json):
    """Degree of an endomorphism of affine space over a finite field,
    by exhaustive fiber enumeration."""
    field = parse_field(field_text)
    parts = [p for p in system_text.split(";") if p.strip()]
    variables = infer_variables(parts, field)
    system = [parse_poly(p, field, variables) for p in parts]
    value = parse_point(value_text, field)
    result = global_degree_finite_field(system, value, max_ext=max_ext)
    _emit({"command": "degree-global", "class": result.to_json()},
          as_json, [result.render()] + _invariant_lines(result))


@main.command("local-algebra")
@click.option("--field", "field_text", required=True)
@click.option("--system", "system_text", required=True)
@click.option("--point", "point_text", required=True)
@click.option("--json", "as_json", is_flag=True)
def local_algebra_cmd(field_text, system_text, point_text, as_json):
    """Dimension, monomial basis and stabilisation certificate of the local
    algebra at an isolated zero."""
    field = parse_field(field_text)
    parts = [p for p in system_text.split(";") if p.strip()]
    variables = infer_variables(parts, field)
    system = [parse_poly(p, field, variables) for p in parts]
    point = parse_point(point_text, field)
    algebra = local_quotient(system, point)
    basis = [
        "*".join(f"{v}^{e}" if e > 1 else v
                 for v, e in zip(algebra.variables, mono) if e) or "1"
        for mono in algebra.basis]
    _emit({"command": "local-algebra", "dimension": algebra.dimension,
           "basis": basis, "certificate_order": algebra.certificate_order},
          as_json,
          [f"dimension: {algebra.dimension}",
           f"basis: {', '.join(basis)}",
           f"certificate order: {algebra.certificate_order}"])


@main.command("milnor")
@click.option("--field", "field_text", required=True)
@click.option("--f", "f_text", required=True)
@click.option("--point", "point_text", required=True)
@click.option("--json", "as_json", is_flag=True)
def milnor_cmd(field_text, f_text, point_text, as_json):
    """A1-Milnor number of a hypersurface singularity."""
    field = parse_field(field_text)
    variables = infer_variables([f_text], field)
    f = parse_poly(f_text, field, variables)
    point = parse_point(point_text, field)
    result = milnor_number(f, point)
    _emit({"command": "milnor", "class": result.to_json()},
          as_json, [result.render()] + _invariant_lines(result))


@main.command("node-type")
@click.option("--field", "field_text", required=True)
@click.option("--f", "f_text", required=True)
@click.option("--point", "point_text", required=True)
@click.option("--json", "as_json", is_flag=True)
def node_type_cmd(field_text, f_text, point_text, as_json):
    """Classification of a point of {f = 0} and, at a node, its type."""
    field = parse_field(field_text)
    variables = infer_variables([f_text], field)
    f = parse_poly(f_text, field, variables)
    point = parse_point(point_text, field)
    sp = classify_point(f, point)
    lines = [f"classification: {sp.kind}"]
    payload = {"command": "node-type", "classification": sp.kind}
    if sp.is_node():
        t = node_type(f, point)
        lines.append(f"type: {t.render()}")
        payload["type"] = t.to_json()
    _emit(payload, as_json, lines)


@main.command("verify-cor45")
@click.option("--field", "field_text", required=True)
@click.option("--f", "f_text", required=True)
@click.option("--samples", default=25, show_default=True)
@click.option("--max-ext", default=3, show_default=True)
@click.option("--rng-seed", default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def verify_cor45(field_text, f_text, samples, max_ext, rng_seed, as_json):
    """Sample linear perturbations over F_q and compare the sum of node-type
    transfers against the Milnor number, sample by sample."""
    field = parse_field(field_text)
    variables = infer_variables([f_text], field)
    f = parse_poly(f_text, field, variables)
    report = verify_linear_family(f, samples, max_ext=max_ext,
                                  rng_seed=rng_seed)
    lines = [f"Milnor number: {report.lhs.render()}",
             f"expected geometric points per fiber: {report.expected_geometric}",
             "sample | nodes (degree,split) | rhs | equal"]
    rows = []
    for row in report.rows:
        a = ",".join(str(c) for c in row.coefficients)
        if not row.generic:
            lines.append(f"({a}) | not generic: {row.reason}")
            rows.append({"a": a, "generic": False, "reason": row.reason})
            continue
        nodes = " ".join(f"({n.degree},{'split' if n.split else 'nonsplit'})"
                         for n in row.nodes)
        verdict = {True: "True", False: "False", None: "Unknown"}[row.equal]
        lines.append(f"({a}) | {nodes} | {row.rhs.render()} | {verdict}")
        rows.append({"a": a, "generic": True, "nodes": nodes,
                     "rhs": row.rhs.render(), "equal": row.equal})
    generic = report.generic_rows
    lines.append(f"generic samples: {len(generic)}/{len(report.rows)}")
    ok = report.all_generic_equal()
    lines.append(f"all generic samples equal: {ok}")
    _emit({"command": "verify-cor45", "lhs": report.lhs.to_json(),
           "rows": rows, "generic_fraction": report.generic_fraction,
           "all_equal": ok},
          as_json, lines)
    if not ok:
        sys.exit(2)


@main.command("bifurcate")
@click.option("--field", "field_text", required=True,
              help="coefficient field of f and g")
@click.option("--f", "f_text", required=True)
@click.option("--g", "g_text", required=True)
@click.option("--seed", "seed_texts", multiple=True, required=True,
              help="branch seed 'x1: t^(1/2)*1; x2: -t' (repeatable)")
@click.option("--point", "point_text", default=None,
              help="the centre; defaults to the origin")
@click.option("--precision", default=16, show_default=True)
@click.option("--ext", "ext_text", default=None,
              help="adjoin a coefficient-field generator, e.g. 'c^3-1/4'")
@click.option("--json", "as_json", is_flag=True)
@click.option("--verbose", is_flag=True)
def bifurcate(field_text, f_text, g_text, seed_texts, point_text, precision,
              ext_text, as_json, verbose):
    """Newton-lift seed branches of grad(f + t*g) and verify that the
    transfers of their types sum to the Milnor number at the centre."""
    base = parse_field(field_text)
    fvars = infer_variables([f_text], base)
    f = parse_poly(f_text, base, fvars)
    gvars = infer_variables([g_text], base, force_t="t" in g_text)
    g_all = tuple(dict.fromkeys(fvars + gvars))
    g = parse_poly(g_text, base, g_all)
    f = f.with_variables(tuple(v for v in g_all if v != "t") or fvars)

    coeff_field = base
    if ext_text is not None:
        name = ext_text.split("^", 1)[0].strip()
        from .grammar import _extension
        coeff_field = _extension(base, name, ext_text, ext_text, 0)

    ram = 1
    for text in seed_texts:
        r = seed_ramification(text)
        ram = ram * r // _gcd(ram, r)
    series_field = PuiseuxSeriesField(coeff_field, ram, precision)
    xvars = f.x_variables()
    point = ([base.zero()] * len(xvars) if point_text is None
             else parse_point(point_text, base))

    branches = []
    for text in seed_texts:
        seeds = parse_seed(text, series_field, xvars)
        branches.append(newton_lift(f, g, seeds, series_field))
    report = verify_bifurcation(f, g, branches, point)
    verdict = {True: "True", False: "False", None: "Unknown"}[report.verdict]
    lines = []
    for i, branch in enumerate(branches):
        lines.append(f"branch {i}: " + "; ".join(
            f"{v} = {c}" for v, c in zip(branch.variables, branch.coords)))
        lines.append(f"  residual valuation >= {branch.achieved}")
        lines.append(f"  type: {report.branch_types[i].render()}")
    for p in report.points:
        lines.append(f"closed point: degree {p.degree} "
                     f"(primitive {p.primitive_label})")
        if verbose:
            lines.append(f"  transfer Gram: {p.gram}")
    lines.append(f"Milnor number: {report.milnor.render()}")
    if report.rhs is not None:
        lines.append(f"sum of transferred types: {report.rhs.render()}")
        lines.append(f"Springer residues: first {report.rhs_first.render()}, "
                     f"second {report.rhs_second.render()}")
    lines.append(f"verdict: {verdict}" + (f" ({report.reason})"
                                          if report.reason else ""))
    _emit({"command": "bifurcate", "verdict": report.verdict,
           "reason": report.reason, "milnor": report.milnor.to_json(),
           "rhs": report.rhs.to_json() if report.rhs else None,
           "branches": [
               {"coords": [str(c) for c in b.coords],
                "residual": str(b.achieved),
                "type": report.branch_types[i].render()}
               for i, b in enumerate(branches)],
           "points": [{"degree": p.degree, "primitive": p.primitive_label,
                       "gram": _gram_strings(p.gram)}
                      for p in report.points]},
          as_json, lines)
    if report.verdict is False:
        sys.exit(2)
    if report.verdict is None:
        sys.exit(1)


@main.command("corpus")
@click.option("--json", "as_json", is_flag=True)
def corpus_cmd(as_json):
    """Run the bundled regression corpus of worked examples."""
    results = corpus_module.run_corpus()
    rows = [{"name": name, "ok": ok, "detail": detail}
            for name, ok, detail in results]
    lines = []
    for name, ok, detail in results:
        status = "pass" if ok else "FAIL"
        lines.append(f"[{status}] {name}" + ("" if ok else f" -- {detail}"))
    passed = sum(1 for _, ok, _ in results if ok)
    lines.append(f"{passed}/{len(results)} passed")
    _emit({"command": "corpus", "results": rows,
           "passed": passed, "total": len(results)}, as_json, lines)
    if passed != len(results):
        sys.exit(2)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def entry():
    try:
        main(standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    except A1Error as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    entry()
