"""Grothendieck-Witt classes over the field tower.

A ``GwElement`` is a virtual class: an integer-weighted formal sum of
rank-one symbols <a>, with a in F^x taken up to squares.  Symbols are kept
merged and sorted, so equality is syntactic whenever the field has
canonical square-class representatives.

The bridge from geometry is ``BilinearForm`` (a symmetric Gram matrix)
together with ``diagonalize``, which performs symmetric congruence
reduction.  ``invariants`` computes rank, determinant class, (signed)
discriminant, signature over Q, and Hasse-Witt symbols over Q;
``gw_equal`` is a three-valued equality decision; ``transfer`` maps
classes down finite separable steps of the tower via trace forms; and
``springer_residues`` splits classes over a Laurent/Puiseux field by
valuation parity.

Discriminant convention: the *signed* determinant
(-1)^(r(r-1)/2) * det(Gram) mod squares, so hyperbolic forms always have
trivial discriminant.  The raw determinant class is exposed separately as
``det_class``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DegenerateForm,
    FieldMismatch,
    NotAnExtension,
    PrecisionExhausted,
    ZeroInput,
)
from .fields import (
    PuiseuxSeriesField,
    RationalField,
    SquareClass,
    extension_chain,
    is_square,
    square_class,
    _factor_int,
    _squarefree_int,
)


class GwElement:
    """Integer-weighted formal sum of square classes; immutable."""

    __slots__ = ("field", "entries")

    def __init__(self, field, entries):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "entries", _merge(field, entries))

    def __setattr__(self, name, value):
        raise AttributeError("GW classes are immutable")

    @classmethod
    def zero(cls, field):
        return cls(field, [])

    @classmethod
    def symbol(cls, a):
        """<a> for a nonzero field element."""
        if a.is_zero():
            raise ZeroInput("<0> is not a GW generator")
        return cls(a.field, [(square_class(a), 1)])

    def rank(self):
        return sum(m for _, m in self.entries)

    def is_zero(self):
        return not self.entries

    def _check(self, other):
        if not isinstance(other, GwElement):
            raise TypeError("expected a GW class")
        if other.field != self.field:
            raise FieldMismatch(
                f"GW classes over {self.field} and {other.field}")

    def __add__(self, other):
        self._check(other)
        return GwElement(self.field, list(self.entries) + list(other.entries))

    def __neg__(self):
        return GwElement(self.field, [(c, -m) for c, m in self.entries])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return GwElement(self.field,
                             [(c, m * other) for c, m in self.entries])
        self._check(other)
        out = []
        for c1, m1 in self.entries:
            for c2, m2 in other.entries:
                out.append((c1.times(c2), m1 * m2))
        return GwElement(self.field, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GwElement):
            return NotImplemented
        return gw_equal(self, other) is True

    def __hash__(self):
        return hash((self.field, len(self.entries)))

    def render(self):
        if not self.entries:
            return "0"
        parts = []
        for cls, m in self.entries:
            body = f"<{cls.representative}>"
            if m == 1:
                parts.append(body)
            elif m == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{m}{body}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def to_json(self):
        return {
            "field": repr(self.field),
            "entries": [{"rep": str(c.representative), "mult": m}
                        for c, m in self.entries],
        }

    def __repr__(self):
        return self.render()


def _entry_sort_key(cm):
    rep = str(cm[0].representative)
    negative = rep.startswith("-")
    return (rep.lstrip("-"), negative, rep)


def _merge_list(field, entries):
    merged = []  # list of [SquareClass, mult]
    for cls, m in entries:
        if m == 0:
            continue
        if cls.field != field:
            raise FieldMismatch("entry over the wrong field")
        placed = False
        for slot in merged:
            if slot[0].same_class(cls) is True:
                slot[1] += m
                placed = True
                break
        if not placed:
            merged.append([cls, m])
    return [[c, m] for c, m in merged if m != 0]


def _merge(field, entries):
    """Canonical entry list: merged by square class, hyperbolic pairs
    <a> + <-a> folded to <1> + <-1> (relation 4), sorted with positive
    representatives first."""
    merged = _merge_list(field, entries)
    count, rest = _fold_entry_list(merged)
    if count:
        one = square_class(field.one())
        minus = square_class(-field.one())
        rest = _merge_list(field, [(c, m) for c, m in rest]
                           + [(one, count), (minus, count)])
    return tuple(sorted(((c, m) for c, m in rest), key=_entry_sort_key))


def gw_symbol(a):
    return GwElement.symbol(a)


def hyperbolic(field, n=1):
    """n copies of <1> + <-1>."""
    one = field.one()
    return GwElement(field, [(square_class(one), n), (square_class(-one), n)])


def from_diagonal(field, values):
    entries = []
    for v in values:
        entries.append((square_class(field.element(v)), 1))
    return GwElement(field, entries)


# ---------------------------------------------------------------------------
# bilinear forms and diagonalization
# ---------------------------------------------------------------------------

class BilinearForm:
    """Symmetric Gram matrix over a field."""

    __slots__ = ("field", "matrix")

    def __init__(self, field, matrix):
        rows = tuple(tuple(field.element(x) for x in row) for row in matrix)
        n = len(rows)
        for row in rows:
            if len(row) != n:
                raise ValueError("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if not (rows[i][j] - rows[j][i]).is_zero():
                    raise ValueError("Gram matrix must be symmetric")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "matrix", rows)

    def __setattr__(self, name, value):
        raise AttributeError("bilinear forms are immutable")

    def rank_size(self):
        return len(self.matrix)

    def diagonal_entries(self):
        """Symmetric congruence reduction to a diagonal; deterministic.

        Pivot strategy: the first usable diagonal entry (least valuation
        over Puiseux fields); if the whole remaining diagonal vanishes, add
        row/column j into i where entry (i, j) is nonzero -- valid since
        the characteristic is never 2.
        """
        n = len(self.matrix)
        m = [list(row) for row in self.matrix]
        field = self.field
        diag = []
        for i in range(n):
            pivot = self._choose_pivot(m, i)
            if pivot is None:
                self._raise_degenerate(m, i)
            if pivot != i:
                m[i], m[pivot] = m[pivot], m[i]
                for row in m:
                    row[i], row[pivot] = row[pivot], row[i]
            if m[i][i].is_zero():
                j = next((j for j in range(i + 1, n)
                          if not m[i][j].is_zero()), None)
                if j is None:
                    self._raise_degenerate(m, i)
                for k in range(n):
                    m[i][k] = m[i][k] + m[j][k]
                for k in range(n):
                    m[k][i] = m[k][i] + m[k][j]
            d = m[i][i]
            diag.append(d)
            inv = d.inverse()
            for j in range(i + 1, n):
                if m[j][i].is_zero():
                    continue
                c = m[j][i] * inv
                for k in range(n):
                    m[j][k] = m[j][k] - c * m[i][k]
                for k in range(n):
                    m[k][j] = m[k][j] - c * m[k][i]
        return diag

    def _choose_pivot(self, m, i):
        n = len(m)
        candidates = [j for j in range(i, n) if not m[j][j].is_zero()]
        if candidates:
            if isinstance(self.field, PuiseuxSeriesField):
                return min(candidates,
                           key=lambda j: (self.field.valuation(m[j][j]), j))
            return candidates[0]
        # all-zero diagonal: any nonzero off-diagonal entry will do
        for j in range(i, n):
            for k in range(j + 1, n):
                if not m[j][k].is_zero():
                    return j
        return None

    def _raise_degenerate(self, m, i):
        n = len(m)
        fuzzy = False
        if isinstance(self.field, PuiseuxSeriesField):
            for j in range(i, n):
                for k in range(i, n):
                    if m[j][k].data[1] is not None:
                        fuzzy = True
        if fuzzy:
            raise PrecisionExhausted(
                "Gram block vanishes to precision; cannot certify rank")
        raise DegenerateForm("Gram matrix is degenerate")

    def determinant_class(self):
        prod = self.field.one()
        for d in self.diagonal_entries():
            prod = prod * d
        return square_class(prod)

    def is_nondegenerate(self):
        try:
            self.diagonal_entries()
            return True
        except DegenerateForm:
            return False

    def __repr__(self):
        rows = ["[" + ", ".join(str(x) for x in row) + "]"
                for row in self.matrix]
        return "[" + ", ".join(rows) + "]"


def diagonalize(form):
    """GW class of a nondegenerate symmetric bilinear form."""
    entries = [(square_class(d), 1) for d in form.diagonal_entries()]
    return GwElement(form.field, entries)


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GwInvariants:
    rank: int
    det_class: SquareClass | None
    discriminant: SquareClass | None
    signature: int | None
    hasse_witt: dict | None

    def discriminant_is_trivial(self):
        if self.discriminant is None:
            return None
        return is_square(self.discriminant.representative)


def _det_class(e):
    field = e.field
    prod = field.one()
    for cls, m in e.entries:
        if m % 2:
            prod = prod * cls.representative
    return square_class(prod)


def invariants(e):
    """Rank, determinant class, signed discriminant, signature (Q only),
    Hasse-Witt symbols (Q, non-virtual classes only)."""
    field = e.field
    r = e.rank()
    try:
        det = _det_class(e)
    except (PrecisionExhausted, ZeroInput):
        det = None
    disc = None
    if det is not None:
        sign = -1 if (r * (r - 1) // 2) % 2 else 1
        disc = square_class(det.representative * sign)
    sig = None
    if isinstance(field, RationalField):
        sig = sum(m * (1 if cls.representative.data > 0 else -1)
                  for cls, m in e.entries)
    hw = None
    if isinstance(field, RationalField) and all(m >= 0 for _, m in e.entries):
        reps = []
        for cls, m in e.entries:
            reps.extend([int(cls.representative.data)] * m)
        hw = _hasse_witt(reps)
    return GwInvariants(rank=r, det_class=det, discriminant=disc,
                        signature=sig, hasse_witt=hw)


def _candidate_primes(reps):
    primes = {2}
    for r in reps:
        primes.update(_factor_int(abs(r)).keys())
    primes.discard(1)
    return sorted(primes)


def _hasse_witt(reps):
    primes = _candidate_primes(reps)
    out = {}
    for p in primes:
        eps = 1
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                eps *= hilbert_symbol(reps[i], reps[j], p)
        out[p] = eps
    return out


def hilbert_symbol(a, b, p):
    """(a, b)_p for nonzero integers a, b and a prime p (2 allowed)."""
    if a == 0 or b == 0:
        raise ZeroInput("Hilbert symbol needs nonzero arguments")

    def split(n):
        alpha = 0
        while n % p == 0:
            n //= p
            alpha += 1
        return alpha, n

    alpha, u = split(a)
    beta, v = split(b)
    if p != 2:
        eps = ((p - 1) // 2) % 2
        sign = -1 if (alpha * beta * eps) % 2 else 1
        res = sign
        if beta % 2:
            res *= _legendre(u, p)
        if alpha % 2:
            res *= _legendre(v, p)
        return res
    exponent = (((u - 1) // 2) * ((v - 1) // 2)
                + alpha * ((v * v - 1) // 8)
                + beta * ((u * u - 1) // 8))
    return -1 if exponent % 2 else 1


def _legendre(u, p):
    r = pow(u % p, (p - 1) // 2, p)
    return 1 if r == 1 else -1


# ---------------------------------------------------------------------------
# equality
# ---------------------------------------------------------------------------

def gw_equal(e1, e2):
    """Three-valued equality of virtual GW classes.

    Complete over Q (rank, signature, determinant and all Hasse-Witt
    symbols, by the Hasse-Minkowski classification plus Witt cancellation),
    over finite fields (rank and determinant), and over Puiseux/Laurent
    fields with decidable coefficients (valuation-parity splitting).
    Elsewhere the classes are compared syntactically after merging and
    hyperbolic folding; ``None`` means undecided.
    """
    if e1.field != e2.field:
        raise FieldMismatch("classes over different fields")
    if e1.rank() != e2.rank():
        return False
    field = e1.field
    if isinstance(field, RationalField):
        return _equal_rationals(e1, e2)
    if field.is_finite():
        d1, d2 = _det_class(e1), _det_class(e2)
        return d1.same_class(d2)
    if isinstance(field, PuiseuxSeriesField):
        return _equal_puiseux(e1, e2)
    return _equal_syntactic(e1, e2)


def _equal_rationals(e1, e2):
    # move negative multiplicities across: e1 = e2 iff A and B are
    # isometric forms, where A = pos(e1) + neg(e2), B = pos(e2) + neg(e1)
    a_reps, b_reps = [], []
    for cls, m in e1.entries:
        (a_reps if m > 0 else b_reps).extend(
            [int(cls.representative.data)] * abs(m))
    for cls, m in e2.entries:
        (b_reps if m > 0 else a_reps).extend(
            [int(cls.representative.data)] * abs(m))
    if len(a_reps) != len(b_reps):
        return False
    if not a_reps:
        return True
    if sum(1 if r > 0 else -1 for r in a_reps) != \
       sum(1 if r > 0 else -1 for r in b_reps):
        return False
    det_a = _squarefree_product(a_reps)
    det_b = _squarefree_product(b_reps)
    if det_a != det_b:
        return False
    for p in _candidate_primes(a_reps + b_reps):
        eps_a = 1
        for i in range(len(a_reps)):
            for j in range(i + 1, len(a_reps)):
                eps_a *= hilbert_symbol(a_reps[i], a_reps[j], p)
        eps_b = 1
        for i in range(len(b_reps)):
            for j in range(i + 1, len(b_reps)):
                eps_b *= hilbert_symbol(b_reps[i], b_reps[j], p)
        if eps_a != eps_b:
            return False
    return True


def _squarefree_product(reps):
    prod = 1
    for r in reps:
        prod *= r
    return _squarefree_int(prod)


def _equal_puiseux(e1, e2):
    u1, v1 = springer_residues(e1, normalize=False)
    u2, v2 = springer_residues(e2, normalize=False)
    delta = u1.rank() - u2.rank()
    if delta % 2:
        return False
    j = delta // 2
    base = u1.field
    lhs_first = u1
    rhs_first = u2 + hyperbolic(base, j) if j >= 0 else u2 - hyperbolic(base, -j)
    lhs_second = v1 + hyperbolic(base, j) if j >= 0 else v1 - hyperbolic(base, -j)
    rhs_second = v2
    first = gw_equal(lhs_first, rhs_first)
    second = gw_equal(lhs_second, rhs_second)
    if first is True and second is True:
        return True
    if first is False or second is False:
        return False
    return None


def _equal_syntactic(e1, e2):
    h1, rest1 = fold_hyperbolic(e1)
    h2, rest2 = fold_hyperbolic(e2)
    if h1 == h2 and _same_multiset(rest1, rest2):
        return True
    return None


def _same_multiset(entries1, entries2):
    remaining = [list(cm) for cm in entries2]
    for cls, m in entries1:
        found = False
        for slot in remaining:
            if slot[1] == m and slot[0].same_class(cls) is True:
                remaining.remove(slot)
                found = True
                break
        if not found:
            return False
    return not remaining


def fold_hyperbolic(e):
    """Extract hyperbolic content: returns (n, rest) with e = n*h + rest
    and no two same-sign entries of rest pairing to a hyperbolic plane.
    This is the relation <a> + <-a> = <1> + <-1> applied greedily."""
    return _fold_entry_list([[cls, m] for cls, m in e.entries])


def _fold_entry_list(entries):
    count = 0
    changed = True
    while changed:
        changed = False
        for i in range(len(entries)):
            cls_i, m_i = entries[i]
            if m_i == 0:
                continue
            # self-pairing: <a> + <a> is hyperbolic when -1 ~ a*a*(-1) is square
            minus = _is_minus_square(cls_i, cls_i)
            if minus and abs(m_i) >= 2:
                k = abs(m_i) // 2
                s = 1 if m_i > 0 else -1
                count += s * k
                entries[i][1] = m_i - s * 2 * k
                changed = True
                continue
            for j in range(i + 1, len(entries)):
                cls_j, m_j = entries[j]
                if m_j == 0 or (m_i > 0) != (m_j > 0):
                    continue
                if _is_minus_square(cls_i, cls_j):
                    k = min(abs(m_i), abs(m_j))
                    s = 1 if m_i > 0 else -1
                    count += s * k
                    entries[i][1] -= s * k
                    entries[j][1] -= s * k
                    changed = True
                    break
            if changed:
                break
    rest = tuple((cls, m) for cls, m in entries if m != 0)
    return count, rest


def _is_minus_square(cls1, cls2):
    try:
        return is_square(-(cls1.representative * cls2.representative)) is True
    except (PrecisionExhausted, ZeroInput):
        return False


# ---------------------------------------------------------------------------
# transfers
# ---------------------------------------------------------------------------

def trace_form_gram(a, basis=None):
    """Gram matrix of the transfer of <a> one step down the tower:
    entries Tr(a * b_i * b_j) in the given basis (power basis by default)."""
    field = a.field
    parent = field.finite_parent()
    if parent is None:
        raise NotAnExtension(f"{field} is not a finite extension")
    if basis is None:
        basis = field.parent_basis()
    n = field.parent_degree()
    if len(basis) != n:
        raise ValueError(f"basis must have {n} elements")
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            row.append(field.trace_step(a * basis[i] * basis[j]))
        rows.append(row)
    return BilinearForm(parent, rows)


def transfer(e, down_to, basis=None):
    """Transfer GW(L) -> GW(k) along finite separable steps of the tower.

    A custom ``basis`` may be supplied for a single-step transfer; it must
    be a basis of L over its parent (the Gram matrix coming out
    nondegenerate certifies that)."""
    chain = extension_chain(e.field, down_to)
    current = e
    for step, field in enumerate(chain[:-1]):
        use_basis = basis if (basis is not None and len(chain) == 2) else None
        out = GwElement.zero(chain[step + 1])
        for cls, m in current.entries:
            gram = trace_form_gram(cls.representative, basis=use_basis)
            out = out + diagonalize(gram) * m
        current = out
    return current


# ---------------------------------------------------------------------------
# Springer residues over Laurent / Puiseux fields
# ---------------------------------------------------------------------------

def springer_residues(e, normalize=True):
    """Split a class over k((t^(1/m))) by valuation parity of the entries.

    Returns (first, second) over the coefficient field: even-valuation
    entries contribute their leading-coefficient class to the first
    residue, odd-valuation entries to the second.  The pair is canonical
    only up to shifting j*(h, -h) across; with ``normalize=True`` any
    hyperbolic content of the second residue is folded into the first, so
    classes pulled back from k[[t]] report a vanishing second residue.
    """
    field = e.field
    if not isinstance(field, PuiseuxSeriesField):
        raise FieldMismatch("Springer residues need a Puiseux/Laurent field")
    base = field.coefficients
    first, second = [], []
    for cls, m in e.entries:
        rep = cls.representative
        v = field.valuation(rep)
        lead = field.leading_coefficient(rep)
        target = first if v % 2 == 0 else second
        target.append((square_class(lead), m))
    first_e = GwElement(base, first)
    second_e = GwElement(base, second)
    if normalize and not second_e.is_zero():
        n_h, rest = fold_hyperbolic(second_e)
        if n_h:
            first_e = first_e + hyperbolic(base, n_h)
            second_e = GwElement(base, list(rest))
    return first_e, second_e


def springer_reconstruct(field, first, second):
    """u + t*v back in GW of the Puiseux field."""
    entries = []
    t = field.t()
    for cls, m in first.entries:
        entries.append((square_class(field.embed(cls.representative)), m))
    for cls, m in second.entries:
        entries.append((square_class(field.embed(cls.representative) * t), m))
    return GwElement(field, entries)


def embed_gw(e, field):
    """Push a GW class along a field embedding (e.g. k into k((t)))."""
    entries = [(square_class(field.embed(cls.representative)), m)
               for cls, m in e.entries]
    return GwElement(field, entries)
