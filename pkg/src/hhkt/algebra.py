"""Graded complete intersection algebra presentations over F_p.

A presentation is  /\\(y_1..y_l) (x) K[x_1..x_n]/(rho_1..rho_m)  with the
rho_i a regular sequence of decomposable homogeneous polynomials in the
polynomial generators.  Monomials carry an exterior bit mask plus an
exponent vector; normal forms modulo the relations are computed degree by
degree with exact linear algebra (exponent truncation when every relation
is a pure power).

Sign convention: graded commutativity with the Koszul rule throughout,
a*b = (-1)^{|a||b|} b*a.  In characteristic 2 "exterior" means square-zero
by fiat; in odd characteristic exterior generators must have odd degree and
polynomial generators even degree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .fields import PrimeField, SparseMatrix, rref


class PresentationError(ValueError):
    pass


class InternalConsistencyError(RuntimeError):
    """A verified-by-construction identity failed; indicates a bug."""


EXTERIOR = "exterior"
POLYNOMIAL = "polynomial"


@dataclass(frozen=True)
class GradedGenerator:
    name: str
    degree: int
    kind: str


@dataclass(frozen=True)
class Monomial:
    """mask: bit set over exterior generators; exps: polynomial exponents."""

    mask: int
    exps: tuple

    def sort_key(self, n_ext):
        bits = tuple((self.mask >> i) & 1 for i in range(n_ext))
        return (bits, self.exps)

    def is_unit(self):
        return self.mask == 0 and not any(self.exps)


class Polynomial:
    """A linear combination of monomials of one presentation."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra, terms=None):
        self.algebra = algebra
        p = algebra.field.p
        clean = {}
        for m, c in (terms or {}).items():
            c %= p
            if c:
                clean[m] = c
        self.terms = clean

    def is_zero(self):
        return not self.terms

    def degree(self):
        """Degree of a homogeneous element (None for 0)."""
        degs = {self.algebra.mono_degree(m) for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("inhomogeneous polynomial has no degree")
        return degs.pop()

    def is_homogeneous(self):
        return len({self.algebra.mono_degree(m) for m in self.terms}) <= 1

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(self.algebra, out)

    def __sub__(self, other):
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) - c
        return Polynomial(self.algebra, out)

    def __neg__(self):
        return Polynomial(self.algebra, {m: -c for m, c in self.terms.items()})

    def scale(self, k):
        return Polynomial(self.algebra, {m: c * k for m, c in self.terms.items()})

    def __mul__(self, other):
        self._check(other)
        A = self.algebra
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                for m, c in A.mul_monomials(m1, m2):
                    out[m] = out.get(m, 0) + c1 * c2 * c
        return Polynomial(A, out)

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and self.algebra is other.algebra
                and self.terms == other.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _check(self, other):
        if other.algebra is not self.algebra:
            raise ValueError("mixed presentations")

    def __repr__(self):
        return f"Polynomial({self.algebra.label_poly(self)})"


class AlgebraPresentation:
    """Validated presentation with cached bases and normal-form tables."""

    def __init__(self, field: PrimeField, generators, relation_exprs=()):
        self.field = field
        self.generators = tuple(generators)
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise PresentationError("duplicate generator names")
        for g in self.generators:
            if g.degree < 1:
                raise PresentationError(f"generator {g.name} has degree < 1")
            if g.kind not in (EXTERIOR, POLYNOMIAL):
                raise PresentationError(f"unknown kind {g.kind!r}")
            if field.p > 2:
                if g.kind == POLYNOMIAL and g.degree % 2:
                    raise PresentationError(
                        f"odd characteristic: polynomial generator {g.name} "
                        f"must have even degree")
                if g.kind == EXTERIOR and g.degree % 2 == 0:
                    raise PresentationError(
                        f"odd characteristic: exterior generator {g.name} "
                        f"must have odd degree")
        self.ext_index = [i for i, g in enumerate(self.generators)
                          if g.kind == EXTERIOR]
        self.poly_index = [i for i, g in enumerate(self.generators)
                           if g.kind == POLYNOMIAL]
        self.n_ext = len(self.ext_index)
        self.n_poly = len(self.poly_index)
        self.ext_degrees = tuple(self.generators[i].degree for i in self.ext_index)
        self.poly_degrees = tuple(self.generators[i].degree for i in self.poly_index)
        self._nf_tables = {}
        self._basis_cache = {}
        self._poly_nf_basis_cache = {}
        # relation expressions are parsed in the free algebra (no relations
        # attached yet), then attached; clear caches populated meanwhile
        self.relations = ()
        self._pure_power_caps = {}
        self.relations = tuple(
            self._validate_relation(r) for r in relation_exprs)
        self._pure_power_caps = self._detect_pure_powers()
        self._nf_tables.clear()
        self._basis_cache.clear()
        self._poly_nf_basis_cache.clear()
        self._free_cover = None

    # -- construction helpers -------------------------------------------

    def _validate_relation(self, expr):
        rho = parse_poly_expr(self, expr) if isinstance(expr, str) else expr
        if rho.is_zero():
            raise PresentationError("zero relation")
        if not rho.is_homogeneous():
            raise PresentationError("relations must be homogeneous")
        for m in rho.terms:
            if m.mask:
                raise PresentationError(
                    "relations must involve polynomial generators only")
            if sum(m.exps) < 2:
                raise PresentationError(
                    "relation has a linear term (must be decomposable)")
        return rho

    def _detect_pure_powers(self):
        """Per-variable exponent caps when every relation is c*x_j^k."""
        caps = {}
        for rho in self.relations:
            if len(rho.terms) != 1:
                return None
            (m,) = rho.terms
            nz = [j for j, e in enumerate(m.exps) if e]
            if len(nz) != 1:
                return None
            j = nz[0]
            if j in caps:
                return None
            caps[j] = m.exps[j]
        return caps

    # -- degrees and units -----------------------------------------------

    def free_cover(self):
        """The same generators with no relations attached."""
        if not self.relations:
            return self
        if self._free_cover is None:
            self._free_cover = AlgebraPresentation(self.field,
                                                   self.generators)
        return self._free_cover

    def unit_monomial(self):
        return Monomial(0, (0,) * self.n_poly)

    def one(self):
        return Polynomial(self, {self.unit_monomial(): 1})

    def zero(self):
        return Polynomial(self, {})

    def mono_degree(self, m: Monomial) -> int:
        d = sum(self.ext_degrees[i] for i in range(self.n_ext)
                if (m.mask >> i) & 1)
        d += sum(e * self.poly_degrees[j] for j, e in enumerate(m.exps))
        return d

    def generator_monomial(self, name):
        for i, gi in enumerate(self.ext_index):
            if self.generators[gi].name == name:
                return Monomial(1 << i, (0,) * self.n_poly)
        for j, gj in enumerate(self.poly_index):
            if self.generators[gj].name == name:
                exps = [0] * self.n_poly
                exps[j] = 1
                return Monomial(0, tuple(exps))
        raise PresentationError(f"unknown generator name {name!r}")

    def generator_poly(self, name):
        return Polynomial(self, {self.generator_monomial(name): 1})

    # -- multiplication ---------------------------------------------------

    def mul_monomials(self, m1: Monomial, m2: Monomial):
        """Product of two monomials as a list of (Monomial, coeff).

        Koszul sign from interleaving exterior symbols; exterior squares
        vanish; the polynomial part is reduced to normal form modulo the
        relations (which may split one monomial into several).
        """
        if m1.mask & m2.mask:
            return []
        sign = 1
        if self.field.p != 2:
            for i in range(self.n_ext):
                if not (m2.mask >> i) & 1 or self.ext_degrees[i] % 2 == 0:
                    continue
                # odd symbol of m2 crosses the odd m1-symbols above slot i
                crossings = sum(
                    1 for k in range(i + 1, self.n_ext)
                    if (m1.mask >> k) & 1 and self.ext_degrees[k] % 2)
                if crossings % 2:
                    sign = -sign
        exps = tuple(a + b for a, b in zip(m1.exps, m2.exps))
        out = []
        for mono, c in self._poly_normal_form(exps):
            out.append((Monomial(m1.mask | m2.mask, mono.exps), sign * c))
        return out

    def _poly_normal_form(self, exps):
        """Normal form of a free polynomial-part monomial."""
        if self._pure_power_caps is not None:
            for j, cap in self._pure_power_caps.items():
                if exps[j] >= cap:
                    return []
            return [(Monomial(0, exps), 1)]
        if not self.relations:
            return [(Monomial(0, exps), 1)]
        deg = sum(e * d for e, d in zip(exps, self.poly_degrees))
        basis, reduction = self._nf_table(deg)
        key = exps
        if key in reduction:
            return [(Monomial(0, e), c) for e, c in reduction[key].items()]
        return [(Monomial(0, exps), 1)]

    def _free_poly_exponents(self, degree):
        """All exponent tuples of the given degree in the free K[x]."""
        out = []

        def rec(j, rem, acc):
            if j == self.n_poly:
                if rem == 0:
                    out.append(tuple(acc))
                return
            d = self.poly_degrees[j]
            e = 0
            while e * d <= rem:
                acc.append(e)
                rec(j + 1, rem - e * d, acc)
                acc.pop()
                e += 1

        rec(0, degree, [])
        return sorted(out)

    def _nf_table(self, degree):
        """(basis exponent tuples, reduction map) for one poly degree."""
        if degree in self._nf_tables:
            return self._nf_tables[degree]
        free = self._free_poly_exponents(degree)
        index = {e: i for i, e in enumerate(free)}
        rows = []
        for rho in self.relations:
            r = rho.degree()
            if r > degree:
                continue
            for m_exps in self._free_poly_exponents(degree - r):
                row = {}
                for m, c in rho.terms.items():
                    prod = tuple(a + b for a, b in zip(m_exps, m.exps))
                    row[index[prod]] = (row.get(index[prod], 0) + c) % self.field.p
                rows.append(row)
        entries = {}
        for i, row in enumerate(rows):
            for j, v in row.items():
                if v:
                    entries[(i, j)] = v
        M = SparseMatrix(len(rows), len(free), entries, self.field)
        pivots, rref_rows = rref(M)
        pivot_set = set(pivots)
        basis = [free[j] for j in range(len(free)) if j not in pivot_set]
        reduction = {}
        for i, c in enumerate(pivots):
            combo = {}
            for j, v in rref_rows[i].items():
                if j != c:
                    combo[free[j]] = (-v) % self.field.p
            reduction[free[c]] = combo
        self._nf_tables[degree] = (basis, reduction)
        return basis, reduction

    def poly_nf_basis(self, degree):
        """Normal-form exponent tuples of one degree of K[x]/(rho)."""
        if degree < 0:
            return []
        if degree in self._poly_nf_basis_cache:
            return self._poly_nf_basis_cache[degree]
        if self._pure_power_caps is not None:
            caps = self._pure_power_caps
            basis = [e for e in self._free_poly_exponents(degree)
                     if all(e[j] < cap for j, cap in caps.items())]
        else:
            basis, _ = self._nf_table(degree)
        self._poly_nf_basis_cache[degree] = basis
        return basis

    # -- bases -------------------------------------------------------------

    def monomial_basis(self, degree):
        """Ordered basis monomials of one degree of the quotient algebra."""
        if degree < 0:
            return []
        if degree in self._basis_cache:
            return self._basis_cache[degree]
        out = []
        for mask in range(1 << self.n_ext):
            d_ext = sum(self.ext_degrees[i] for i in range(self.n_ext)
                        if (mask >> i) & 1)
            if d_ext > degree:
                continue
            for exps in self.poly_nf_basis(degree - d_ext):
                out.append(Monomial(mask, exps))
        out.sort(key=lambda m: m.sort_key(self.n_ext))
        self._basis_cache[degree] = out
        return out

    def is_finite_dimensional(self):
        if self.n_poly == 0:
            return True
        if self._pure_power_caps is not None:
            return len(self._pure_power_caps) == self.n_poly
        # bounded iff every variable is nilpotent in the quotient; detect by
        # scanning dimensions up to a safe degree via Hilbert data
        top = self.top_degree_bound()
        return top is not None

    def top_degree_bound(self):
        """Top nonzero degree for finite-dimensional algebras, else None."""
        if self.n_poly == 0:
            return sum(self.ext_degrees)
        if self._pure_power_caps is not None:
            if len(self._pure_power_caps) != self.n_poly:
                return None
            top_poly = sum((cap - 1) * self.poly_degrees[j]
                           for j, cap in self._pure_power_caps.items())
            return top_poly + sum(self.ext_degrees)
        # general case: the quotient by a regular sequence of length m in n
        # variables is finite-dimensional iff m = n; its socle degree is
        # sum(deg rho_i) - sum(deg x_j)
        if len(self.relations) != self.n_poly:
            return None
        top_poly = sum(r.degree() for r in self.relations) - sum(self.poly_degrees)
        return top_poly + sum(self.ext_degrees)

    def dim_in_degree(self, degree):
        return len(self.monomial_basis(degree))

    def augmentation_basis(self, degree):
        """Basis of the augmentation ideal piece (positive degree only)."""
        return self.monomial_basis(degree) if degree >= 1 else []

    def hilbert_coefficient(self, degree):
        return self.dim_in_degree(degree)

    # -- labels -------------------------------------------------------------

    def label_monomial(self, m: Monomial) -> str:
        parts = []
        for i in range(self.n_ext):
            if (m.mask >> i) & 1:
                parts.append(self.generators[self.ext_index[i]].name)
        for j, e in enumerate(m.exps):
            if e:
                name = self.generators[self.poly_index[j]].name
                parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def label_poly(self, poly: Polynomial) -> str:
        if poly.is_zero():
            return "0"
        items = sorted(poly.terms.items(),
                       key=lambda kv: kv[0].sort_key(self.n_ext))
        parts = []
        for m, c in items:
            lbl = self.label_monomial(m)
            parts.append(lbl if c == 1 else f"{c}{lbl}" if lbl == "1"
                         else f"{c}*{lbl}")
        return " + ".join(parts)


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\^)|(\*)|(\+)|(-))")


def parse_poly_expr(algebra: AlgebraPresentation, text: str) -> Polynomial:
    """Parse 'x1^2*x2 + 3*x3^4' style expressions over the generators."""
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise PresentationError(f"bad token at {text[pos:]!r}")
            break
        pos = m.end()
        tokens.append(m)
    result = algebra.zero()
    sign = 1
    term_coeff = None
    term_poly = None

    def flush():
        nonlocal result, term_coeff, term_poly
        if term_poly is None and term_coeff is None:
            return
        t = term_poly if term_poly is not None else algebra.one()
        c = term_coeff if term_coeff is not None else 1
        result = result + t.scale(sign * c)

    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.group(5) or tok.group(6):  # + or -
            flush()
            term_coeff = None
            term_poly = None
            sign = 1 if tok.group(5) else -1
            i += 1
            continue
        if tok.group(4):  # '*' separator
            i += 1
            continue
        if tok.group(1):
            c = int(tok.group(1))
            term_coeff = c if term_coeff is None else term_coeff * c
            i += 1
            continue
        name = tok.group(2)
        exp = 1
        if i + 2 < len(tokens) and tokens[i + 1].group(3) and tokens[i + 2].group(1):
            exp = int(tokens[i + 2].group(1))
            i += 2
        elif i + 1 < len(tokens) and tokens[i + 1].group(3):
            raise PresentationError("dangling '^'")
        factor = algebra.generator_poly(name)
        powed = algebra.one()
        for _ in range(exp):
            powed = powed * factor
        term_poly = powed if term_poly is None else term_poly * powed
        i += 1
    flush()
    return result


def parse_presentation(doc: dict) -> AlgebraPresentation:
    """Build a validated presentation from a decoded JSON document."""
    try:
        p = int(doc["characteristic"])
    except (KeyError, TypeError, ValueError):
        raise PresentationError("missing or invalid 'characteristic'")
    field = PrimeField(p)
    gens = []
    for g in doc.get("generators", []):
        kind = g.get("kind")
        if kind not in (EXTERIOR, POLYNOMIAL):
            raise PresentationError(f"generator kind must be 'exterior' or "
                                    f"'polynomial', got {kind!r}")
        gens.append(GradedGenerator(str(g["name"]), int(g["degree"]), kind))
    return AlgebraPresentation(field, gens, tuple(doc.get("relations", ())))


# -- calculus ---------------------------------------------------------------


def partial_derivative(poly: Polynomial, var_name: str) -> Polynomial:
    """Formal d/dx_j of a polynomial in the polynomial generators."""
    A = poly.algebra
    gm = A.generator_monomial(var_name)
    if gm.mask:
        raise PresentationError(
            f"cannot differentiate with respect to exterior generator "
            f"{var_name!r}")
    j = next(i for i, e in enumerate(gm.exps) if e)
    out = {}
    for m, c in poly.terms.items():
        if m.mask:
            raise PresentationError("polynomial generators only")
        e = m.exps[j]
        if e == 0:
            continue
        exps = list(m.exps)
        exps[j] -= 1
        mono = Monomial(0, tuple(exps))
        out[mono] = out.get(mono, 0) + c * e
    return Polynomial(A, out)


class TensorPoly:
    """An element of Lambda (x) Lambda as {(Monomial, Monomial): coeff}.

    Multiplication uses the Koszul rule for the tensor product of graded
    algebras: (a(x)b)(a'(x)b') = (-1)^{|b||a'|} aa' (x) bb'.
    """

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra, terms=None):
        self.algebra = algebra
        p = algebra.field.p
        self.terms = {}
        for k, c in (terms or {}).items():
            c %= p
            if c:
                self.terms[k] = c

    @classmethod
    def from_sides(cls, left: Polynomial, right: Polynomial):
        A = left.algebra
        terms = {}
        for ml, cl in left.terms.items():
            for mr, cr in right.terms.items():
                terms[(ml, mr)] = terms.get((ml, mr), 0) + cl * cr
        return cls(A, terms)

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return TensorPoly(self.algebra, out)

    def __sub__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) - c
        return TensorPoly(self.algebra, out)

    def __mul__(self, other):
        A = self.algebra
        out = {}
        for (l1, r1), c1 in self.terms.items():
            d_r1 = A.mono_degree(r1)
            for (l2, r2), c2 in other.terms.items():
                sign = -1 if (d_r1 * A.mono_degree(l2)) % 2 else 1
                for ml, cl in A.mul_monomials(l1, l2):
                    for mr, cr in A.mul_monomials(r1, r2):
                        k = (ml, mr)
                        out[k] = out.get(k, 0) + sign * c1 * c2 * cl * cr
        return TensorPoly(A, out)

    def is_zero(self):
        return not self.terms

    def apply_multiplication(self) -> Polynomial:
        """The multiplication map Lambda (x) Lambda -> Lambda."""
        A = self.algebra
        out = A.zero()
        for (l, r), c in self.terms.items():
            prod = Polynomial(A, dict(A.mul_monomials(l, r)))
            out = out + prod.scale(c)
        return out

    def __eq__(self, other):
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))


def zeta_coefficients(rho: Polynomial):
    """Telescoping coefficients zeta_j with
    rho(x)1 - 1(x)rho = sum_j zeta_j (x_j(x)1 - 1(x)x_j)
    and mult(zeta_j) = d rho/d x_j.

    Telescoping each monomial variable by variable in the declared order,
    with the symmetric geometric quotient in each step, satisfies both
    conditions simultaneously; both are re-verified on every call.  The
    construction and its verification run in the free polynomial cover
    (inside the quotient the relation itself vanishes); the result is then
    pushed down along the quotient map.
    """
    quotient = rho.algebra
    free = quotient.free_cover()
    if free is not quotient:
        zetas_free = zeta_coefficients(Polynomial(free, dict(rho.terms)))
        out = []
        for z in zetas_free:
            terms = {}
            for (l, r), c in z.terms.items():
                for lm, lc in quotient._poly_normal_form(l.exps):
                    for rm, rc in quotient._poly_normal_form(r.exps):
                        k = (lm, rm)
                        terms[k] = terms.get(k, 0) + c * lc * rc
            out.append(TensorPoly(quotient, terms))
        return out
    A = rho.algebra
    n = A.n_poly
    zetas = [TensorPoly(A) for _ in range(n)]
    for m, c in rho.terms.items():
        if m.mask:
            raise PresentationError("relations involve polynomial "
                                    "generators only")
        for j in range(n):
            e = m.exps[j]
            if e == 0:
                continue
            prefix = tuple(m.exps[i] if i < j else 0 for i in range(n))
            suffix = tuple(m.exps[i] if i > j else 0 for i in range(n))
            terms = {}
            for s in range(e):
                t = e - 1 - s
                le = list(prefix)
                le[j] += s
                re_ = list(suffix)
                re_[j] += t
                key = (Monomial(0, tuple(le)), Monomial(0, tuple(re_)))
                terms[key] = terms.get(key, 0) + c
            zetas[j] = zetas[j] + TensorPoly(A, terms)
    _verify_zeta(rho, zetas)
    return zetas


def _verify_zeta(rho, zetas):
    A = rho.algebra
    lhs = TensorPoly.from_sides(rho, A.one()) - TensorPoly.from_sides(A.one(), rho)
    acc = TensorPoly(A)
    for j, z in enumerate(zetas):
        name = A.generators[A.poly_index[j]].name
        xj = A.generator_poly(name)
        step = TensorPoly.from_sides(xj, A.one()) - TensorPoly.from_sides(A.one(), xj)
        acc = acc + z * step
    if not (lhs - acc).is_zero():
        raise InternalConsistencyError("zeta telescoping identity failed")
    for j, z in enumerate(zetas):
        name = A.generators[A.poly_index[j]].name
        if not (z.apply_multiplication() - partial_derivative(rho, name)).is_zero():
            raise InternalConsistencyError("zeta derivative condition failed")


# -- regular sequence validation ---------------------------------------------


@dataclass
class RegularSequenceReport:
    ok: bool
    bound: int
    first_failing_degree: int | None
    detail: str


def validate_regular_sequence(A: AlgebraPresentation, degree_bound: int):
    """Hilbert-series criterion, degree by degree up to the bound.

    A homogeneous sequence is regular iff the Koszul identity
    HS(K[x]/(rho)) = HS(K[x]) * prod(1 - t^{deg rho_i}) holds
    coefficientwise; the check runs through the bound and reports the first
    failing degree if any.
    """
    if not A.relations:
        return RegularSequenceReport(True, degree_bound, None,
                                     "no relations (vacuously regular)")
    rel_degs = [r.degree() for r in A.relations]
    if degree_bound < max(rel_degs):
        raise ValueError("degree bound below maximal relation degree")
    # coefficients of prod (1 - t^{r_i})
    factor = {0: 1}
    for r in rel_degs:
        nxt = dict(factor)
        for d, c in factor.items():
            nxt[d + r] = nxt.get(d + r, 0) - c
        factor = nxt
    for d in range(degree_bound + 1):
        expected = sum(c * len(A._free_poly_exponents(d - off))
                       for off, c in factor.items() if off <= d)
        actual = len(A.poly_nf_basis(d))
        if actual != expected:
            return RegularSequenceReport(
                False, degree_bound, d,
                f"Hilbert mismatch at degree {d}: quotient has dimension "
                f"{actual}, a regular sequence would give {expected}")
    return RegularSequenceReport(True, degree_bound, None, "pass")
