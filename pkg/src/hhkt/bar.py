"""The normalized bar complex, Hochschild cochains and chains, and the
window-truncated brute-force HH computation used as an oracle.

Words are tuples of basis monomials of the augmentation ideal; a two-sided
bar element a[a_1|..|a_k]b is only materialized inside differentials.  The
interior differential follows the printed convention

    d_2(a[a_1|..|a_k]b) = (-1)^{|a|} aa_1[..]b
                          + sum_i (-1)^{eps_i} a[..|a_{i-1}a_i|..]b
                          - (-1)^{eps_k} a[..|a_{k-1}]a_k b

with eps_i = |a| + sum_{j<i} |s a_j|; the cochain differential is
del(f) = -(-1)^{|f|} f d_2 (the coefficient differential vanishes here),
and the Connes boundary is the printed cyclic-rotation sum with terms
containing a unit entry dropped.

Cochain cells with coefficients in the algebra itself are finite either
because the algebra is finite-dimensional or, for free polynomial parts,
after capping the word degree at a bound that leaves the discarded
subcomplex exact (the cap exceeds the top internal degree of the torsion
of the trivial module through the window's word lengths).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import AlgebraPresentation, Monomial, Polynomial
from .bigraded import BigradedVectorSpace, CellData, DegreeWindow, WindowError
from .fields import LinearSystem, SparseMatrix, cohomology_cell

COEFF_SELF = "self"
COEFF_DUAL = "dual"


def word_suspension(A, word):
    return sum(A.mono_degree(a) - 1 for a in word)


def word_internal(A, word):
    return sum(A.mono_degree(a) for a in word)


# -- two-sided bar words --------------------------------------------------------


@dataclass(frozen=True)
class BarWord:
    """a[a_1|..|a_k]b with basis-monomial coefficients and entries."""

    left: Monomial
    entries: tuple
    right: Monomial


def bar_differential(w: BarWord, A: AlgebraPresentation):
    """d_2 of a two-sided word: list of (BarWord, coeff).

    Entries stay in the augmentation ideal automatically (products of
    positive-degree elements have positive degree), so normalization only
    drops vanishing products.
    """
    out = {}
    k = len(w.entries)
    if k == 0:
        return []
    da = A.mono_degree(w.left)
    # first term
    sgn = -1 if da % 2 else 1
    for m, c in A.mul_monomials(w.left, w.entries[0]):
        key = BarWord(m, w.entries[1:], w.right)
        out[key] = out.get(key, 0) + sgn * c
    # contractions
    eps = da
    for i in range(2, k + 1):
        eps += A.mono_degree(w.entries[i - 2]) - 1
        sgn = -1 if eps % 2 else 1
        for m, c in A.mul_monomials(w.entries[i - 2], w.entries[i - 1]):
            key = BarWord(w.left, w.entries[:i - 2] + (m,) + w.entries[i:],
                          w.right)
            out[key] = out.get(key, 0) + sgn * c
    # last term
    eps_k = da + word_suspension(A, w.entries[:-1])
    sgn = 1 if eps_k % 2 else -1
    for m, c in A.mul_monomials(w.entries[-1], w.right):
        key = BarWord(w.left, w.entries[:-1], m)
        out[key] = out.get(key, 0) + sgn * c
    p = A.field.p
    return [(bw, c % p) for bw, c in out.items() if c % p]


# -- Hochschild chains ---------------------------------------------------------


class ChainElement:
    """Element of A (x) T(s abar): {(a0: Monomial, word): coeff}."""

    __slots__ = ("A", "terms")

    def __init__(self, A, terms=None):
        self.A = A
        p = A.field.p
        self.terms = {}
        for k, c in (terms or {}).items():
            c %= p
            if c:
                self.terms[k] = c

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return ChainElement(self.A, out)

    def __sub__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) - c
        return ChainElement(self.A, out)

    def scale(self, k):
        return ChainElement(self.A, {m: c * k for m, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, ChainElement) and self.terms == other.terms


def hochschild_b(c: ChainElement) -> ChainElement:
    A = c.A
    out = {}
    for (a0, word), coeff in c.terms.items():
        k = len(word)
        if k == 0:
            continue
        d0 = A.mono_degree(a0)
        sgn = -1 if d0 % 2 else 1
        for m, cc in A.mul_monomials(a0, word[0]):
            key = (m, word[1:])
            out[key] = out.get(key, 0) + coeff * sgn * cc
        eps = d0
        for i in range(2, k + 1):
            eps += A.mono_degree(word[i - 2]) - 1
            sgn = -1 if eps % 2 else 1
            for m, cc in A.mul_monomials(word[i - 2], word[i - 1]):
                key = (a0, word[:i - 2] + (m,) + word[i:])
                out[key] = out.get(key, 0) + coeff * sgn * cc
        eps_k = d0 + word_suspension(A, word[:-1])
        s_last = A.mono_degree(word[-1]) - 1
        sgn = 1 if (s_last * eps_k) % 2 else -1
        for m, cc in A.mul_monomials(word[-1], a0):
            key = (m, word[:-1])
            out[key] = out.get(key, 0) + coeff * sgn * cc
    return ChainElement(A, out)


def connes_boundary(c: ChainElement) -> ChainElement:
    """B(a_0[a_1|..|a_k]) as the printed cyclic-rotation sum; rotations
    whose bracket would contain the unit are dropped (normalization)."""
    A = c.A
    out = {}
    unit = A.unit_monomial()
    for (a0, word), coeff in c.terms.items():
        if a0 == unit:
            continue
        k = len(word)
        d0 = A.mono_degree(a0)
        eps_top = d0 + word_suspension(A, word)
        entries = (a0,) + word
        eps = d0
        for i in range(k + 1):
            if i > 0:
                eps += A.mono_degree(word[i - 1]) - 1
            sgn = -1 if ((eps + 1) * (eps_top - eps)) % 2 else 1
            rotated = entries[i:] + entries[:i]
            key = (unit, rotated)
            out[key] = out.get(key, 0) + coeff * sgn
    return ChainElement(A, out)


def _shuffles(A, wa, wb, susp_a):
    """(interleaved word, Koszul sign) pairs for all (len a, len b) shuffles.

    susp_a is the suspended degree of the remaining part of wa.
    """
    if not wa:
        yield wb, 1
        return
    if not wb:
        yield wa, 1
        return
    for rest, sgn in _shuffles(A, wa[1:], wb,
                               susp_a - (A.mono_degree(wa[0]) - 1)):
        yield (wa[0],) + rest, sgn
    cross = (A.mono_degree(wb[0]) - 1) * susp_a
    flip = -1 if cross % 2 else 1
    for rest, sgn in _shuffles(A, wa, wb[1:], susp_a):
        yield (wb[0],) + rest, sgn * flip


def shuffle_product(c1: ChainElement, c2: ChainElement) -> ChainElement:
    A = c1.A
    out = {}
    for (a0, wa), ca in c1.terms.items():
        susp_a = word_suspension(A, wa)
        for (b0, wb), cb in c2.terms.items():
            base = -1 if (A.mono_degree(b0) * susp_a) % 2 else 1
            for m, cm in A.mul_monomials(a0, b0):
                for word, sgn in _shuffles(A, wa, wb, susp_a):
                    key = (m, word)
                    out[key] = out.get(key, 0) + ca * cb * cm * base * sgn
    return ChainElement(A, out)


def chain_total_degree(A, a0, word):
    return A.mono_degree(a0) + word_suspension(A, word)


# -- Hochschild cochains -------------------------------------------------------


class Cochain:
    """Bar-length-homogeneous cochain given by its value map on words.

    coeff is "self" (values are Polynomials in A) or "dual" (values are
    {Monomial: coeff} dicts standing for sums of dual basis elements; the
    dual of a degree-k monomial sits in degree -k, with the twisted
    bimodule structure <g.alpha.h ; x> = (-1)^{|g|} <alpha; h x g>).
    """

    __slots__ = ("A", "coeff", "p", "q", "values")

    def __init__(self, A, coeff, p, q, values=None):
        self.A = A
        self.coeff = coeff
        self.p = p
        self.q = q
        self.values = {}
        for w, v in (values or {}).items():
            if not _value_is_zero(v):
                self.values[w] = v

    @property
    def total_degree(self):
        return self.p + self.q

    def value(self, word):
        v = self.values.get(word)
        if v is not None:
            return v
        return self.A.zero() if self.coeff == COEFF_SELF else {}

    def __add__(self, other):
        out = dict(self.values)
        for w, v in other.values.items():
            out[w] = _value_add(self.A, out[w], v) if w in out else v
        return Cochain(self.A, self.coeff, self.p, self.q, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, k):
        return Cochain(self.A, self.coeff, self.p, self.q,
                       {w: _value_scale(self.A, v, k)
                        for w, v in self.values.items()})

    def is_zero(self):
        return not self.values


def _value_is_zero(v):
    if isinstance(v, Polynomial):
        return v.is_zero()
    return not any(v.values())


def _value_add(A, v1, v2):
    if isinstance(v1, Polynomial):
        return v1 + v2
    p = A.field.p
    out = dict(v1)
    for m, c in v2.items():
        out[m] = (out.get(m, 0) + c) % p
    return {m: c for m, c in out.items() if c}


def _value_scale(A, v, k):
    if isinstance(v, Polynomial):
        return v.scale(k)
    p = A.field.p
    return {m: (c * k) % p for m, c in v.items() if (c * k) % p}


def dual_left_action(A, g: Monomial, alpha: dict) -> dict:
    """g . alpha with <g.alpha; h> = (-1)^{|g|} <alpha; h g>."""
    p = A.field.p
    dg = A.mono_degree(g)
    sgn = -1 if dg % 2 else 1
    out = {}
    for m, c in alpha.items():
        target = A.mono_degree(m) - dg
        if target < 0:
            continue
        for m2 in A.monomial_basis(target):
            for mm, cc in A.mul_monomials(m2, g):
                if mm == m:
                    out[m2] = (out.get(m2, 0) + sgn * c * cc) % p
    return {m: c for m, c in out.items() if c}


def dual_right_action(A, alpha: dict, g: Monomial) -> dict:
    """alpha . g with <alpha.g; h> = <alpha; g h>."""
    p = A.field.p
    dg = A.mono_degree(g)
    out = {}
    for m, c in alpha.items():
        target = A.mono_degree(m) - dg
        if target < 0:
            continue
        for m2 in A.monomial_basis(target):
            for mm, cc in A.mul_monomials(g, m2):
                if mm == m:
                    out[m2] = (out.get(m2, 0) + c * cc) % p
    return {m: c for m, c in out.items() if c}


def _left_act(A, coeff, g: Monomial, value):
    if coeff == COEFF_SELF:
        return Polynomial(A, {g: 1}) * value
    return dual_left_action(A, g, value)


def _right_act(A, coeff, value, g: Monomial):
    if coeff == COEFF_SELF:
        return value * Polynomial(A, {g: 1})
    return dual_right_action(A, value, g)


def cochain_differential(f: Cochain, target_words) -> Cochain:
    """del f = -(-1)^{|f|} f . d_2, evaluated on the given words."""
    A = f.A
    sign_f = -1 if f.total_degree % 2 else 1
    values = {}
    for word in target_words:
        acc = A.zero() if f.coeff == COEFF_SELF else {}
        k = len(word)
        # leading term: f is a bimodule map, f(a.w) = (-1)^{|a||f|} a.f(w)
        a1 = word[0]
        v = f.value(word[1:])
        if not _value_is_zero(v):
            s = -1 if (A.mono_degree(a1) * f.total_degree) % 2 else 1
            acc = _value_add(A, acc, _value_scale(
                A, _left_act(A, f.coeff, a1, v), s))
        eps = 0
        for i in range(2, k + 1):
            eps += A.mono_degree(word[i - 2]) - 1
            s = -1 if eps % 2 else 1
            for m, c in A.mul_monomials(word[i - 2], word[i - 1]):
                v = f.value(word[:i - 2] + (m,) + word[i:])
                if not _value_is_zero(v):
                    acc = _value_add(A, acc, _value_scale(A, v, s * c))
        eps_k = word_suspension(A, word[:-1])
        v = f.value(word[:-1])
        if not _value_is_zero(v):
            s = 1 if eps_k % 2 else -1
            acc = _value_add(A, acc, _value_scale(
                A, _right_act(A, f.coeff, v, word[-1]), s))
        acc = _value_scale(A, acc, -sign_f)
        if not _value_is_zero(acc):
            values[word] = acc
    return Cochain(A, f.coeff, f.p + 1, f.q, values)


def cochain_cup(f: Cochain, g: Cochain, target_words) -> Cochain:
    """Front-back splitting cup product.

    Coefficient dispatch: self*self multiplies in A; self*dual acts on the
    left of the dual; dual*self acts on the right.  The result coefficient
    type is dual if either factor is dual.
    """
    A = f.A
    if f.coeff == COEFF_DUAL and g.coeff == COEFF_DUAL:
        raise ValueError("no product structure on dual (x) dual coefficients")
    out_coeff = COEFF_DUAL if COEFF_DUAL in (f.coeff, g.coeff) else COEFF_SELF
    values = {}
    for word in target_words:
        if len(word) != f.p + g.p:
            continue
        w1, w2 = word[:f.p], word[f.p:]
        v1 = f.value(w1)
        if _value_is_zero(v1):
            continue
        v2 = g.value(w2)
        if _value_is_zero(v2):
            continue
        sgn = -1 if (g.total_degree * word_suspension(A, w1)) % 2 else 1
        if f.coeff == COEFF_SELF and g.coeff == COEFF_SELF:
            val = (v1 * v2).scale(sgn)
        elif f.coeff == COEFF_SELF:
            val = {}
            for m, c in v1.terms.items():
                val = _value_add(A, val, _value_scale(
                    A, dual_left_action(A, m, v2), c * sgn))
        else:
            val = {}
            for m, c in v2.terms.items():
                val = _value_add(A, val, _value_scale(
                    A, dual_right_action(A, v1, m), c * sgn))
        if not _value_is_zero(val):
            values[word] = val
    return Cochain(A, out_coeff, f.p + g.p, f.q + g.q, values)


def unit_cochain(A):
    return Cochain(A, COEFF_SELF, 0, 0, {(): A.one()})


# -- cochain cells and window homology ----------------------------------------


class CellBlowupError(RuntimeError):
    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


class BarComplex:
    """Lazy (p, q)-cell bases and differential matrices for one coefficient
    side of the Hochschild cochain complex."""

    def __init__(self, A: AlgebraPresentation, coeff: str,
                 window: DegreeWindow, cell_limit=200000):
        self.A = A
        self.coeff = coeff
        self.window = window
        self.cell_limit = cell_limit
        self.top = A.top_degree_bound()
        gen_degs = [g.degree for g in A.generators]
        rel_degs = [r.degree() for r in A.relations]
        self.tor_cap = (window.max_p + 1) * max(gen_degs + rel_degs, default=1)
        self._words = {}
        self._cells = {}
        self._mats = {}
        self._hom = {}
        self._expr = {}

    # word enumeration ------------------------------------------------------

    def words(self, p, S):
        key = (p, S)
        if key in self._words:
            return self._words[key]
        if p == 0:
            out = [()] if S == 0 else []
        else:
            out = []
            for d in range(1, S - (p - 1) + 1):
                for m in self.A.monomial_basis(d):
                    for rest in self.words(p - 1, S - d):
                        out.append((m,) + rest)
        self._words[key] = out
        return out

    def degree_range(self, p, q):
        """Word internal degrees S contributing to the (p, q) cell."""
        lo = p
        if self.coeff == COEFF_SELF:
            lo = max(lo, -q)
            if self.top is not None:
                hi = self.top - q
            else:
                hi = self.tor_cap
        else:
            hi = -q
            if self.top is not None:
                lo = max(lo, -q - self.top)
        return range(lo, hi + 1) if hi >= lo else range(0)

    def cell_basis(self, p, q):
        key = (p, q)
        if key in self._cells:
            return self._cells[key]
        out = []
        for S in self.degree_range(p, q):
            for w in self.words(p, S):
                if self.coeff == COEFF_SELF:
                    for n in self.A.monomial_basis(S + q):
                        out.append((w, n))
                else:
                    for n in self.A.monomial_basis(-(S + q)):
                        out.append((w, n))
        self._cells[key] = out
        return out

    def estimate_cell(self, p, q):
        total = 0
        for S in self.degree_range(p, q):
            nw = len(self.words(p, S))
            tgt = S + q if self.coeff == COEFF_SELF else -(S + q)
            total += nw * self.A.dim_in_degree(tgt)
        return total

    def basis_cochain(self, p, q, idx) -> Cochain:
        w, n = self.cell_basis(p, q)[idx]
        if self.coeff == COEFF_SELF:
            return Cochain(self.A, self.coeff, p, q,
                           {w: Polynomial(self.A, {n: 1})})
        return Cochain(self.A, self.coeff, p, q, {w: {n: 1}})

    def cochain_vector(self, f: Cochain):
        """Coordinates of a (p, q)-homogeneous cochain in the cell basis."""
        basis = self.cell_basis(f.p, f.q)
        index = {b: i for i, b in enumerate(basis)}
        vec = [0] * len(basis)
        for w, v in f.values.items():
            items = v.terms.items() if isinstance(v, Polynomial) else v.items()
            for n, c in items:
                if (w, n) in index:
                    vec[index[(w, n)]] = c % self.A.field.p
                elif c % self.A.field.p:
                    raise WindowError(
                        "cochain leaves the truncated window cell")
        return tuple(vec)

    def vector_cochain(self, p, q, vec) -> Cochain:
        basis = self.cell_basis(p, q)
        values = {}
        for i, c in enumerate(vec):
            if not c:
                continue
            w, n = basis[i]
            if self.coeff == COEFF_SELF:
                add = Polynomial(self.A, {n: c})
            else:
                add = {n: c}
            values[w] = _value_add(self.A, values[w], add) if w in values \
                else add
        return Cochain(self.A, self.coeff, p, q, values)

    # matrices and homology ---------------------------------------------------

    def matrix(self, p, q) -> SparseMatrix:
        """The differential from the (p, q) cell to (p+1, q)."""
        key = (p, q)
        if key in self._mats:
            return self._mats[key]
        src = self.cell_basis(p, q)
        dst = self.cell_basis(p + 1, q)
        dst_words = list(dict.fromkeys(w for (w, _) in dst))
        index = {b: i for i, b in enumerate(dst)}
        entries = {}
        for j in range(len(src)):
            f = self.basis_cochain(p, q, j)
            df = cochain_differential(f, dst_words)
            for w, v in df.values.items():
                items = v.terms.items() if isinstance(v, Polynomial) \
                    else v.items()
                for n, c in items:
                    if (w, n) in index:
                        entries[(index[(w, n)], j)] = c
        M = SparseMatrix(len(dst), len(src), entries, self.A.field)
        self._mats[key] = M
        return M

    def homology(self, p, q):
        key = (p, q)
        if key in self._hom:
            return self._hom[key]
        est = self.estimate_cell(p, q) + self.estimate_cell(p + 1, q)
        if est > self.cell_limit:
            raise CellBlowupError(
                f"cell ({p},{q}) estimated at {est} columns exceeds the "
                f"limit {self.cell_limit}", est)
        d_out = self.matrix(p, q)
        if p == 0:
            d_in = SparseMatrix(len(self.cell_basis(0, q)), 0, {},
                                self.A.field)
        else:
            d_in = self.matrix(p - 1, q)
        hom = cohomology_cell(d_in, d_out)
        self._hom[key] = hom
        return hom

    def class_expresser(self, p, q):
        key = (p, q)
        if key in self._expr:
            return self._expr[key]
        hom = self.homology(p, q)
        cols = [list(r) for r in hom.representatives] \
            + [list(v) for v in hom.image_basis]
        entries = {}
        for j, col in enumerate(cols):
            for i, v in enumerate(col):
                if v:
                    entries[(i, j)] = v
        M = SparseMatrix(hom.ambient_dim, len(cols), entries, self.A.field)
        solver = LinearSystem(M)
        self._expr[key] = (solver, len(hom.representatives))
        return self._expr[key]

    def express_class(self, f: Cochain):
        """Coordinates of a cocycle's class in the cell homology basis."""
        solver, n_reps = self.class_expresser(f.p, f.q)
        sol = solver.solve(self.cochain_vector(f))
        if sol is None:
            return None
        return tuple(sol[:n_reps])


def compute_hh_window(A: AlgebraPresentation, coeff: str,
                      window: DegreeWindow,
                      cell_limit=200000) -> BigradedVectorSpace:
    """Brute-force HH cells over the bar complex, one (p, q) at a time."""
    cx = BarComplex(A, coeff, window, cell_limit)
    cells = {}
    for (p, q) in window.cells():
        hom = cx.homology(p, q)
        reps = [cx.vector_cochain(p, q, v) for v in hom.representatives]
        cells[(p, q)] = CellData(hom.dim, [f"c[{p},{q}]#{i}"
                                           for i in range(hom.dim)],
                                 reps, window.is_edge(p, q))
    meta = {"coefficients": coeff, "entry_degree_cap": cx.tor_cap
            if cx.top is None and coeff == COEFF_SELF else None}
    return BigradedVectorSpace(cells, window, meta)


# -- chain cells ---------------------------------------------------------------


class ChainComplexCells:
    """Hochschild chain cells (word length k, internal degree t)."""

    def __init__(self, A: AlgebraPresentation):
        self.A = A
        self._words = {}
        self._cells = {}
        self._mats = {}
        self._hom = {}
        self._expr = {}

    def words(self, k, S):
        key = (k, S)
        if key in self._words:
            return self._words[key]
        if k == 0:
            out = [()] if S == 0 else []
        else:
            out = []
            for d in range(1, S - (k - 1) + 1):
                for m in self.A.monomial_basis(d):
                    for rest in self.words(k - 1, S - d):
                        out.append((m,) + rest)
        self._words[key] = out
        return out

    def cell_basis(self, k, t):
        key = (k, t)
        if key in self._cells:
            return self._cells[key]
        out = []
        for S in range(k, t + 1) if k else range(0, t + 1):
            for w in self.words(k, S):
                for a0 in self.A.monomial_basis(t - S):
                    out.append((a0, w))
        self._cells[key] = out
        return out

    def chain_vector(self, c: ChainElement, k, t):
        basis = self.cell_basis(k, t)
        index = {b: i for i, b in enumerate(basis)}
        vec = [0] * len(basis)
        for key, coeff in c.terms.items():
            vec[index[key]] = coeff
        return tuple(vec)

    def vector_chain(self, k, t, vec) -> ChainElement:
        basis = self.cell_basis(k, t)
        return ChainElement(self.A, {basis[i]: c for i, c in enumerate(vec)
                                     if c})

    def b_matrix(self, k, t) -> SparseMatrix:
        """The Hochschild boundary from (k, t) to (k-1, t)."""
        key = (k, t)
        if key in self._mats:
            return self._mats[key]
        src = self.cell_basis(k, t)
        dst = self.cell_basis(k - 1, t)
        index = {b: i for i, b in enumerate(dst)}
        entries = {}
        for j, (a0, w) in enumerate(src):
            img = hochschild_b(ChainElement(self.A, {(a0, w): 1}))
            for kk, c in img.terms.items():
                entries[(index[kk], j)] = c
        M = SparseMatrix(len(dst), len(src), entries, self.A.field)
        self._mats[key] = M
        return M

    def homology(self, k, t):
        key = (k, t)
        if key in self._hom:
            return self._hom[key]
        d_out = self.b_matrix(k, t) if k >= 1 else SparseMatrix(
            0, len(self.cell_basis(0, t)), {}, self.A.field)
        d_in = self.b_matrix(k + 1, t)
        hom = cohomology_cell(d_in, d_out)
        self._hom[key] = hom
        return hom

    def express_class(self, c: ChainElement, k, t):
        key = (k, t)
        if key not in self._expr:
            hom = self.homology(k, t)
            cols = [list(r) for r in hom.representatives] \
                + [list(v) for v in hom.image_basis]
            entries = {}
            for j, col in enumerate(cols):
                for i, v in enumerate(col):
                    if v:
                        entries[(i, j)] = v
            M = SparseMatrix(hom.ambient_dim, len(cols), entries,
                             self.A.field)
            self._expr[key] = (LinearSystem(M), len(hom.representatives))
        solver, n_reps = self._expr[key]
        sol = solver.solve(self.chain_vector(c, k, t))
        if sol is None:
            return None
        return tuple(sol[:n_reps])

    def connes_matrix_on_homology(self, k, t):
        """H(B): homology at (k, t) -> homology at (k+1, t)."""
        hom_src = self.homology(k, t)
        hom_dst = self.homology(k + 1, t)
        cols = []
        for rep in hom_src.representatives:
            c = self.vector_chain(k, t, rep)
            img = connes_boundary(c)
            coords = self.express_class(img, k + 1, t)
            if coords is None:
                raise WindowError("Connes image of a cycle is not a cycle "
                                  "class in the window")
            cols.append(coords)
        entries = {}
        for j, col in enumerate(cols):
            for i, v in enumerate(col):
                if v:
                    entries[(i, j)] = v
        return SparseMatrix(hom_dst.dim, hom_src.dim, entries, self.A.field)


def compute_hochschild_homology_window(A: AlgebraPresentation,
                                       window: DegreeWindow
                                       ) -> BigradedVectorSpace:
    """Homology of (A (x) T(s abar), b), cells keyed (length, internal t);
    dual to the dual-coefficient cochain cells under (p, q) -> (p, -q)."""
    cx = ChainComplexCells(A)
    t_lo = max(0, -window.q_max)
    t_hi = max(0, -window.q_min)
    cells = {}
    for k in range(window.max_p + 1):
        for t in range(t_lo, t_hi + 1):
            hom = cx.homology(k, t)
            reps = [cx.vector_chain(k, t, v) for v in hom.representatives]
            cells[(k, t)] = CellData(
                hom.dim, [f"z[{k},{t}]#{i}" for i in range(hom.dim)], reps,
                window.is_edge(k, -t))
    return BigradedVectorSpace(cells, window, {"side": "chains"})
