"""Poincare duality data and the BV operator on Hochschild cohomology.

The operator is computed as the composite: cup with the dual fundamental
class into dual coefficients, transport along the chain/cochain duality,
the dual of the cyclic rotation operator on Hochschild homology, and back.
Classes are carried on the resolution side (labels of the computed ring)
and translated to bar cochains through the comparison chain map, so the
final tables are expressed in the ring's monomial basis.

At the level of a graded algebra (zero differential) the dual of the
fundamental class is used directly as the duality class; this is the
modeling decision recorded in every result document.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import AlgebraPresentation, InternalConsistencyError, Monomial
from .bar import (COEFF_DUAL, COEFF_SELF, BarComplex, ChainComplexCells,
                  Cochain, cochain_cup, word_suspension)
from .bigraded import DegreeWindow
from .fields import LinearSystem, SparseMatrix, rank_kernel_image
from .koszul_tate import (DualRingElement, KTRing, XiLift,
                          build_resolution)


class NotPoincareDualityError(ValueError):
    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


@dataclass
class PoincareDualityData:
    algebra: AlgebraPresentation
    formal_dimension: int
    fundamental_class: Monomial
    fundamental_dual: dict  # {Monomial: 1}, an element of the dual

    def dual_cochain(self):
        return Cochain(self.algebra, COEFF_DUAL, 0, -self.formal_dimension,
                       {(): dict(self.fundamental_dual)})


@dataclass
class BVClass:
    """A cohomology class carried on the resolution side, with its bar-side
    cochain representative attached once a context has translated it."""

    label: tuple
    bidegree: tuple
    representative: DualRingElement
    bar_representative: Cochain | None = None


def build_pd(A: AlgebraPresentation) -> PoincareDualityData:
    """Verified Poincare duality data; the pairing <a,b> = coefficient of
    the top class in ab must be nondegenerate in every degree."""
    d = A.top_degree_bound()
    if d is None:
        raise NotPoincareDualityError(
            "algebra is not finite-dimensional: no fundamental class")
    top = A.monomial_basis(d)
    if len(top) != 1:
        raise NotPoincareDualityError(
            f"top degree {d} has dimension {len(top)} != 1", d)
    omega = top[0]
    field = A.field
    for k in range(0, d + 1):
        rows = A.monomial_basis(k)
        cols = A.monomial_basis(d - k)
        if len(rows) != len(cols):
            raise NotPoincareDualityError(
                f"pairing in degree {k} is {len(rows)}x{len(cols)}", k)
        entries = {}
        for i, a in enumerate(rows):
            for j, b in enumerate(cols):
                for m, c in A.mul_monomials(a, b):
                    if m == omega:
                        entries[(i, j)] = c
        M = SparseMatrix(len(rows), len(cols), entries, field)
        rank, _, _ = rank_kernel_image(M)
        if rank != len(rows):
            raise NotPoincareDualityError(
                f"degenerate duality pairing in degree {k}", k)
    return PoincareDualityData(A, d, omega, {omega: 1})


# -- the chain/cochain duality -------------------------------------------------


def iota(functional, A: AlgebraPresentation, k: int, t: int) -> Cochain:
    """Functional on chains -> dual-coefficient cochain,
    iota(f)(word)(a) = (-1)^{|a||word|} f(a[word])."""
    values = {}
    for (a0, word), c in functional.items():
        sgn = -1 if (A.mono_degree(a0) * word_suspension(A, word)) % 2 else 1
        v = values.setdefault(word, {})
        v[a0] = (v.get(a0, 0) + sgn * c) % A.field.p
    values = {w: {m: c for m, c in v.items() if c}
              for w, v in values.items()}
    return Cochain(A, COEFF_DUAL, k, -t, values)


def iota_inverse(g: Cochain) -> dict:
    """Dual-coefficient cochain -> functional on chains (same sign rule)."""
    A = g.A
    out = {}
    for word, v in g.values.items():
        for a0, c in v.items():
            sgn = -1 if (A.mono_degree(a0)
                         * word_suspension(A, word)) % 2 else 1
            out[(a0, word)] = (sgn * c) % A.field.p
    return {k: v for k, v in out.items() if v}


def pair_class(g: Cochain, chain_terms, A) -> int:
    """<iota^{-1}(g), c> evaluated term by term."""
    total = 0
    for (a0, word), c in chain_terms.items():
        v = g.values.get(word)
        if not v:
            continue
        sgn = -1 if (A.mono_degree(a0) * word_suspension(A, word)) % 2 else 1
        total += sgn * c * v.get(a0, 0)
    return total % A.field.p


# -- the operator ----------------------------------------------------------------


class BVContext:
    """Caches every cell-level matrix needed for the operator on one
    presentation, within one window."""

    def __init__(self, A: AlgebraPresentation, window: DegreeWindow,
                 depth: int = 4, ring: KTRing | None = None):
        self.A = A
        self.window = window
        self.pd = build_pd(A)
        self.d = self.pd.formal_dimension
        self.R = ring.R if ring is not None else build_resolution(A)
        self.ring = ring if ring is not None else KTRing(self.R, window)
        self.depth = max(depth, window.max_p)
        self.xi = XiLift(self.R, self.depth)
        self.bar_self = BarComplex(A, COEFF_SELF, window)
        self.bar_dual = BarComplex(A, COEFF_DUAL, window)
        self.chains = ChainComplexCells(A)
        self._translate = {}
        self._theta = {}
        self._pairing = {}
        self._delta = {}

    # -- translations ------------------------------------------------------

    def kt_to_bar_cochain(self, dual: DualRingElement, p, q) -> Cochain:
        """Pull a resolution-side class back along the comparison map."""
        values = {}
        for (word, _n) in self.bar_self.cell_basis(p, q):
            if word in values:
                continue
            val = dual.eval_element(self.xi.value(word))
            if not val.is_zero():
                values[word] = val
        return Cochain(self.A, COEFF_SELF, p, q, values)

    def translate_matrix(self, p, q):
        """Columns: bar homology coordinates of each ring basis class."""
        key = (p, q)
        if key in self._translate:
            return self._translate[key]
        labels = self.ring.cells.get((p, q), [])
        hom = self.bar_self.homology(p, q)
        if len(labels) != hom.dim:
            raise InternalConsistencyError(
                f"cell ({p},{q}): ring dim {len(labels)} != bar dim "
                f"{hom.dim}")
        cols = []
        for lbl in labels:
            f = self.kt_to_bar_cochain(self.ring.class_reps[lbl], p, q)
            coords = self.bar_self.express_class(f)
            if coords is None:
                raise InternalConsistencyError(
                    "comparison image is not a cocycle class")
            cols.append(coords)
        M = SparseMatrix.from_columns(hom.dim, cols, self.A.field)
        rank, _, _ = rank_kernel_image(M)
        if rank != len(labels):
            raise InternalConsistencyError(
                f"cell ({p},{q}): comparison map is not injective")
        out = (labels, M, LinearSystem(M))
        self._translate[key] = out
        return out

    # -- theta = cup with the dual fundamental class -------------------------

    def theta_cochain(self, f: Cochain) -> Cochain:
        words = list(dict.fromkeys(
            w for (w, _) in self.bar_dual.cell_basis(f.p, f.q - self.d)))
        return cochain_cup(f, self.pd.dual_cochain(), words)

    def theta_matrix(self, p, q):
        """Bar homology basis at (p,q) -> dual-class coordinates at
        (p, q-d); verified bijective."""
        key = (p, q)
        if key in self._theta:
            return self._theta[key]
        hom = self.bar_self.homology(p, q)
        hom_dual = self.bar_dual.homology(p, q - self.d)
        if hom.dim != hom_dual.dim:
            raise InternalConsistencyError(
                f"duality cell mismatch at ({p},{q})")
        cols = []
        for rep in hom.representatives:
            f = self.bar_self.vector_cochain(p, q, rep)
            coords = self.bar_dual.express_class(self.theta_cochain(f))
            if coords is None:
                raise InternalConsistencyError("theta image not a class")
            cols.append(coords)
        M = SparseMatrix.from_columns(hom_dual.dim, cols, self.A.field)
        rank, _, _ = rank_kernel_image(M)
        if rank != hom.dim:
            raise InternalConsistencyError(
                f"theta is not bijective on cell ({p},{q})")
        out = (M, LinearSystem(M))
        self._theta[key] = out
        return out

    # -- pairing with chain homology ------------------------------------------

    def pairing_matrix(self, p, q_dual):
        """P[k][i] = <dual class k at (p, q_dual), chain class i at
        (p, -q_dual)>; square and invertible."""
        key = (p, q_dual)
        if key in self._pairing:
            return self._pairing[key]
        t = -q_dual
        hom_dual = self.bar_dual.homology(p, q_dual)
        hom_chain = self.chains.homology(p, t)
        if hom_dual.dim != hom_chain.dim:
            raise InternalConsistencyError(
                f"pairing cell mismatch at ({p},{q_dual})")
        entries = {}
        for k, grep in enumerate(hom_dual.representatives):
            g = self.bar_dual.vector_cochain(p, q_dual, grep)
            for i, crep in enumerate(hom_chain.representatives):
                c = self.chains.vector_chain(p, t, crep)
                v = pair_class(g, c.terms, self.A)
                if v:
                    entries[(k, i)] = v
        M = SparseMatrix(hom_dual.dim, hom_chain.dim, entries, self.A.field)
        rank, _, _ = rank_kernel_image(M)
        if rank != hom_dual.dim:
            raise InternalConsistencyError(
                f"degenerate class pairing at ({p},{q_dual})")
        self._pairing[key] = M
        return M

    # -- the operator on one cell ----------------------------------------------

    def delta_matrix(self, p, q):
        """Matrix of the operator from ring cell (p, q) to (p-1, q):
        {source label: {target label: coeff}}."""
        key = (p, q)
        if key in self._delta:
            return self._delta[key]
        labels = self.ring.cells.get((p, q), [])
        out = {lbl: {} for lbl in labels}
        if p == 0 or not labels:
            self._delta[key] = out
            return out
        field = self.A.field
        qd = q - self.d
        t = -qd
        src_labels, T, _ = self.translate_matrix(p, q)
        theta_M, _ = self.theta_matrix(p, q)
        P_here = self.pairing_matrix(p, qd)
        P_prev = self.pairing_matrix(p - 1, qd)
        Bmat = self.chains.connes_matrix_on_homology(p - 1, t)
        tgt_labels, T_prev, _ = self.translate_matrix(p - 1, q)
        theta_prev, _ = self.theta_matrix(p - 1, q)
        # composite (theta_prev . T_prev): KT coords -> dual-class coords
        comp_cols = []
        for j, lbl in enumerate(tgt_labels):
            e = [0] * len(tgt_labels)
            e[j] = 1
            comp_cols.append(theta_prev.mul_vec(T_prev.mul_vec(tuple(e))))
        comp = SparseMatrix.from_columns(
            P_prev.rows, comp_cols, field) if tgt_labels else \
            SparseMatrix(P_prev.rows, 0, {}, field)
        comp_solver = LinearSystem(comp)
        pair_solver = LinearSystem(P_prev.transpose())
        sign_g = -1 if (p + qd) % 2 else 1
        for j, lbl in enumerate(src_labels):
            e = [0] * len(src_labels)
            e[j] = 1
            g = theta_M.mul_vec(T.mul_vec(tuple(e)))
            # rhs_i = (-1)^{|g|} <g, B c_i> over the (p-1, t) chain basis
            gP = P_here.transpose().mul_vec(g)
            rhs = Bmat.transpose().mul_vec(gP)
            rhs = tuple((sign_g * v) % field.p for v in rhs)
            # g' with <g', c_i> = rhs_i, then pull back through theta and
            # the comparison map in one solve
            gprime = pair_solver.solve(rhs) if P_prev.rows else tuple()
            if gprime is None:
                raise InternalConsistencyError("pairing solve failed")
            coords = comp_solver.solve(tuple(gprime))
            if coords is None:
                raise InternalConsistencyError(
                    "operator image missed the ring cell")
            out[lbl] = {tgt_labels[i]: v for i, v in enumerate(coords) if v}
        self._delta[key] = out
        return out

    def delta_of_label(self, lbl):
        p, q = self.ring.bidegree(lbl)
        if p == 0:
            return {}
        return self.delta_matrix(p, q)[lbl]

    def delta_of_combination(self, combo: dict) -> dict:
        field = self.A.field
        out = {}
        for lbl, c in combo.items():
            for tgt, v in self.delta_of_label(lbl).items():
                out[tgt] = (out.get(tgt, 0) + c * v) % field.p
        return {k: v for k, v in out.items() if v}

    # -- the seven-term identity ------------------------------------------------

    def product(self, x: dict, y: dict) -> dict:
        field = self.A.field
        out = {}
        for la, ca in x.items():
            for lb, cb in y.items():
                for lc, cc in self.ring.product(la, lb).items():
                    out[lc] = (out.get(lc, 0) + ca * cb * cc) % field.p
        return {k: v for k, v in out.items() if v}

    def check_bv_identity(self, a: dict, b: dict, c: dict,
                          deg_a: int, deg_b: int):
        """Seven-term relation; returns (holds, residual)."""
        field = self.A.field

        def sgn(e):
            return -1 if e % 2 else 1

        def add(acc, term, k):
            for lbl, v in term.items():
                acc[lbl] = (acc.get(lbl, 0) + k * v) % field.p

        abc = self.product(self.product(a, b), c)
        lhs = self.delta_of_combination(abc)
        acc = {}
        add(acc, self.product(self.delta_of_combination(self.product(a, b)),
                              c), 1)
        add(acc, self.product(a, self.delta_of_combination(
            self.product(b, c))), sgn(deg_a))
        add(acc, self.product(b, self.delta_of_combination(
            self.product(a, c))), sgn((deg_a - 1) * deg_b))
        add(acc, self.product(self.product(
            self.delta_of_combination(a), b), c), -1)
        add(acc, self.product(self.product(
            a, self.delta_of_combination(b)), c), -sgn(deg_a))
        add(acc, self.product(self.product(a, b),
                              self.delta_of_combination(c)),
            -sgn(deg_a + deg_b))
        residual = dict(lhs)
        for lbl, v in acc.items():
            residual[lbl] = (residual.get(lbl, 0) - v) % field.p
        residual = {k: v for k, v in residual.items() if v}
        return (not residual), residual


def bv_class(context: BVContext, label) -> BVClass:
    p, q = context.ring.bidegree(label)
    dual = context.ring.class_reps[label]
    return BVClass(label, (p, q), dual,
                   context.kt_to_bar_cochain(dual, p, q))


def cap_theta(context: BVContext, cls, p=None, q=None) -> Cochain:
    """The duality map on one class: cup its bar image with the dual
    fundamental class."""
    if isinstance(cls, BVClass):
        dual, (p, q) = cls.representative, cls.bidegree
    else:
        dual = cls
    f = context.kt_to_bar_cochain(dual, p, q)
    return context.theta_cochain(f)


def bv_delta(context: BVContext, cls) -> dict:
    """The operator applied to one ring basis class (by label or BVClass)."""
    label = cls.label if isinstance(cls, BVClass) else cls
    return context.delta_of_label(label)
