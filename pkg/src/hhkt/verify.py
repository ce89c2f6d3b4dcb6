"""The invariant suite behind the `verify` command.

Every check is deterministic given the seed; sampled checks draw from a
seeded generator, exhaustive checks sweep window bases.  Checks report
pass/fail with a short counterexample witness on failure and never raise,
so one bad invariant cannot hide the others.
"""

from __future__ import annotations

import itertools
import math
import random

from .algebra import (AlgebraPresentation, GradedGenerator, Polynomial,
                      TensorPoly, partial_derivative,
                      validate_regular_sequence, zeta_coefficients)
from .bar import (COEFF_SELF, BarComplex, BarWord, ChainComplexCells,
                  ChainElement, bar_differential, cochain_cup,
                  compute_hh_window, connes_boundary, hochschild_b)
from .bigraded import DegreeWindow
from .bv import BVContext, iota, iota_inverse
from .fields import PrimeField, SparseMatrix, rank_kernel_image
from .koszul_tate import (DualRingElement, KTElement, XiLift,
                          build_resolution, cup_via_diagonal,
                          diagonal_element, diagonal_mono, emonos_at_level,
                          exactness_check, hh_via_kt, kt_cell_basis,
                          lucas_binomial, EMono)


def _corpus():
    def make(p, gens, rels=()):
        return AlgebraPresentation(
            PrimeField(p),
            [GradedGenerator(n, d, k) for (n, d, k) in gens], rels)

    return {
        "ext2_deg5": make(2, [("y1", 5, "exterior"), ("y2", 5, "exterior")]),
        "ext2_deg3": make(2, [("y1", 3, "exterior"), ("y2", 3, "exterior")]),
        "ext1_deg3_p3": make(3, [("y1", 3, "exterior")]),
        "poly1_deg2": make(2, [("x1", 2, "polynomial")]),
        "trunc_x2_p2": make(2, [("x1", 4, "polynomial")], ["x1^2"]),
        "trunc_x2_p3": make(3, [("x1", 2, "polynomial")], ["x1^2"]),
    }


def _words(A, max_len, cap):
    abar = []
    for d in range(1, cap + 1):
        abar.extend(A.monomial_basis(d))
    out = []
    for k in range(1, max_len + 1):
        for w in itertools.product(abar, repeat=k):
            if sum(A.mono_degree(m) for m in w) <= cap:
                out.append(w)
    return out


def check_bar_d_squared(corpus, rng):
    for name, A in corpus.items():
        for w in _words(A, 3, 12):
            img = {}
            for bw, c in bar_differential(
                    BarWord(A.unit_monomial(), w, A.unit_monomial()), A):
                for bw2, c2 in bar_differential(bw, A):
                    img[bw2] = (img.get(bw2, 0) + c * c2) % A.field.p
            if any(img.values()):
                return "fail", f"{name}: d^2 != 0 on {w}"
    return "pass", None


def check_chain_operators(corpus, rng):
    for name, A in corpus.items():
        coeffs = [A.unit_monomial()]
        for d in range(1, 6):
            coeffs.extend(A.monomial_basis(d))
        for w in _words(A, 3, 10):
            for a0 in coeffs:
                c = ChainElement(A, {(a0, w): 1})
                if not hochschild_b(hochschild_b(c)).is_zero():
                    return "fail", f"{name}: b^2 != 0 on {a0},{w}"
                lhs = hochschild_b(connes_boundary(c)) \
                    + connes_boundary(hochschild_b(c))
                if not lhs.is_zero():
                    return "fail", f"{name}: bB + Bb != 0 on {a0},{w}"
    return "pass", None


def check_kt_d_squared(corpus, rng):
    for name, A in corpus.items():
        R = build_resolution(A)
        for level in range(1, 5):
            for t in range(0, 15):
                for m in kt_cell_basis(R, level, t):
                    if not KTElement(R, {m: 1}).d().d().is_zero():
                        return "fail", f"{name}: d^2 != 0 on {m}"
    return "pass", None


def check_kt_exactness(corpus, rng):
    for name, A in corpus.items():
        R = build_resolution(A)
        report = exactness_check(R, max_level=3, internal_bound=12)
        if not report.ok:
            return "fail", f"{name}: {report.failures[:3]}"
    return "pass", None


def check_diagonal_chain_map(corpus, rng):
    for name, A in corpus.items():
        R = build_resolution(A)
        seen = 0
        pool = []
        for level in range(1, 4):
            for t in range(0, 15):
                pool.extend(kt_cell_basis(R, level, t))
        sample = pool if len(pool) <= 200 else rng.sample(pool, 200)
        for m in sample:
            lhs = diagonal_mono(R, m).boundary()
            rhs = diagonal_element(R, KTElement(R, {m: 1}).d())
            if lhs != rhs:
                return "fail", f"{name}: diagonal chain map fails on {m}"
            seen += 1
    return "pass", None


def check_dual_basis_rules(corpus, rng):
    A = corpus["ext2_deg5"]
    R = build_resolution(A)
    one = A.unit_monomial()
    nu1 = DualRingElement.basis_element(R, EMono((1, 0), 0, ()), one)
    sq = cup_via_diagonal(nu1, nu1, emonos_at_level(R, 2))
    if set(sq.values) != {EMono((2, 0), 0, ())}:
        return "fail", "nu* . nu* is not the dual divided square"
    P = corpus["poly1_deg2"]
    Rp = build_resolution(P)
    u = DualRingElement.basis_element(Rp, EMono((), 1, ()),
                                      P.unit_monomial())
    if not cup_via_diagonal(u, u, emonos_at_level(Rp, 2)).is_zero():
        return "fail", "u* . u* != 0 without relations"
    return "pass", None


def check_cup_strictly_associative(corpus, rng):
    A = corpus["ext2_deg5"]
    window = DegreeWindow(3, -22, 2)
    cx = BarComplex(A, COEFF_SELF, window)
    reps = []
    for (p, q) in [(1, -5), (1, 0)]:
        hom = cx.homology(p, q)
        reps.extend(cx.vector_cochain(p, q, v)
                    for v in hom.representatives)
    for f, g, h in itertools.product(reps, repeat=3):
        p = f.p + g.p + h.p
        q = f.q + g.q + h.q
        if p > 3:
            continue
        words = list(dict.fromkeys(w for (w, _) in cx.cell_basis(p, q)))
        mid_fg = list(dict.fromkeys(
            w for (w, _) in cx.cell_basis(f.p + g.p, f.q + g.q)))
        mid_gh = list(dict.fromkeys(
            w for (w, _) in cx.cell_basis(g.p + h.p, g.q + h.q)))
        lhs = cochain_cup(cochain_cup(f, g, mid_fg), h, words)
        rhs = cochain_cup(f, cochain_cup(g, h, mid_gh), words)
        if lhs.values != rhs.values:
            return "fail", "cup is not strictly associative"
    return "pass", None


def check_cup_commutative_mod_coboundary(corpus, rng):
    from .fields import LinearSystem
    A = corpus["ext2_deg5"]
    window = DegreeWindow(4, -22, 2)
    cx = BarComplex(A, COEFF_SELF, window)
    cells = [(1, -5), (1, 0), (2, -10)]
    reps = {}
    for (p, q) in cells:
        hom = cx.homology(p, q)
        reps[(p, q)] = [cx.vector_cochain(p, q, v)
                        for v in hom.representatives]
    pool = [(pq1, pq2) for pq1 in cells for pq2 in cells
            if pq1[0] + pq2[0] <= window.max_p]
    count = 0
    while count < 100:
        (p1, q1), (p2, q2) = pool[rng.randrange(len(pool))]
        f = reps[(p1, q1)][rng.randrange(len(reps[(p1, q1)]))]
        g = reps[(p2, q2)][rng.randrange(len(reps[(p2, q2)]))]
        words = list(dict.fromkeys(
            w for (w, _) in cx.cell_basis(p1 + p2, q1 + q2)))
        fg = cochain_cup(f, g, words)
        gf = cochain_cup(g, f, words)
        sgn = -1 if ((p1 + q1) * (p2 + q2)) % 2 else 1
        diff = fg - gf.scale(sgn)
        count += 1
        if diff.is_zero():
            continue
        sol = LinearSystem(cx.matrix(p1 + p2 - 1, q1 + q2)).solve(
            cx.cochain_vector(diff))
        if sol is None:
            return "fail", f"not commutative mod coboundary at " \
                f"({p1},{q1})x({p2},{q2})"
    return "pass", None


def check_zeta_conditions(corpus, rng, inject_fault=False):
    field_choices = [2, 3, 5]
    produced = 0
    attempts = 0
    while produced < 20 and attempts < 400:
        attempts += 1
        p = field_choices[rng.randrange(3)]
        n = 1 + rng.randrange(3)
        degs = [2 * (1 + rng.randrange(2)) for _ in range(n)]
        A = AlgebraPresentation(
            PrimeField(p),
            [GradedGenerator(f"x{i+1}", d, "polynomial")
             for i, d in enumerate(degs)])
        deg = 2 * (2 + rng.randrange(3))
        basis = [m for m in A.monomial_basis(deg) if sum(m.exps) >= 2]
        if not basis:
            continue
        rho = Polynomial(A, {m: rng.randrange(p) for m in basis})
        if rho.is_zero():
            continue
        try:
            zetas = zeta_coefficients(rho)
        except Exception as err:
            return "fail", f"zeta construction failed on {A.label_poly(rho)}"
        if inject_fault and produced == 7:
            # corrupt one coefficient and verify the conditions now fail
            which = next((j for j, z in enumerate(zetas) if z.terms), None)
            if which is not None:
                z = zetas[which]
                key = next(iter(z.terms))
                bad = TensorPoly(A, {**z.terms, key: z.terms[key] + 1})
                name = A.generators[A.poly_index[which]].name
                cond = (bad.apply_multiplication()
                        - partial_derivative(rho, name))
                if cond.is_zero():
                    # the corruption must break at least the telescoping
                    xj = A.generator_poly(name)
                    step = (TensorPoly.from_sides(xj, A.one())
                            - TensorPoly.from_sides(A.one(), xj))
                    delta = (bad - z) * step
                    if delta.is_zero():
                        return "fail", "fault injection had no effect"
                return "fail", (f"injected zeta fault detected on "
                                f"{A.label_poly(rho)} (expected)")
        produced += 1
    if produced < 20:
        return "fail", f"only {produced} random relations generated"
    return "pass", None


def check_xi_chain_map(corpus, rng):
    for name in ("ext2_deg5", "ext1_deg3_p3"):
        A = corpus[name]
        R = build_resolution(A)
        xi = XiLift(R, depth=4)
        cap = 4 * max(g.degree for g in A.generators)
        for w in _words(A, 4, cap):
            if not (xi.value(w).d() - xi._rhs(w)).is_zero():
                return "fail", f"{name}: chain map fails on {w}"
    return "pass", None


def check_oracle_vs_resolution(corpus, rng):
    windows = {
        "ext2_deg5": DegreeWindow(3, -16, 10),
        "ext2_deg3": DegreeWindow(3, -10, 6),
        "ext1_deg3_p3": DegreeWindow(4, -13, 4),
        "poly1_deg2": DegreeWindow(3, -8, 8),
        "trunc_x2_p2": DegreeWindow(4, -18, 6),
        "trunc_x2_p3": DegreeWindow(4, -10, 3),
    }
    for name, A in corpus.items():
        window = windows[name]
        bar = compute_hh_window(A, COEFF_SELF, window)
        ring = hh_via_kt(A, window)
        kt = {pq: len(lbls) for pq, lbls in ring.cells.items() if lbls}
        if bar.dims_table() != kt:
            diff = {pq: (bar.dims_table().get(pq), kt.get(pq))
                    for pq in set(bar.dims_table()) | set(kt)
                    if bar.dims_table().get(pq) != kt.get(pq)}
            return "fail", f"{name}: {diff}"
    return "pass", None


def check_bv_operator(corpus, rng):
    for name, window in [("ext2_deg5", DegreeWindow(3, -22, 12)),
                         ("ext2_deg3", DegreeWindow(3, -14, 8))]:
        A = corpus[name]
        ctx = BVContext(A, window)
        ring = ctx.ring
        for (p, q), labels in ring.cells.items():
            if p < 2:
                continue
            for lbl in labels:
                if ctx.delta_of_combination(ctx.delta_of_label(lbl)):
                    return "fail", f"{name}: Delta^2 != 0 on " \
                        f"{ring.label_str(lbl)}"
        gens = []
        for g in ring.generators:
            lbl = ring.label_from_exponents({g.label: 1})
            gens.append((lbl, ring.total_degree(lbl)))
        for (la, da), (lb, db), (lc, dc) in \
                itertools.combinations_with_replacement(gens, 3):
            p = sum(ring.bidegree(x)[0] for x in (la, lb, lc))
            q = sum(ring.bidegree(x)[1] for x in (la, lb, lc))
            if not window.contains(p, q):
                continue
            holds, residual = ctx.check_bv_identity(
                {la: 1}, {lb: 1}, {lc: 1}, da, db)
            if not holds:
                return "fail", f"{name}: seven-term fails on " \
                    f"{[ring.label_str(x) for x in (la, lb, lc)]}"
    return "pass", None


def check_iota(corpus, rng):
    A = corpus["ext2_deg5"]
    cx = ChainComplexCells(A)
    for (k, t) in [(1, 10), (2, 15)]:
        basis = cx.cell_basis(k, t)
        for key in basis:
            f = {key: 1}
            g = iota(f, A, k, t)
            if iota_inverse(g) != f:
                return "fail", f"iota round trip fails at {(k, t)}"
    return "pass", None


def check_linear_algebra(corpus, rng):
    for _ in range(40):
        p = [2, 3, 5][rng.randrange(3)]
        field = PrimeField(p)
        rows, cols = rng.randrange(1, 7), rng.randrange(1, 7)
        entries = {}
        for r in range(rows):
            for c in range(cols):
                if rng.random() < 0.4:
                    entries[(r, c)] = rng.randrange(1, p)
        M = SparseMatrix(rows, cols, entries, field)
        rank, kernel, image = rank_kernel_image(M)
        rank_t, _, _ = rank_kernel_image(M.transpose())
        if rank != rank_t:
            return "fail", f"rank != rank of transpose ({rows}x{cols}, p={p})"
        for v in kernel:
            if any(M.mul_vec(v)):
                return "fail", "kernel vector not annihilated"
    return "pass", None


def check_lucas(corpus, rng):
    for p in (2, 3, 5, 7):
        for n in range(16):
            for k in range(n + 1):
                if lucas_binomial(n, k, p) != math.comb(n, k) % p:
                    return "fail", f"binomial mismatch at ({n},{k}) mod {p}"
    return "pass", None


def check_hilbert_vs_basis(corpus, rng):
    for name, A in corpus.items():
        if not A.relations:
            continue
        report = validate_regular_sequence(
            A, max(r.degree() for r in A.relations) * 2 + 2)
        if not report.ok:
            return "fail", f"{name}: {report.detail}"
    return "pass", None


CHECKS = [
    ("bar_differential_squares_to_zero", check_bar_d_squared),
    ("chain_boundary_and_cyclic_operator", check_chain_operators),
    ("resolution_differential_squares_to_zero", check_kt_d_squared),
    ("resolution_is_exact_in_window", check_kt_exactness),
    ("diagonal_is_a_chain_map", check_diagonal_chain_map),
    ("dual_basis_product_rules", check_dual_basis_rules),
    ("cup_strictly_associative", check_cup_strictly_associative),
    ("cup_commutative_modulo_coboundary",
     check_cup_commutative_mod_coboundary),
    ("zeta_conditions_on_random_relations", check_zeta_conditions),
    ("comparison_map_is_a_chain_map", check_xi_chain_map),
    ("oracle_agrees_with_resolution", check_oracle_vs_resolution),
    ("bv_square_zero_and_seven_term", check_bv_operator),
    ("chain_dual_isomorphism_round_trip", check_iota),
    ("exact_linear_algebra_properties", check_linear_algebra),
    ("binomials_reduce_by_lucas", check_lucas),
    ("hilbert_series_matches_bases", check_hilbert_vs_basis),
]


def run_suite(seed=0, inject_zeta_fault=False):
    import zlib
    corpus = _corpus()
    report = []
    for name, fn in CHECKS:
        rng = random.Random(seed ^ zlib.crc32(name.encode()))
        try:
            if fn is check_zeta_conditions:
                status, witness = fn(corpus, rng,
                                     inject_fault=inject_zeta_fault)
            else:
                status, witness = fn(corpus, rng)
        except Exception as err:  # a crashed check is a failed check
            status, witness = "fail", f"exception: {err}"
        entry = {"name": name, "status": status}
        if witness:
            entry["witness"] = witness
        report.append(entry)
    return report
