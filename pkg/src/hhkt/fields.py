"""Exact linear algebra over prime fields F_p.

Everything in this module is exact modular arithmetic: no floats anywhere.
Matrices are stored sparsely as ``{(row, col): value}`` with values in
``[1, p)``; a dense numpy path takes over below ``DENSE_CUTOFF`` columns,
where sparse bookkeeping costs more than it saves.  All reduced forms are
RREF, which is unique, so pivot-selection heuristics only affect speed,
never results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DENSE_CUTOFF = 64


class FieldError(ValueError):
    pass


class ComplexViolationError(RuntimeError):
    """Raised when d_out . d_in != 0.

    Carries the index of the offending source basis vector and its nonzero
    composite image as a witness.
    """

    def __init__(self, message, source_index, witness):
        super().__init__(message)
        self.source_index = source_index
        self.witness = witness


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field F_p; elements are canonical int representatives in [0, p)."""

    p: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise FieldError(f"characteristic {self.p} is not prime")

    def normalize(self, a: int) -> int:
        return a % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 is not invertible in F_p")
        return pow(a, self.p - 2, self.p)


def field_inverse(a: int, field: PrimeField) -> int:
    """Multiplicative inverse of a nonzero element of F_p."""
    return field.inv(a)


class SparseMatrix:
    """An immutable rows x cols matrix over F_p, no stored zeros."""

    __slots__ = ("rows", "cols", "entries", "field")

    def __init__(self, rows, cols, entries, field):
        self.rows = rows
        self.cols = cols
        self.field = field
        clean = {}
        for (r, c), v in entries.items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValueError(f"entry ({r},{c}) outside {rows}x{cols}")
            v = field.normalize(v)
            if v:
                if (r, c) in clean:
                    raise ValueError(f"duplicate entry at ({r},{c})")
                clean[(r, c)] = v
        self.entries = clean

    @classmethod
    def from_columns(cls, rows, columns, field):
        entries = {}
        for c, col in enumerate(columns):
            for r, v in enumerate(col):
                if v % field.p:
                    entries[(r, c)] = v
        return cls(rows, len(columns), entries, field)

    @classmethod
    def from_dense(cls, array, field):
        array = np.asarray(array)
        rows, cols = array.shape
        entries = {}
        for r in range(rows):
            for c in range(cols):
                if array[r, c] % field.p:
                    entries[(r, c)] = int(array[r, c])
        return cls(rows, cols, entries, field)

    def to_dense(self):
        out = np.zeros((self.rows, self.cols), dtype=np.int64)
        for (r, c), v in self.entries.items():
            out[r, c] = v
        return out

    def transpose(self):
        return SparseMatrix(
            self.cols, self.rows,
            {(c, r): v for (r, c), v in self.entries.items()}, self.field)

    def column(self, j):
        col = [0] * self.rows
        for (r, c), v in self.entries.items():
            if c == j:
                col[r] = v
        return tuple(col)

    def mul_vec(self, vec):
        p = self.field.p
        out = [0] * self.rows
        for (r, c), v in self.entries.items():
            if vec[c]:
                out[r] = (out[r] + v * vec[c]) % p
        return tuple(out)

    def nnz(self):
        return len(self.entries)


def _rref_dense(M: SparseMatrix):
    """RREF via numpy int64; returns (pivot_cols, rref rows as dicts)."""
    p = M.field.p
    A = M.to_dense() % p
    nrows, ncols = A.shape
    pivots = []
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        nz = np.nonzero(A[row:, col])[0]
        if nz.size == 0:
            continue
        r = row + int(nz[0])
        if r != row:
            A[[row, r]] = A[[r, row]]
        inv = pow(int(A[row, col]), p - 2, p)
        A[row] = (A[row] * inv) % p
        for rr in range(nrows):
            if rr != row and A[rr, col]:
                A[rr] = (A[rr] - A[rr, col] * A[row]) % p
        pivots.append(col)
        row += 1
    rows = []
    for i in range(len(pivots)):
        rows.append({int(c): int(A[i, c]) for c in np.nonzero(A[i])[0]})
    return pivots, rows


def _rref_sparse(M: SparseMatrix):
    """RREF with Markowitz-style row choice (fewest fill-in candidates)."""
    p = M.field.p
    work = [dict() for _ in range(M.rows)]
    for (r, c), v in M.entries.items():
        work[r][c] = v
    active = [r for r in range(M.rows) if work[r]]
    done = []      # list of (pivot_col, row dict), in pivot order
    for col in range(M.cols):
        candidates = [r for r in active if work[r].get(col)]
        if not candidates:
            continue
        # cheapest row first: exact result is pivot-independent (RREF is
        # unique), this only limits fill-in
        r0 = min(candidates, key=lambda r: (len(work[r]), r))
        row = work[r0]
        active.remove(r0)
        inv = pow(row[col], p - 2, p)
        row = {c: (v * inv) % p for c, v in row.items()}
        for r in active:
            f = work[r].get(col)
            if f:
                tgt = work[r]
                for c, v in row.items():
                    nv = (tgt.get(c, 0) - f * v) % p
                    if nv:
                        tgt[c] = nv
                    elif c in tgt:
                        del tgt[c]
        active = [r for r in active if work[r]]
        # back-eliminate into earlier pivot rows for full RREF
        for _, prow in done:
            f = prow.get(col)
            if f:
                for c, v in row.items():
                    nv = (prow.get(c, 0) - f * v) % p
                    if nv:
                        prow[c] = nv
                    elif c in prow:
                        del prow[c]
        done.append((col, row))
    pivots = [c for c, _ in done]
    return pivots, [row for _, row in done]


def rref(M: SparseMatrix):
    if M.cols < DENSE_CUTOFF:
        return _rref_dense(M)
    return _rref_sparse(M)


def kernel_basis_from_rref(pivots, rows, ncols, field):
    """Canonical kernel basis (one vector per free column) from an RREF."""
    p = field.p
    pivot_set = set(pivots)
    col_to_row = {c: i for i, c in enumerate(pivots)}
    basis = []
    for j in range(ncols):
        if j in pivot_set:
            continue
        vec = [0] * ncols
        vec[j] = 1
        for c, i in col_to_row.items():
            v = rows[i].get(j, 0)
            if v:
                vec[c] = (-v) % p
        basis.append(tuple(vec))
    return basis


def rank_kernel_image(M: SparseMatrix):
    """Rank, canonical kernel basis, and the pivot columns of M.

    Kernel vectors v satisfy Mv = 0; the image basis is the set of original
    columns of M at the RREF pivot positions (a maximal independent set).
    """
    pivots, rows = rref(M)
    kernel = kernel_basis_from_rref(pivots, rows, M.cols, M.field)
    image = [M.column(c) for c in pivots]
    return len(pivots), kernel, image


class LinearSystem:
    """Repeated exact solves Mx = b against a fixed matrix.

    Eliminates on [M | I] once; solve() is then a single substitution pass.
    """

    def __init__(self, M: SparseMatrix):
        self.M = M
        self.field = M.field
        p = self.field.p
        aug_cols = M.cols + M.rows
        entries = dict(M.entries)
        for r in range(M.rows):
            entries[(r, M.cols + r)] = 1
        aug = SparseMatrix(M.rows, aug_cols, entries, M.field)
        # restrict pivot search to the M-columns
        self.pivots, self.rows = _restricted_rref(aug, M.cols, p)
        self.rank = len(self.pivots)

    def solve(self, b):
        """A particular solution of Mx = b (free vars 0), or None."""
        p = self.field.p
        ncols = self.M.cols
        x = [0] * ncols
        for i, c in enumerate(self.pivots):
            # value of (L b) at this pivot row, L = recorded row ops
            s = 0
            row = self.rows[i]
            for cc, v in row.items():
                if cc >= ncols and b[cc - ncols]:
                    s = (s + v * b[cc - ncols]) % p
            x[c] = s
        # verify (also detects inconsistency from zero rows)
        Mx = self.M.mul_vec(x)
        if any((Mx[r] - b[r]) % p for r in range(self.M.rows)):
            return None
        return tuple(x)

    def in_image(self, b):
        return self.solve(b) is not None


def _restricted_rref(aug: SparseMatrix, npivot_cols, p):
    """RREF of an augmented matrix, pivoting only in the first columns."""
    work = [dict() for _ in range(aug.rows)]
    for (r, c), v in aug.entries.items():
        work[r][c] = v
    active = list(range(aug.rows))
    done = []
    for col in range(npivot_cols):
        candidates = [r for r in active if work[r].get(col)]
        if not candidates:
            continue
        r0 = min(candidates, key=lambda r: (len(work[r]), r))
        active.remove(r0)
        row = work[r0]
        inv = pow(row[col], p - 2, p)
        row = {c: (v * inv) % p for c, v in row.items()}
        for r in active:
            f = work[r].get(col)
            if f:
                tgt = work[r]
                for c, v in row.items():
                    nv = (tgt.get(c, 0) - f * v) % p
                    if nv:
                        tgt[c] = nv
                    elif c in tgt:
                        del tgt[c]
        for _, prow in done:
            f = prow.get(col)
            if f:
                for c, v in row.items():
                    nv = (prow.get(c, 0) - f * v) % p
                    if nv:
                        prow[c] = nv
                    elif c in prow:
                        del prow[c]
        done.append((col, row))
    return [c for c, _ in done], [row for _, row in done]


class SubspaceReducer:
    """Incremental row space over F_p, for membership tests and quotients."""

    def __init__(self, dim, field):
        self.dim = dim
        self.field = field
        self.rows = {}  # pivot col -> normalized row dict

    def reduce(self, vec):
        """Remainder of vec after reduction against the current row space."""
        p = self.field.p
        v = {i: x % p for i, x in enumerate(vec) if x % p}
        while v:
            lead = min(v)
            row = self.rows.get(lead)
            if row is None:
                return v
            f = v[lead]
            for c, x in row.items():
                nv = (v.get(c, 0) - f * x) % p
                if nv:
                    v[c] = nv
                elif c in v:
                    del v[c]
        return v

    def add(self, vec):
        """Insert vec; returns True if it enlarged the space."""
        p = self.field.p
        rem = self.reduce(vec)
        if not rem:
            return False
        lead = min(rem)
        inv = pow(rem[lead], p - 2, p)
        self.rows[lead] = {c: (v * inv) % p for c, v in rem.items()}
        return True

    def contains(self, vec):
        return not self.reduce(vec)

    @property
    def rank(self):
        return len(self.rows)


@dataclass
class SubquotientBasis:
    """ker(d_out)/im(d_in) with explicit representative vectors."""

    ambient_dim: int
    kernel_basis: list
    image_basis: list
    representatives: list

    @property
    def dim(self):
        return len(self.representatives)


def cohomology_cell(d_in: SparseMatrix, d_out: SparseMatrix) -> SubquotientBasis:
    """Homology of the two-map cell  .-> C --d_out--> .  at C.

    d_in maps into the cell (its rows index the cell basis), d_out maps out
    of it (its columns index the cell basis).  The composite d_out . d_in
    must vanish; a violation raises ComplexViolationError with a witness.
    """
    if d_in.rows != d_out.cols:
        raise ValueError("d_in rows must match d_out cols")
    field = d_out.field
    n = d_out.cols
    p = field.p
    for j in range(d_in.cols):
        col = d_in.column(j)
        comp = d_out.mul_vec(col)
        if any(comp):
            raise ComplexViolationError(
                "composite differential is nonzero: d^2 != 0", j, comp)
    _, kernel, _ = rank_kernel_image(d_out)
    rank_in, _, image = rank_kernel_image(d_in)
    # image must sit inside the kernel: membership solve against kernel span
    kernel_span = SubspaceReducer(n, field)
    for v in kernel:
        kernel_span.add(v)
    for v in image:
        if not kernel_span.contains(v):
            raise ComplexViolationError(
                "image vector not contained in kernel", -1, v)
    span = SubspaceReducer(n, field)
    for v in image:
        span.add(v)
    reps = []
    for v in kernel:
        if span.add(v):
            reps.append(v)
    assert len(reps) == len(kernel) - rank_in
    return SubquotientBasis(n, kernel, image, reps)
