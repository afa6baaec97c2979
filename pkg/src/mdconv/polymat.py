"""Matrices over F_p[z_1,...,z_m].

Rank over the fraction field (fraction-free Gaussian elimination), minors by
memoized Laplace expansion, minor-primeness, and the one-variable toolbox:
Hermite and Smith normal forms with transformation tracking, column/row
reduction, and unimodularity tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .poly import (
    Polynomial,
    Ring,
    parse_poly,
    poly_divexact,
    poly_gcd,
    render_poly,
)


class MatrixError(ValueError):
    pass


class PolyMatrix:
    """Rectangular matrix of Polynomial entries sharing one ring context.

    Zero row/column counts are allowed (empty parity checks, empty kernels);
    pass ``shape`` to pin the dimensions then. Treated as immutable.
    """

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring: Ring, entries, shape=None):
        entries = tuple(tuple(row) for row in entries)
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        if shape is not None:
            if rows * cols and (rows, cols) != tuple(shape):
                raise MatrixError(f"shape {shape} does not match entries {rows}x{cols}")
            rows, cols = shape
            if cols == 0:
                entries = tuple(() for _ in range(rows))
            elif rows == 0:
                entries = ()
        for row in entries:
            if len(row) != cols:
                raise MatrixError("ragged rows")
            for e in row:
                if not isinstance(e, Polynomial):
                    raise MatrixError(f"entry {e!r} is not a Polynomial")
                if e.ring != ring:
                    raise MatrixError("entry ring mismatch")
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self.entries = entries

    # construction -----------------------------------------------------

    @classmethod
    def build(cls, ring: Ring, rows: int, cols: int, fn) -> "PolyMatrix":
        return cls(ring, [[fn(i, j) for j in range(cols)] for i in range(rows)],
                   shape=(rows, cols))

    @classmethod
    def zero(cls, ring: Ring, rows: int, cols: int) -> "PolyMatrix":
        z = Polynomial.zero(ring)
        return cls(ring, [[z] * cols for _ in range(rows)], shape=(rows, cols))

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "PolyMatrix":
        one = Polynomial.one(ring)
        z = Polynomial.zero(ring)
        return cls(ring, [[one if i == j else z for j in range(n)] for i in range(n)],
                   shape=(n, n))

    @classmethod
    def from_ints(cls, ring: Ring, table, shape=None) -> "PolyMatrix":
        return cls(ring, [[Polynomial.constant(ring, c) for c in row] for row in table],
                   shape=shape)

    @classmethod
    def parse(cls, ring: Ring, rows) -> "PolyMatrix":
        """Rows of polynomial strings under the CLI grammar."""
        return cls(ring, [[parse_poly(s, ring) for s in row] for row in rows])

    # views --------------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def col(self, j: int) -> tuple:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self) -> list:
        return [self.col(j) for j in range(self.cols)]

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.ring,
                          [[self.entries[i][j] for i in range(self.rows)]
                           for j in range(self.cols)],
                          shape=(self.cols, self.rows))

    def submatrix(self, row_idx, col_idx) -> "PolyMatrix":
        row_idx = list(row_idx)
        col_idx = list(col_idx)
        return PolyMatrix(self.ring,
                          [[self.entries[i][j] for j in col_idx] for i in row_idx],
                          shape=(len(row_idx), len(col_idx)))

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def max_deg_vec(self) -> tuple:
        """Componentwise max of entry degree vectors."""
        out = [0] * self.ring.nvars
        for row in self.entries:
            for e in row:
                for i, d in enumerate(e.deg_vec()):
                    out[i] = max(out[i], d)
        return tuple(out)

    # arithmetic ---------------------------------------------------------

    def _check(self, other: "PolyMatrix"):
        if self.ring != other.ring:
            raise MatrixError("ring mismatch")

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise MatrixError("shape mismatch")
        return PolyMatrix(self.ring, [[a + b for a, b in zip(r1, r2)]
                                      for r1, r2 in zip(self.entries, other.entries)],
                          shape=(self.rows, self.cols))

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise MatrixError("shape mismatch")
        return PolyMatrix(self.ring, [[a - b for a, b in zip(r1, r2)]
                                      for r1, r2 in zip(self.entries, other.entries)],
                          shape=(self.rows, self.cols))

    def __neg__(self) -> "PolyMatrix":
        return PolyMatrix(self.ring, [[-e for e in row] for row in self.entries],
                          shape=(self.rows, self.cols))

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check(other)
        if self.cols != other.rows:
            raise MatrixError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        z = Polynomial.zero(self.ring)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = z
                for t in range(self.cols):
                    a = self.entries[i][t]
                    b = other.entries[t][j]
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(self.ring, out, shape=(self.rows, other.cols))

    def mul_vec(self, vec) -> tuple:
        """Matrix times a tuple of Polynomials."""
        if len(vec) != self.cols:
            raise MatrixError("vector length mismatch")
        z = Polynomial.zero(self.ring)
        out = []
        for i in range(self.rows):
            acc = z
            for t in range(self.cols):
                a = self.entries[i][t]
                if a.terms and vec[t].terms:
                    acc = acc + a * vec[t]
            out.append(acc)
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (self.ring == other.ring and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.ring, self.rows, self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(", ".join(render_poly(e) for e in row) for row in self.entries)
        return f"<{self.rows}x{self.cols} [{body}]>"


def hstack(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    if a.rows != b.rows:
        raise MatrixError("row count mismatch")
    return PolyMatrix(a.ring, [list(a.entries[i]) + list(b.entries[i]) for i in range(a.rows)],
                      shape=(a.rows, a.cols + b.cols))


def vstack(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    if a.cols != b.cols:
        raise MatrixError("column count mismatch")
    return PolyMatrix(a.ring, [list(r) for r in a.entries] + [list(r) for r in b.entries],
                      shape=(a.rows + b.rows, a.cols))


def from_columns(ring: Ring, columns, nrows: int | None = None) -> PolyMatrix:
    """Matrix whose columns are the given Polynomial vectors."""
    columns = [tuple(c) for c in columns]
    if not columns:
        if nrows is None:
            raise MatrixError("empty column list needs nrows")
        return PolyMatrix(ring, [], shape=(nrows, 0))
    n = len(columns[0])
    return PolyMatrix(ring, [[col[i] for col in columns] for i in range(n)],
                      shape=(n, len(columns)))


# rank over the fraction field ----------------------------------------

def rank_ff(M: PolyMatrix) -> int:
    """Rank over F(z_1,...,z_m) by fraction-free (Bareiss) elimination."""
    if M.rows == 0 or M.cols == 0:
        return 0
    a = [list(row) for row in M.entries]
    rows, cols = M.rows, M.cols
    prev = None  # previous pivot; divisions by it are exact (Bareiss)
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        pivot = None
        for i in range(r, rows):
            if not a[i][c].is_zero():
                pivot = i
                break
        if pivot is None:
            continue
        if pivot != r:
            a[r], a[pivot] = a[pivot], a[r]
        piv = a[r][c]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                num = piv * a[i][j] - a[i][c] * a[r][j]
                a[i][j] = num if prev is None else poly_divexact(num, prev)
            a[i][c] = Polynomial.zero(M.ring)
        prev = piv
        r += 1
    return r


# minors ----------------------------------------------------------------

def _det_laplace(M: PolyMatrix, row_idx: tuple, col_idx: tuple, memo: dict) -> Polynomial:
    key = (row_idx, col_idx)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if not row_idx:
        out = Polynomial.one(M.ring)
    elif len(row_idx) == 1:
        out = M.entries[row_idx[0]][col_idx[0]]
    else:
        out = Polynomial.zero(M.ring)
        i = row_idx[0]
        rest = row_idx[1:]
        for t, j in enumerate(col_idx):
            e = M.entries[i][j]
            if e.is_zero():
                continue
            sub = _det_laplace(M, rest, col_idx[:t] + col_idx[t + 1:], memo)
            term = e * sub
            out = out + term if t % 2 == 0 else out - term
    memo[key] = out
    return out


def det(M: PolyMatrix) -> Polynomial:
    if M.rows != M.cols:
        raise MatrixError("determinant of a non-square matrix")
    if M.rows == 0:
        return Polynomial.one(M.ring)
    return _det_laplace(M, tuple(range(M.rows)), tuple(range(M.cols)), {})


def minors(M: PolyMatrix, k: int) -> list:
    """All k x k minors in row-major index order (row subsets outer, column
    subsets inner, both lexicographic)."""
    if k < 0 or k > min(M.rows, M.cols):
        raise MatrixError(f"minor size {k} out of range for {M.rows}x{M.cols}")
    if k == 0:
        return [Polynomial.one(M.ring)]
    memo: dict = {}
    out = []
    for rows in combinations(range(M.rows), k):
        for cols in combinations(range(M.cols), k):
            out.append(_det_laplace(M, rows, cols, memo))
    return out


def is_minor_prime(M: PolyMatrix) -> bool:
    """GCD of all full-size (cols x cols) minors is a nonzero constant.
    Requires full column rank."""
    if rank_ff(M) != M.cols:
        raise MatrixError("minor-primeness needs full column rank")
    if M.cols == 0:
        return True
    g = None
    for mn in minors(M, M.cols):
        if mn.is_zero():
            continue
        if mn.is_unit():
            return True
        g = mn if g is None else poly_gcd(g, mn)
        if g.is_unit():
            return True
    return g is not None and g.is_unit()


def is_left_prime(M: PolyMatrix) -> bool:
    """Full row rank and the GCD of all full-size (rows x rows) minors is a unit."""
    return is_minor_prime(M.transpose())


def is_unimodular(M: PolyMatrix) -> bool:
    """Square with constant nonzero determinant (any number of variables)."""
    if M.rows != M.cols:
        return False
    return det(M).is_unit()


# one-variable toolbox --------------------------------------------------

def _require_univar(M: PolyMatrix):
    if M.ring.nvars != 1:
        raise MatrixError("operation requires a one-variable ring")


def _deg1(f: Polynomial) -> int:
    return f.degree_in(0)


def _udivmod(f: Polynomial, g: Polynomial):
    """Univariate divmod in F_p[z]."""
    ring = f.ring
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    ginv = ring.field.inv(g.terms[(_deg1(g),)])
    q = Polynomial.zero(ring)
    r = f
    dg = _deg1(g)
    while not r.is_zero() and _deg1(r) >= dg:
        d = _deg1(r) - dg
        c = (r.terms[(_deg1(r),)] * ginv) % ring.p
        t = Polynomial.monomial(ring, (d,), c)
        q = q + t
        r = r - t * g
    return q, r


class _ColOps:
    """Column-operation workspace tracking the unimodular factor U."""

    def __init__(self, M: PolyMatrix):
        self.ring = M.ring
        self.a = [[M.entries[i][j] for j in range(M.cols)] for i in range(M.rows)]
        self.rows, self.cols = M.rows, M.cols
        ident = PolyMatrix.identity(M.ring, M.cols)
        self.u = [list(row) for row in ident.entries]

    def swap(self, j1, j2):
        if j1 == j2:
            return
        for row in self.a:
            row[j1], row[j2] = row[j2], row[j1]
        for row in self.u:
            row[j1], row[j2] = row[j2], row[j1]

    def scale(self, j, c: int):
        for row in self.a:
            row[j] = row[j].scale(c)
        for row in self.u:
            row[j] = row[j].scale(c)

    def addmul(self, jdst, jsrc, f: Polynomial):
        """col_jdst += f * col_jsrc."""
        if f.is_zero():
            return
        for row in self.a:
            row[jdst] = row[jdst] + f * row[jsrc]
        for row in self.u:
            row[jdst] = row[jdst] + f * row[jsrc]

    def matrices(self):
        return (PolyMatrix(self.ring, self.a, shape=(self.rows, self.cols)),
                PolyMatrix(self.ring, self.u, shape=(self.cols, self.cols)))


def hermite_form(M: PolyMatrix):
    """Column Hermite normal form over F_p[z].

    Returns (H, U) with H = M @ U, U unimodular, pivot rows strictly
    increasing across columns, pivots monic, the remaining entries in each
    pivot row reduced below the pivot degree, and zero columns collected at
    the end. The nonzero part of H is canonical for the column span.
    """
    _require_univar(M)
    if M.rows == 0 or M.cols == 0:
        return M, PolyMatrix.identity(M.ring, M.cols)
    w = _ColOps(M)
    pivot_col = 0
    for row in range(M.rows):
        if pivot_col >= M.cols:
            break
        active = [j for j in range(pivot_col, M.cols) if not w.a[row][j].is_zero()]
        if not active:
            continue
        # gcd sweep: reduce the active entries in this row against the
        # minimum-degree one until a single nonzero entry remains
        while len(active) > 1:
            jmin = min(active, key=lambda j: (_deg1(w.a[row][j]), j))
            for j in active:
                if j == jmin:
                    continue
                q, _ = _udivmod(w.a[row][j], w.a[row][jmin])
                w.addmul(j, jmin, -q)
            active = [j for j in active if not w.a[row][j].is_zero()]
        j = active[0]
        w.swap(pivot_col, j)
        lead = w.a[row][pivot_col]
        w.scale(pivot_col, M.ring.field.inv(lead.terms[(_deg1(lead),)]))
        for j2 in range(pivot_col):
            q, _ = _udivmod(w.a[row][j2], w.a[row][pivot_col])
            w.addmul(j2, pivot_col, -q)
        pivot_col += 1
    return w.matrices()


def hermite_canonical(M: PolyMatrix) -> PolyMatrix:
    """Hermite form with zero columns dropped: canonical for the column span."""
    h, _ = hermite_form(M)
    keep = [j for j in range(h.cols) if any(not h.entries[i][j].is_zero() for i in range(h.rows))]
    return h.submatrix(range(h.rows), keep)


def smith_form(M: PolyMatrix):
    """Smith normal form over F_p[z]: returns (V, S, W) with S = V @ M @ W
    diagonal, monic invariant factors d_1 | d_2 | ..., V and W unimodular."""
    _require_univar(M)
    ring = M.ring
    n, l = M.rows, M.cols
    a = [[M.entries[i][j] for j in range(l)] for i in range(n)]
    v = [[Polynomial.constant(ring, 1 if i == j else 0) for j in range(n)] for i in range(n)]
    w = [[Polynomial.constant(ring, 1 if i == j else 0) for j in range(l)] for i in range(l)]

    def row_swap(i1, i2):
        if i1 != i2:
            a[i1], a[i2] = a[i2], a[i1]
            v[i1], v[i2] = v[i2], v[i1]

    def col_swap(j1, j2):
        if j1 != j2:
            for r in a:
                r[j1], r[j2] = r[j2], r[j1]
            for r in w:
                r[j1], r[j2] = r[j2], r[j1]

    def row_addmul(idst, isrc, f):
        if f.is_zero():
            return
        a[idst] = [x + f * y for x, y in zip(a[idst], a[isrc])]
        v[idst] = [x + f * y for x, y in zip(v[idst], v[isrc])]

    def col_addmul(jdst, jsrc, f):
        if f.is_zero():
            return
        for r in a:
            r[jdst] = r[jdst] + f * r[jsrc]
        for r in w:
            r[jdst] = r[jdst] + f * r[jsrc]

    def row_scale(i, c):
        a[i] = [x.scale(c) for x in a[i]]
        v[i] = [x.scale(c) for x in v[i]]

    for t in range(min(n, l)):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, l):
                    if not a[i][j].is_zero():
                        d = _deg1(a[i][j])
                        if best is None or d < best[0]:
                            best = (d, i, j)
            if best is None:
                break
            _, bi, bj = best
            row_swap(t, bi)
            col_swap(t, bj)
            dirty = False
            for i in range(t + 1, n):
                if a[i][t].is_zero():
                    continue
                q, r = _udivmod(a[i][t], a[t][t])
                row_addmul(i, t, -q)
                if not r.is_zero():
                    dirty = True
            for j in range(t + 1, l):
                if a[t][j].is_zero():
                    continue
                q, r = _udivmod(a[t][j], a[t][t])
                col_addmul(j, t, -q)
                if not r.is_zero():
                    dirty = True
            if dirty:
                continue
            # pivot clears its row and column; force divisibility of the block
            offender = None
            for i in range(t + 1, n):
                for j in range(t + 1, l):
                    if not a[i][j].is_zero():
                        _, r = _udivmod(a[i][j], a[t][t])
                        if not r.is_zero():
                            offender = i
                            break
                if offender is not None:
                    break
            if offender is None:
                break
            row_addmul(t, offender, Polynomial.one(ring))
        if not a[t][t].is_zero():
            row_scale(t, ring.field.inv(a[t][t].terms[(_deg1(a[t][t]),)]))

    S = PolyMatrix(ring, a, shape=(n, l))
    V = PolyMatrix(ring, v, shape=(n, n))
    W = PolyMatrix(ring, w, shape=(l, l))
    return V, S, W


@dataclass(frozen=True)
class ColumnDegreeProfile:
    """Column degrees and the leading-coefficient matrix of a 1-D matrix."""

    degrees: tuple
    leading: tuple  # rows x cols leading-coefficient table over F_p


def _leading_col_matrix(a, rows, cols):
    degs = []
    for j in range(cols):
        d = max((_deg1(a[i][j]) for i in range(rows)), default=-1)
        degs.append(d)
    lead = tuple(
        tuple(a[i][j].terms.get((degs[j],), 0) if degs[j] >= 0 else 0 for j in range(cols))
        for i in range(rows)
    )
    return tuple(degs), lead


def fp_kernel_vector(table, p: int):
    """One deterministic nonzero kernel vector of an integer matrix mod p, or
    None at full column rank. The vector corresponds to the first free column
    of the row echelon form."""
    rows = [list(r) for r in table]
    n = len(rows)
    m = len(rows[0]) if n else 0
    pivots = {}
    r = 0
    for c in range(m):
        pr = None
        for i in range(r, n):
            if rows[i][c] % p:
                pr = i
                break
        if pr is None:
            vec = [0] * m
            vec[c] = 1
            for cc, rr in pivots.items():
                vec[cc] = (-rows[rr][c]) % p
            return vec
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] % p:
                f = rows[i][c] % p
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots[c] = r
        r += 1
    return None


def column_reduce(M: PolyMatrix):
    """Column reduction over F_p[z]: returns (M', U, profile) with M' = M @ U,
    U unimodular, and the leading column-coefficient matrix of M' of full
    column rank. The column degrees of M' then sum to the maximal degree of
    the full-size minors."""
    _require_univar(M)
    if rank_ff(M) != M.cols:
        raise MatrixError("column reduction needs full column rank")
    w = _ColOps(M)
    p = M.ring.p
    while True:
        degs, lead = _leading_col_matrix(w.a, w.rows, w.cols)
        v = fp_kernel_vector(lead, p)
        if v is None:
            break
        cand = [j for j in range(w.cols) if v[j] % p]
        jstar = max(cand, key=lambda j: (degs[j], -j))
        inv = pow(v[jstar], p - 2, p)
        for j in cand:
            if j == jstar:
                continue
            c = (v[j] * inv) % p
            shift = Polynomial.monomial(M.ring, (degs[jstar] - degs[j],), c)
            w.addmul(jstar, j, shift)
    mprime, u = w.matrices()
    degs, lead = _leading_col_matrix(w.a, w.rows, w.cols)
    return mprime, u, ColumnDegreeProfile(tuple(degs), lead)


def is_column_reduced(M: PolyMatrix) -> bool:
    _require_univar(M)
    a = [list(row) for row in M.entries]
    degs, lead = _leading_col_matrix(a, M.rows, M.cols)
    if any(d < 0 for d in degs):
        return False
    return fp_kernel_vector(lead, M.ring.p) is None


def row_reduce(M: PolyMatrix):
    """Transpose analogue of column_reduce: returns (M', V, profile) with
    M' = V @ M and the leading row-coefficient matrix of full row rank."""
    mt, u, profile = column_reduce(M.transpose())
    return mt.transpose(), u.transpose(), profile
