"""Submodule computations over D = F_p[z_1,...,z_m] in any number of variables.

Reduced module Groebner bases under a position-over-term order (lower
position dominates, graded-lex on monomials), canonical normal forms,
membership and module equality, syzygy (kernel) computation by block
elimination, freeness via Fitting ideals of a presentation, and parity-check
synthesis.
"""

from __future__ import annotations

import heapq

from .poly import Polynomial, Ring, grlex_key, mono_div, mono_divides, mono_lcm
from .polymat import (
    MatrixError,
    PolyMatrix,
    from_columns,
    hstack,
    is_minor_prime,
    minors,
    rank_ff,
    smith_form,
)


class ModuleError(ValueError):
    pass


class VerificationError(RuntimeError):
    """Internal consistency check failed; never a silent wrong answer."""


# vectors in D^n are tuples of Polynomial ------------------------------

def vec_zero(ring: Ring, n: int) -> tuple:
    z = Polynomial.zero(ring)
    return (z,) * n


def vec_is_zero(v) -> bool:
    return all(c.is_zero() for c in v)


def vec_add(a, b) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a, b) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(v, c: int) -> tuple:
    return tuple(x.scale(c) for x in v)


def vec_term_mul(v, mono, c: int) -> tuple:
    """Multiply a vector by the term c * z^mono."""
    return tuple(x.shift(mono).scale(c) for x in v)


def vec_poly_mul(v, f: Polynomial) -> tuple:
    return tuple(x * f for x in v)


def vec_lead(v):
    """Leading term under position-over-term: smallest nonzero position wins,
    graded-lex within a position. Returns (pos, mono, coeff) or None."""
    for pos, comp in enumerate(v):
        if comp.terms:
            mono = comp.lead_mono()
            return pos, mono, comp.terms[mono]
    return None


def _vec_sort_key(v):
    lt = vec_lead(v)
    if lt is None:
        return (1, 0, ())
    pos, mono, _ = lt
    return (0, pos, tuple(-x for x in grlex_key(mono)))


def reduce_vec(y, basis, witnesses=None, gen_count: int = 0):
    """Full reduction of y against a list of monic basis vectors.

    Returns (normal_form, combination) where combination is the witness
    vector in D^gen_count expressing y - normal_form through the original
    generators (only if witnesses is given, else None).
    """
    if not basis:
        return y, (vec_zero(y[0].ring, gen_count) if witnesses is not None else None)
    ring = basis[0][0].ring
    comb = vec_zero(ring, gen_count) if witnesses is not None else None
    leads = [vec_lead(g) for g in basis]
    cur = y
    rem = vec_zero(ring, len(y))
    while not vec_is_zero(cur):
        pos, mono, coeff = vec_lead(cur)
        hit = None
        for idx, lt in enumerate(leads):
            gpos, gmono, _ = lt
            if gpos == pos and mono_divides(gmono, mono):
                hit = idx
                break
        if hit is None:
            # move the leading term to the remainder
            t = Polynomial.monomial(ring, mono, coeff)
            rem = tuple(rem[i] + t if i == pos else rem[i] for i in range(len(rem)))
            cur = tuple(cur[i] - t if i == pos else cur[i] for i in range(len(cur)))
            continue
        shift = mono_div(mono, leads[hit][1])
        cur = vec_sub(cur, vec_term_mul(basis[hit], shift, coeff))
        if comb is not None:
            comb = vec_add(comb, vec_term_mul(witnesses[hit], shift, coeff))
    return rem, comb


def _monic_vec(v):
    lt = vec_lead(v)
    if lt is None:
        return v, 1
    inv = v[0].ring.field.inv(lt[2])
    return vec_scale(v, inv), inv


def buchberger(generators, ring: Ring, n: int, track_witness: bool = True):
    """Reduced Groebner basis of the submodule of D^n spanned by the
    generators. Deterministic: pairs processed lowest (i, j) first, the
    trivial pairs with distinct leading positions are skipped.

    Returns (gb, witnesses): parallel tuples, gb reduced and sorted by
    descending leading term, each witness w satisfying gb_i = sum w_j gen_j.
    """
    gens = [tuple(v) for v in generators]
    l = len(gens)
    basis = []
    wits = []
    for idx, g in enumerate(gens):
        if vec_is_zero(g):
            continue
        w = tuple(Polynomial.constant(ring, 1 if j == idx else 0) for j in range(l))
        gm, inv = _monic_vec(g)
        basis.append(gm)
        wits.append(vec_scale(w, inv) if track_witness else w)

    pairs = []
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            heapq.heappush(pairs, (i, j))

    while pairs:
        i, j = heapq.heappop(pairs)
        gi, gj = basis[i], basis[j]
        pi, mi, _ = vec_lead(gi)
        pj, mj, _ = vec_lead(gj)
        if pi != pj:
            continue
        lcm = mono_lcm(mi, mj)
        s = vec_sub(vec_term_mul(gi, mono_div(lcm, mi), 1),
                    vec_term_mul(gj, mono_div(lcm, mj), 1))
        if track_witness:
            sw = vec_sub(vec_term_mul(wits[i], mono_div(lcm, mi), 1),
                         vec_term_mul(wits[j], mono_div(lcm, mj), 1))
            nf, comb = reduce_vec(s, basis, wits, l)
        else:
            sw = None
            nf, comb = reduce_vec(s, basis)
        if vec_is_zero(nf):
            continue
        if track_witness:
            nw = vec_sub(sw, comb)
        nfm, inv = _monic_vec(nf)
        basis.append(nfm)
        wits.append(vec_scale(nw, inv) if track_witness else None)
        new = len(basis) - 1
        for t in range(new):
            heapq.heappush(pairs, (t, new))

    # minimalize: drop elements whose leading term is divisible by another's;
    # ascending leading-term order, so every divisor is seen before what it divides
    def _ascending_key(i):
        pos, mono, _ = vec_lead(basis[i])
        return (-pos, grlex_key(mono))

    order = sorted(range(len(basis)), key=_ascending_key)
    keep = []
    for i in order:
        pos, mono, _ = vec_lead(basis[i])
        dominated = False
        for j in keep:
            jpos, jmono, _ = vec_lead(basis[j])
            if jpos == pos and mono_divides(jmono, mono):
                dominated = True
                break
        if not dominated:
            keep.append(i)

    # tail-reduce each survivor against the others
    final = []
    final_w = []
    kept_vecs = [basis[i] for i in keep]
    kept_wits = [wits[i] for i in keep]
    for t in range(len(keep)):
        others = kept_vecs[:t] + kept_vecs[t + 1:]
        if track_witness:
            others_w = kept_wits[:t] + kept_wits[t + 1:]
            nf, comb = reduce_vec(kept_vecs[t], others, others_w, l)
            nw = vec_sub(kept_wits[t], comb)
        else:
            nf, _ = reduce_vec(kept_vecs[t], others)
            nw = None
        nfm, inv = _monic_vec(nf)
        final.append(nfm)
        final_w.append(vec_scale(nw, inv) if track_witness else None)

    idx = sorted(range(len(final)), key=lambda i: _vec_sort_key(final[i]))
    return tuple(final[i] for i in idx), tuple(final_w[i] for i in idx)


class ModuleBasis:
    """A submodule of D^n: original generators plus the canonical reduced
    Groebner basis (position-over-term, lower index wins, graded-lex)."""

    __slots__ = ("ring", "n", "generators", "gb", "witnesses")

    def __init__(self, ring: Ring, n: int, generators):
        if n < 1:
            raise ModuleError("ambient dimension must be >= 1")
        generators = tuple(tuple(v) for v in generators)
        for v in generators:
            if len(v) != n:
                raise ModuleError("generator length mismatch")
            for c in v:
                if c.ring != ring:
                    raise ModuleError("generator ring mismatch")
        self.ring = ring
        self.n = n
        self.generators = generators
        self.gb, self.witnesses = buchberger(generators, ring, n)

    @classmethod
    def from_matrix(cls, G: PolyMatrix) -> "ModuleBasis":
        return cls(G.ring, G.rows, G.columns())

    def normal_form(self, y) -> tuple:
        y = tuple(y)
        if len(y) != self.n:
            raise ModuleError("vector length mismatch")
        nf, _ = reduce_vec(y, list(self.gb))
        return nf

    def normal_form_with_witness(self, y):
        """Returns (nf, comb) with y - nf = sum comb_j * generators_j."""
        y = tuple(y)
        if len(y) != self.n:
            raise ModuleError("vector length mismatch")
        nf, comb_gb = reduce_vec(y, list(self.gb), list(self.witnesses),
                                 len(self.generators))
        return nf, comb_gb

    def contains(self, y) -> bool:
        return vec_is_zero(self.normal_form(y))

    def __eq__(self, other):
        if not isinstance(other, ModuleBasis):
            return NotImplemented
        return self.ring == other.ring and self.n == other.n and self.gb == other.gb

    def __hash__(self):
        return hash((self.ring, self.n, self.gb))

    def __repr__(self):
        return f"<submodule of D^{self.n}, {len(self.gb)} GB elements>"


def groebner(generators, ring: Ring, n: int) -> ModuleBasis:
    return ModuleBasis(ring, n, generators)


def normal_form(y, basis: ModuleBasis) -> tuple:
    return basis.normal_form(y)


def module_equal(a: ModuleBasis, b: ModuleBasis) -> bool:
    if a.n != b.n or a.ring != b.ring:
        raise ModuleError("ambient mismatch")
    return a.gb == b.gb


# syzygies ---------------------------------------------------------------

def syzygies(M: PolyMatrix) -> PolyMatrix:
    """Generator matrix of ker_D M = {p in D^l : M p = 0}, columns generating.

    Computed by a Groebner basis of the graph module {(Mp, p)} in D^(n+l)
    under the position-over-term order (the first block dominates): the
    elements with vanishing first block yield the kernel generators.
    """
    ring = M.ring
    n, l = M.rows, M.cols
    if l == 0:
        return PolyMatrix(ring, [], shape=(0, 0))
    if n == 0:
        return PolyMatrix.identity(ring, l)
    ext = []
    for j in range(l):
        col = M.col(j)
        tag = tuple(Polynomial.constant(ring, 1 if t == j else 0) for t in range(l))
        ext.append(col + tag)
    gb, _ = buchberger(ext, ring, n + l, track_witness=False)
    cols = [g[n:] for g in gb if vec_is_zero(g[:n])]
    return from_columns(ring, cols, nrows=l)


def solve_image_preimage_full(M: PolyMatrix, N: PolyMatrix):
    """Generators of {p in D^cols(M) : M p in im_D N} with their witnesses:
    returns (W, X), column-aligned, such that M @ W = N @ X. Computed as the
    two projections of the syzygies of the block [M | -N]."""
    if M.rows != N.rows:
        raise MatrixError("row count mismatch")
    block = hstack(M, -N)
    syz = syzygies(block)
    w = syz.submatrix(range(M.cols), range(syz.cols))
    x = syz.submatrix(range(M.cols, M.cols + N.cols), range(syz.cols))
    return w, x


def solve_image_preimage(M: PolyMatrix, N: PolyMatrix) -> PolyMatrix:
    """Generator matrix of {p in D^cols(M) : M p in im_D N}: the p-projection
    of the syzygies of the block [M | -N]."""
    return solve_image_preimage_full(M, N)[0]


# freeness via Fitting ideals -------------------------------------------

def _scalar_ideal_gb(polys, ring: Ring):
    vecs = [(f,) for f in polys if not f.is_zero()]
    gb, _ = buchberger(vecs, ring, 1, track_witness=False)
    return gb


def ideal_contains(polys, f: Polynomial, ring: Ring) -> bool:
    """Membership of f in the ideal generated by polys."""
    gb = _scalar_ideal_gb(polys, ring)
    nf, _ = reduce_vec((f,), list(gb))
    return vec_is_zero(nf)


def freeness_certificate(G: PolyMatrix):
    """Fitting-ideal freeness test for the module im_D G.

    Returns a dict with the verdict, the rank, and witness generators of the
    offending Fitting ideal when not free. Free of rank k iff Fitt_k = (1)
    and Fitt_{k-1} = 0 for the presentation by the generator syzygies
    (projective = free over the polynomial ring).
    """
    ring = G.ring
    k = rank_ff(G)
    l = G.cols
    if l == 0 or k == 0:
        # zero module (rank 0 and, with nonzero generators impossible at rank 0...)
        nonzero = any(not G[i, j].is_zero() for i in range(G.rows) for j in range(G.cols))
        if not nonzero:
            return {"free": True, "rank": 0, "witness": None}
    syz = syzygies(G)
    size_k = l - k
    if size_k == 0:
        fitt_k_one = True
        fitt_k_gens = [Polynomial.one(ring)]
    elif size_k > min(syz.rows, syz.cols):
        fitt_k_one = False
        fitt_k_gens = []
    else:
        fitt_k_gens = [mn for mn in minors(syz, size_k) if not mn.is_zero()]
        fitt_k_one = bool(fitt_k_gens) and ideal_contains(fitt_k_gens, Polynomial.one(ring), ring)
    size_km1 = l - k + 1
    if size_km1 > min(syz.rows, syz.cols):
        fitt_km1_zero = True
        fitt_km1_gens = []
    else:
        fitt_km1_gens = [mn for mn in minors(syz, size_km1) if not mn.is_zero()]
        fitt_km1_zero = not fitt_km1_gens
    free = fitt_k_one and fitt_km1_zero
    witness = None
    if not free:
        witness = {
            "fitt_k_is_unit_ideal": fitt_k_one,
            "fitt_k_generators": fitt_k_gens,
            "fitt_km1_is_zero": fitt_km1_zero,
            "fitt_km1_generators": fitt_km1_gens,
        }
    return {"free": free, "rank": k, "witness": witness}


def is_free(basis_or_matrix) -> tuple:
    """(free?, rank) for a module given as ModuleBasis or generator matrix."""
    if isinstance(basis_or_matrix, ModuleBasis):
        G = from_columns(basis_or_matrix.ring, basis_or_matrix.generators,
                         nrows=basis_or_matrix.n)
    else:
        G = basis_or_matrix
    cert = freeness_certificate(G)
    return cert["free"], cert["rank"]


# parity checks ----------------------------------------------------------

def kernel_generators(H: PolyMatrix) -> ModuleBasis:
    """ker_D H as a ModuleBasis (columns of the syzygy matrix generate)."""
    syz = syzygies(H)
    return ModuleBasis(H.ring, H.cols, [syz.col(j) for j in range(syz.cols)])


def parity_check(G: PolyMatrix):
    """Parity check matrix H with ker_D H = im_D G, or None when none exists.

    Exists iff G is minor-prime (the GCD of its full-size minors is a unit).
    One variable: H is the bottom rows of the Smith-form row transformation,
    full row rank n-k. Several variables: rows are transposed generators of
    ker_D G^T, pruned to n-k rows when a verified subset exists. The kernel
    equality is always re-verified; failure raises VerificationError.
    """
    ring = G.ring
    n, k = G.rows, G.cols
    if rank_ff(G) != k:
        raise MatrixError("parity_check needs a full-column-rank generator matrix")
    if not is_minor_prime(G):
        return None

    if ring.nvars == 1:
        V, S, W = smith_form(G)
        for i in range(k):
            if not S[i, i].is_unit():
                raise VerificationError("minor-prime 1-D matrix with non-unit invariant factor")
        H = V.submatrix(range(k, n), range(n))
    else:
        left = syzygies(G.transpose())
        H = left.transpose()
        target = n - k
        if H.rows > target:
            pruned = _prune_rows(H, G, target)
            if pruned is not None:
                H = pruned

    target_basis = ModuleBasis.from_matrix(G)
    ker = kernel_generators(H) if H.rows else ModuleBasis(
        ring, n, [tuple(Polynomial.constant(ring, 1 if t == i else 0) for t in range(n))
                  for i in range(n)])
    if not module_equal(ker, target_basis):
        raise VerificationError("parity check verification failed: ker H != im G")
    return H


def _prune_rows(H: PolyMatrix, G: PolyMatrix, target: int):
    from itertools import combinations as _comb

    gb = ModuleBasis.from_matrix(G)
    for rows in _comb(range(H.rows), target):
        sub = H.submatrix(rows, range(H.cols))
        if rank_ff(sub) != target:
            continue
        ker = kernel_generators(sub)
        if module_equal(ker, gb):
            return sub
    return None
