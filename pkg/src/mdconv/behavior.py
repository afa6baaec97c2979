"""Truncated power-series trajectory spaces and the code/behavior duality.

The infinite space of power series is modeled by coefficient boxes with
explicit valid-region bookkeeping: every operator application shrinks the
region on which the stored coefficients are guaranteed to agree with the
exact computation. All duality checks are phrased so that they are exact
statements about the valid regions, never approximations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import modp
from .field import FieldElement
from .modengine import VerificationError, solve_image_preimage, syzygies
from .poly import Polynomial, Ring
from .polymat import PolyMatrix


class BehaviorError(ValueError):
    pass


def _box_shape(box):
    return tuple(b + 1 for b in box)


def region_nonempty(region) -> bool:
    return all(r >= 0 for r in region)


def region_min(a, b):
    return tuple(min(x, y) for x, y in zip(a, b))


def region_sub(a, d):
    return tuple(x - y for x, y in zip(a, d))


@lru_cache(maxsize=4096)
def _region_points(region):
    """Multi-indices alpha <= region componentwise (empty if any entry < 0)."""
    if not region_nonempty(region):
        return ()
    grids = np.indices(_box_shape(region)).reshape(len(region), -1).T
    return tuple(tuple(int(x) for x in row) for row in grids)


class TruncatedSeries:
    """A power-series element cut at a per-variable degree box.

    coeffs has shape (n, box_1+1, ..., box_m+1) over F_p. ``valid`` marks the
    region on which the coefficients are guaranteed correct; operators shrink
    it by their degree.
    """

    __slots__ = ("ring", "n", "box", "valid", "coeffs")

    def __init__(self, ring: Ring, coeffs: np.ndarray, valid=None):
        coeffs = np.asarray(coeffs, dtype=np.int64) % ring.p
        if coeffs.ndim != ring.nvars + 1:
            raise BehaviorError("coefficient array rank mismatch")
        self.ring = ring
        self.n = coeffs.shape[0]
        self.box = tuple(s - 1 for s in coeffs.shape[1:])
        self.valid = tuple(valid) if valid is not None else self.box
        self.coeffs = coeffs

    @classmethod
    def zeros(cls, ring: Ring, n: int, box) -> "TruncatedSeries":
        return cls(ring, np.zeros((n,) + _box_shape(box), dtype=np.int64))

    @classmethod
    def from_poly_vec(cls, vec, box) -> "TruncatedSeries":
        """Embed a polynomial vector as the series with those coefficients
        (and zeros elsewhere); exact on the whole box."""
        vec = tuple(vec)
        ring = vec[0].ring
        out = np.zeros((len(vec),) + _box_shape(box), dtype=np.int64)
        for i, f in enumerate(vec):
            for mono, c in f.terms.items():
                if all(a <= b for a, b in zip(mono, box)):
                    out[(i,) + mono] = c
        return cls(ring, out)

    @classmethod
    def indicator(cls, ring: Ring, n: int, box, comp: int, alpha) -> "TruncatedSeries":
        s = cls.zeros(ring, n, box)
        s.coeffs[(comp,) + tuple(alpha)] = 1
        return s

    def copy_with(self, coeffs, valid) -> "TruncatedSeries":
        return TruncatedSeries(self.ring, coeffs, valid)

    def coeff_at(self, comp: int, alpha) -> int:
        return int(self.coeffs[(comp,) + tuple(alpha)])

    def component(self, i: int) -> "TruncatedSeries":
        return TruncatedSeries(self.ring, self.coeffs[i:i + 1], self.valid)

    def restrict_flat(self, region) -> np.ndarray:
        """Coefficients on the region, flattened component-major."""
        if not region_nonempty(region):
            return np.zeros(0, dtype=np.int64)
        sl = (slice(None),) + tuple(slice(0, r + 1) for r in region)
        return self.coeffs[sl].reshape(-1).copy()

    def is_zero_on(self, region) -> bool:
        return not self.restrict_flat(region_min(region, self.box)).any()

    def equal_on(self, other: "TruncatedSeries", region) -> bool:
        r = region_min(region, region_min(self.box, other.box))
        return np.array_equal(self.restrict_flat(r), other.restrict_flat(r))

    def __repr__(self):
        return f"<series n={self.n} box={self.box} valid={self.valid} over {self.ring}>"


def shift_L(axis: int, f: TruncatedSeries) -> TruncatedSeries:
    """Backward shift along the given axis (1-based) followed by truncation;
    the valid region shrinks by one along that axis."""
    m = f.ring.nvars
    if not 1 <= axis <= m:
        raise BehaviorError(f"axis {axis} out of range")
    ax = axis  # coeffs axis 0 is the component index
    out = np.zeros_like(f.coeffs)
    src = [slice(None)] * (m + 1)
    dst = [slice(None)] * (m + 1)
    src[ax] = slice(1, None)
    dst[ax] = slice(0, f.coeffs.shape[ax] - 1)
    out[tuple(dst)] = f.coeffs[tuple(src)]
    valid = tuple(v - (1 if i == axis - 1 else 0) for i, v in enumerate(f.valid))
    return f.copy_with(out, valid)


def scalar_action(poly: Polynomial, f: TruncatedSeries) -> TruncatedSeries:
    """p(z) . f = p(L_1,...,L_m)(f): out_beta = sum_alpha p_alpha f_(alpha+beta),
    summed over the terms available on the box. Valid region shrinks by the
    per-variable degree of p."""
    if poly.ring != f.ring:
        raise BehaviorError("ring mismatch")
    p = f.ring.p
    out = np.zeros_like(f.coeffs)
    for mono, c in poly.terms.items():
        if any(a > b for a, b in zip(mono, f.box)):
            continue  # term sees nothing on the box
        src = f.coeffs[(slice(None),) + tuple(slice(a, None) for a in mono)]
        dst = (slice(None),) + tuple(slice(0, s) for s in src.shape[1:])
        out[dst] = (out[dst] + c * src) % p
    valid = region_sub(f.valid, poly.deg_vec())
    return f.copy_with(out, valid)


def apply_matrix(Q: PolyMatrix, a: TruncatedSeries) -> TruncatedSeries:
    """The partial difference operator Q(L_1,...,L_m) applied to a."""
    if Q.ring != a.ring:
        raise BehaviorError("ring mismatch")
    if Q.cols != a.n:
        raise BehaviorError(f"operator expects {Q.cols} components, got {a.n}")
    p = a.ring.p
    out = np.zeros((Q.rows,) + a.coeffs.shape[1:], dtype=np.int64)
    for i in range(Q.rows):
        for j in range(Q.cols):
            entry = Q[i, j]
            if entry.is_zero():
                continue
            acted = scalar_action(entry, a.component(j))
            out[i] = (out[i] + acted.coeffs[0]) % p
    valid = region_sub(a.valid, Q.max_deg_vec())
    return TruncatedSeries(a.ring, out, valid)


def pairing(pvec, a: TruncatedSeries) -> TruncatedSeries:
    """The module-bilinear form <p, a> = sum_i p_i . a_i, a scalar series."""
    pvec = tuple(pvec)
    if len(pvec) != a.n:
        raise BehaviorError("length mismatch in pairing")
    ring = a.ring
    out = np.zeros((1,) + a.coeffs.shape[1:], dtype=np.int64)
    dmax = (0,) * ring.nvars
    for i, f in enumerate(pvec):
        if f.is_zero():
            continue
        dmax = tuple(max(x, y) for x, y in zip(dmax, f.deg_vec()))
        acted = scalar_action(f, a.component(i))
        out[0] = (out[0] + acted.coeffs[0]) % ring.p
    valid = region_sub(a.valid, dmax)
    return TruncatedSeries(ring, out, valid)


def f_pairing(pvec, a: TruncatedSeries) -> FieldElement:
    """The field-valued form <<p, a>> = sum_alpha p_alpha^T a_alpha (finite)."""
    pvec = tuple(pvec)
    if len(pvec) != a.n:
        raise BehaviorError("length mismatch in pairing")
    ring = a.ring
    total = 0
    for i, f in enumerate(pvec):
        for mono, c in f.terms.items():
            if any(x > b for x, b in zip(mono, a.box)):
                raise BehaviorError("polynomial support exceeds the truncation box")
            total += c * a.coeff_at(i, mono)
    return ring.field.element(total)


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    if a.ring != b.ring or a.box != b.box or a.n != b.n:
        raise BehaviorError("series shape mismatch")
    return a.copy_with((a.coeffs + b.coeffs) % a.ring.p, region_min(a.valid, b.valid))


def series_scale(a: TruncatedSeries, c: int) -> TruncatedSeries:
    return a.copy_with((a.coeffs * (c % a.ring.p)) % a.ring.p, a.valid)


# truncated solution spaces ---------------------------------------------

def _flat_index(boxshape, comp, alpha):
    idx = 0
    for a, s in zip(alpha, boxshape):
        idx = idx * s + a
    return comp * math.prod(boxshape) + idx


def _series_from_flat(ring, n, box, flat) -> TruncatedSeries:
    shape = (n,) + _box_shape(box)
    return TruncatedSeries(ring, np.asarray(flat, dtype=np.int64).reshape(shape))


def truncated_kernel(Q: PolyMatrix, box) -> list:
    """F-basis of {a on the box : Q . a = 0 on the valid region}, assembled
    directly from the operator coefficients."""
    ring = Q.ring
    n = Q.cols
    boxshape = _box_shape(box)
    boxsize = math.prod(boxshape)
    nunk = n * boxsize
    rows = []
    for r in range(Q.rows):
        dr = [0] * ring.nvars
        for j in range(n):
            for i, d in enumerate(Q[r, j].deg_vec()):
                dr[i] = max(dr[i], d)
        region = region_sub(box, tuple(dr))
        for beta in _region_points(region):
            eq = np.zeros(nunk, dtype=np.int64)
            for j in range(n):
                for mono, c in Q[r, j].terms.items():
                    alpha = tuple(g + b for g, b in zip(mono, beta))
                    eq[_flat_index(boxshape, j, alpha)] = (
                        eq[_flat_index(boxshape, j, alpha)] + c) % ring.p
            rows.append(eq)
    if rows:
        mat = np.stack(rows)
    else:
        mat = np.zeros((0, nunk), dtype=np.int64)
    basis = modp.nullspace(mat, ring.p)
    return [_series_from_flat(ring, n, box, basis[:, t]) for t in range(basis.shape[1])]


def dual_of_code(code_or_matrix, box) -> list:
    """F-basis of the truncated dual: series on the box pairing to zero (on
    the valid region) with every generator. The constraint matrix is built by
    evaluating the pairing on indicator series, independently of the direct
    kernel assembly."""
    G = code_or_matrix.G if hasattr(code_or_matrix, "G") else code_or_matrix
    ring = G.ring
    n = G.rows
    gens = G.columns()
    boxshape = _box_shape(box)
    boxsize = math.prod(boxshape)
    nunk = n * boxsize
    regions = []
    for g in gens:
        d = [0] * ring.nvars
        for f in g:
            for i, dv in enumerate(f.deg_vec()):
                d[i] = max(d[i], dv)
        if any(dv > b for dv, b in zip(d, box)):
            raise BehaviorError("box smaller than generator degree")
        regions.append(region_sub(box, tuple(d)))

    cols = []
    for comp in range(n):
        for alpha in _region_points(box):
            ind = TruncatedSeries.indicator(ring, n, box, comp, alpha)
            col = []
            for g, region in zip(gens, regions):
                s = pairing(g, ind)
                col.append(s.restrict_flat(region))
            cols.append(np.concatenate(col) if col else np.zeros(0, dtype=np.int64))
    mat = np.stack(cols, axis=1) if cols else np.zeros((0, nunk), dtype=np.int64)
    basis = modp.nullspace(mat, ring.p)
    return [_series_from_flat(ring, n, box, basis[:, t]) for t in range(basis.shape[1])]


def span_matrix(series_list, region) -> np.ndarray:
    """Stack restrictions of the series to the region as columns."""
    if not series_list:
        return np.zeros((0, 0), dtype=np.int64)
    cols = [s.restrict_flat(region) for s in series_list]
    return np.stack(cols, axis=1)


# behavior representations ----------------------------------------------

@dataclass(frozen=True)
class BehaviorRep:
    """A behavior given as kernel(G), image(R), latent image R.(ker N), or
    preimage {a : M.a in im N}."""

    kind: str
    mats: tuple

    @classmethod
    def kernel(cls, G: PolyMatrix) -> "BehaviorRep":
        return cls("kernel", (G,))

    @classmethod
    def image(cls, R: PolyMatrix) -> "BehaviorRep":
        return cls("image", (R,))

    @classmethod
    def latent(cls, R: PolyMatrix, N: PolyMatrix) -> "BehaviorRep":
        if R.cols != N.cols:
            raise BehaviorError("latent-variable counts differ between R and N")
        return cls("latent", (R, N))

    @classmethod
    def preimage(cls, M: PolyMatrix, N: PolyMatrix) -> "BehaviorRep":
        if M.rows != N.rows:
            raise BehaviorError("preimage row counts differ between M and N")
        return cls("preimage", (M, N))

    @property
    def ncomp(self) -> int:
        if self.kind == "kernel":
            return self.mats[0].cols
        if self.kind in ("image", "latent"):
            return self.mats[0].rows
        return self.mats[0].cols


def _image_kernel_matrix(R: PolyMatrix) -> PolyMatrix:
    """Q with ker_A Q = im_A R: rows are transposed generators of ker_D R^T."""
    return syzygies(R.transpose()).transpose()


def to_kernel_rep(rep: BehaviorRep, margin: int = 3, verify: bool = True) -> PolyMatrix:
    """Kernel-form matrix Q for the behavior; latent and preimage kinds are
    eliminated through the composed-operator construction. Verified on a test
    box (solution spaces coincide, both inclusions by F-linear algebra);
    failure raises VerificationError."""
    if rep.kind == "kernel":
        return rep.mats[0]

    if rep.kind == "image":
        (R,) = rep.mats
        Q = _image_kernel_matrix(R)
        if Q.rows and not (Q @ R).is_zero():
            raise VerificationError("kernel-form rows do not annihilate the image")
        if verify:
            _verify_image_kernel(Q, R, margin)
        return Q

    if rep.kind == "preimage":
        M, N = rep.mats
        Q0 = _image_kernel_matrix(N)
        Q = Q0 @ M
        if verify:
            _verify_preimage_kernel(Q, M, N, margin)
        return Q

    if rep.kind == "latent":
        R, N = rep.mats
        W = solve_image_preimage(R.transpose(), N.transpose())
        Q = W.transpose()
        if verify:
            _verify_latent_kernel(Q, R, N, margin)
        return Q

    raise BehaviorError(f"unknown behavior kind {rep.kind!r}")


def _combined_box(mats, margin):
    nv = mats[0].ring.nvars
    out = [0] * nv
    for m in mats:
        for i, d in enumerate(m.max_deg_vec()):
            out[i] += d
    return tuple(d + margin for d in out)


def _verify_image_kernel(Q: PolyMatrix, R: PolyMatrix, margin: int):
    ring = R.ring
    box = _combined_box([Q, R], margin)
    region = region_sub(region_sub(box, Q.max_deg_vec()), R.max_deg_vec())
    ker = truncated_kernel(Q, box)
    imgs = []
    for j in range(R.cols):
        for alpha in _region_points(box):
            ind = TruncatedSeries.indicator(ring, R.cols, box, j, alpha)
            imgs.append(apply_matrix(R, ind))
    a = span_matrix(ker, region)
    b = span_matrix(imgs, region)
    if a.shape[1] == 0 and b.shape[1] == 0:
        return
    if a.size == 0 or b.size == 0:
        lhs_dim = modp.rank(a, ring.p) if a.size else 0
        rhs_dim = modp.rank(b, ring.p) if b.size else 0
        if lhs_dim != rhs_dim:
            raise VerificationError("image/kernel solution spaces differ on the test box")
        return
    if not modp.span_equal(a, b, ring.p):
        raise VerificationError("image/kernel solution spaces differ on the test box")


def _verify_preimage_kernel(Q: PolyMatrix, M: PolyMatrix, N: PolyMatrix, margin: int):
    ring = M.ring
    box = _combined_box([Q, M, N], margin)
    opdeg = tuple(max(x, y) for x, y in zip(M.max_deg_vec(), N.max_deg_vec()))
    region = region_sub(region_sub(box, Q.max_deg_vec()), opdeg)
    ker = truncated_kernel(Q, box)
    sols = _preimage_solutions(M, N, box)
    a = span_matrix(ker, region)
    b = span_matrix(sols, region)
    if a.shape[1] == 0 and b.shape[1] == 0:
        return
    if not modp.span_equal(a, b, ring.p):
        raise VerificationError("preimage/kernel solution spaces differ on the test box")


def _preimage_solutions(M: PolyMatrix, N: PolyMatrix, box) -> list:
    """Basis of the a-projection of {(a, zeta) on the box : M.a = N.zeta on
    the common valid region}."""
    ring = M.ring
    n, l = M.cols, N.cols
    boxshape = _box_shape(box)
    boxsize = math.prod(boxshape)
    nunk = (n + l) * boxsize
    opdeg = tuple(max(x, y) for x, y in zip(M.max_deg_vec(), N.max_deg_vec()))
    region = region_sub(box, opdeg)
    rows = []
    for r in range(M.rows):
        for beta in _region_points(region):
            eq = np.zeros(nunk, dtype=np.int64)
            for j in range(n):
                for mono, c in M[r, j].terms.items():
                    alpha = tuple(g + b for g, b in zip(mono, beta))
                    if all(x <= y for x, y in zip(alpha, box)):
                        eq[_flat_index(boxshape, j, alpha)] = (
                            eq[_flat_index(boxshape, j, alpha)] + c) % ring.p
            for j in range(l):
                for mono, c in N[r, j].terms.items():
                    alpha = tuple(g + b for g, b in zip(mono, beta))
                    if all(x <= y for x, y in zip(alpha, box)):
                        idx = (n + j) * boxsize + int(np.ravel_multi_index(alpha, boxshape))
                        eq[idx] = (eq[idx] - c) % ring.p
            rows.append(eq)
    mat = np.stack(rows) if rows else np.zeros((0, nunk), dtype=np.int64)
    basis = modp.nullspace(mat, ring.p)
    out = []
    for t in range(basis.shape[1]):
        flat = basis[:n * boxsize, t]
        out.append(_series_from_flat(ring, n, box, flat))
    return out


def _verify_latent_kernel(Q: PolyMatrix, R: PolyMatrix, N: PolyMatrix, margin: int):
    ring = R.ring
    box = _combined_box([Q, R, N], margin)
    opdeg = tuple(max(x, y) for x, y in zip(R.max_deg_vec(), N.max_deg_vec()))
    region = region_sub(region_sub(box, Q.max_deg_vec()), opdeg)
    ker = truncated_kernel(Q, box)
    zetas = truncated_kernel(N, box)
    imgs = [apply_matrix(R, z) for z in zetas]
    a = span_matrix(ker, region)
    b = span_matrix(imgs, region)
    if a.shape[1] == 0 and b.shape[1] == 0:
        return
    if not modp.span_equal(a, b, ring.p):
        raise VerificationError("latent/kernel solution spaces differ on the test box")
