"""Minimal first-order representations for one-variable codes.

Degree computation with a cross-check, the shift-chain (P,Q,R) construction
from a column-reduced encoder, the parity-check Horner linearization for
(K,L,M), and independent verifiers that recompute the represented code and
test the three minimality conditions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import modp
from .code import Code, max_minor_degree
from .modengine import VerificationError, parity_check, syzygies
from .poly import Polynomial
from .polymat import (
    PolyMatrix,
    hermite_canonical,
    hstack,
    is_minor_prime,
    column_reduce,
    rank_ff,
    row_reduce,
)


class RealizationError(ValueError):
    pass


@dataclass(frozen=True)
class PqrRep:
    """Constant triple (P, Q, R): the code is R(ker(zP+Q)). Minimality:
    (i) rank P = delta; (ii) rank [P; R] = delta + k; (iii) zP+Q left-prime."""

    p: int
    delta: int
    k: int
    n: int
    P: tuple
    Q: tuple
    R: tuple

    def as_dict(self) -> dict:
        return {"form": "pqr", "field": self.p, "delta": self.delta, "k": self.k,
                "n": self.n, "P": [list(r) for r in self.P],
                "Q": [list(r) for r in self.Q], "R": [list(r) for r in self.R]}


@dataclass(frozen=True)
class KlmRep:
    """Constant triple (K, L, M): the code is {p : Mp in im(zK+L)}. Minimality:
    (i) rank K = delta; (ii) rank [K, M] = delta + n - k; (iii) [zK+L | M]
    left-prime."""

    p: int
    delta: int
    k: int
    n: int
    K: tuple
    L: tuple
    M: tuple

    def as_dict(self) -> dict:
        return {"form": "klm", "field": self.p, "delta": self.delta, "k": self.k,
                "n": self.n, "K": [list(r) for r in self.K],
                "L": [list(r) for r in self.L], "M": [list(r) for r in self.M]}


def _require_1d_free(code: Code):
    if code.ring.nvars != 1:
        raise RealizationError("first-order representations need one variable")
    if not code.free or code.encoder is None:
        raise RealizationError("code has no encoder")


def degree(code: Code) -> int:
    """Max degree of the full-size minors of an encoder, cross-checked against
    the column-degree sum of the column-reduced encoder."""
    _require_1d_free(code)
    by_minors = max_minor_degree(code.encoder)
    _, _, profile = column_reduce(code.encoder)
    by_profile = sum(profile.degrees)
    if by_minors != by_profile:
        raise VerificationError(
            f"degree cross-check failed: minors say {by_minors}, "
            f"column degrees say {by_profile}")
    return by_minors


def _coeff_table(f: Polynomial, up_to: int) -> list:
    return [f.terms.get((i,), 0) for i in range(up_to + 1)]


def realize_PQR(code: Code) -> PqrRep:
    """Shift-chain construction: the latent vector stacks z^i p_j for column j
    up to its column degree; the pencil rows encode the chain ties and R
    re-assembles the encoder columns from the chain."""
    _require_1d_free(code)
    delta = degree(code)
    if delta == 0:
        raise RealizationError("block code (degree 0) has no first-order pencil")
    enc, _, profile = column_reduce(code.encoder)
    p = code.ring.p
    k = enc.cols
    n = enc.rows
    degs = profile.degrees
    slots = []  # (column j, chain index i), i = 0..deg_j
    for j in range(k):
        for i in range(degs[j] + 1):
            slots.append((j, i))
    width = delta + k
    assert len(slots) == width
    slot_of = {s: t for t, s in enumerate(slots)}

    P = np.zeros((delta, width), dtype=np.int64)
    Q = np.zeros((delta, width), dtype=np.int64)
    row = 0
    for j in range(k):
        for i in range(degs[j]):
            P[row, slot_of[(j, i)]] = 1
            Q[row, slot_of[(j, i + 1)]] = (-1) % p
            row += 1
    R = np.zeros((n, width), dtype=np.int64)
    for j in range(k):
        for i in range(degs[j] + 1):
            for r in range(n):
                R[r, slot_of[(j, i)]] = enc[r, j].terms.get((i,), 0)

    rep = PqrRep(p=p, delta=delta, k=k, n=n,
                 P=tuple(map(tuple, P.tolist())),
                 Q=tuple(map(tuple, Q.tolist())),
                 R=tuple(map(tuple, R.tolist())))
    ok, reason = verify_PQR(code, rep)
    if not ok:
        raise VerificationError(f"constructed (P,Q,R) failed verification: {reason}")
    return rep


def _pencil(rep_p, rep_q, ring) -> PolyMatrix:
    """zP + Q as a polynomial matrix."""
    rows = len(rep_p)
    cols = len(rep_p[0]) if rows else 0
    z = Polynomial.variable(ring, 0)

    def entry(i, j):
        return Polynomial.constant(ring, rep_q[i][j]) + z.scale(rep_p[i][j])

    return PolyMatrix.build(ring, rows, cols, entry)


def _const_matrix(table, ring) -> PolyMatrix:
    return PolyMatrix.from_ints(ring, [list(r) for r in table],
                                shape=(len(table), len(table[0]) if table else 0))


def verify_PQR(code: Code, rep: PqrRep):
    """(ok, reason): recomputes R(ker(zP+Q)) as a module and compares Hermite
    canonical forms with the code, then checks conditions (i)-(iii)."""
    _require_1d_free(code)
    ring = code.ring
    p = ring.p
    delta, k, n = rep.delta, rep.k, rep.n
    if len(rep.P) != delta or (delta and len(rep.P[0]) != delta + k):
        return False, "P has the wrong shape"
    if len(rep.R) != n or (n and len(rep.R[0]) != delta + k):
        return False, "R has the wrong shape"

    if modp.rank(np.array(rep.P, dtype=np.int64).reshape(delta, delta + k), p) != delta:
        return False, "condition (i): rank P != delta"
    stacked = np.vstack([np.array(rep.P, dtype=np.int64).reshape(delta, delta + k),
                         np.array(rep.R, dtype=np.int64).reshape(n, delta + k)])
    if modp.rank(stacked, p) != delta + k:
        return False, "condition (ii): rank [P; R] != delta + k"
    pencil = _pencil(rep.P, rep.Q, ring)
    if rank_ff(pencil) != delta or not is_minor_prime(pencil.transpose()):
        return False, "condition (iii): zP+Q is not left-prime"

    kernel = syzygies(pencil)
    image = _const_matrix(rep.R, ring) @ kernel
    if hermite_canonical(image) != hermite_canonical(code.encoder):
        return False, "represented module differs from the code"
    return True, "ok"


def realize_KLM(code: Code) -> KlmRep:
    """Horner linearization of a row-reduced parity check: each parity row of
    degree mu contributes mu latent components and mu+1 first-order rows.
    Requires a minor-prime encoder (the parity check must exist)."""
    _require_1d_free(code)
    delta = degree(code)
    if delta == 0:
        raise RealizationError("block code (degree 0) has no first-order pencil")
    if not code.minor_prime:
        raise RealizationError(
            "unsupported input: the parity-check construction needs a minor-prime encoder")
    H = parity_check(code.encoder)
    Hr, _, profile = row_reduce(H)
    mus = profile.degrees
    if sum(mus) != delta:
        raise VerificationError(
            f"parity row degrees {mus} do not sum to the code degree {delta}")
    p = code.ring.p
    n = code.n
    k = code.k
    rows_total = delta + n - k

    # latent slots x_(i,s), s = 1..mu_i, consecutive per parity row
    slot = {}
    t = 0
    for i, mu in enumerate(mus):
        for s in range(1, mu + 1):
            slot[(i, s)] = t
            t += 1

    K = np.zeros((rows_total, delta), dtype=np.int64)
    L = np.zeros((rows_total, delta), dtype=np.int64)
    M = np.zeros((rows_total, n), dtype=np.int64)
    row = 0
    for i, mu in enumerate(mus):
        h = [_coeff_table(Hr[i, j], mu) for j in range(n)]
        for s in range(0, mu + 1):
            for j in range(n):
                M[row, j] = h[j][s]
            if s == 0 and mu >= 1:
                K[row, slot[(i, 1)]] = (-1) % p
            elif 1 <= s <= mu - 1:
                L[row, slot[(i, s)]] = 1
                K[row, slot[(i, s + 1)]] = (-1) % p
            elif s == mu and mu >= 1:
                L[row, slot[(i, mu)]] = 1
            row += 1
    assert row == rows_total

    rep = KlmRep(p=p, delta=delta, k=k, n=n,
                 K=tuple(map(tuple, K.tolist())),
                 L=tuple(map(tuple, L.tolist())),
                 M=tuple(map(tuple, M.tolist())))
    ok, reason = verify_KLM(code, rep)
    if not ok:
        raise VerificationError(f"constructed (K,L,M) failed verification: {reason}")
    return rep


def verify_KLM(code: Code, rep: KlmRep):
    """(ok, reason): recomputes {p : Mp in im(zK+L)} as the projection of the
    syzygies of [M | -(zK+L)] and compares Hermite forms with the code, then
    checks conditions (i)-(iii)."""
    _require_1d_free(code)
    ring = code.ring
    p = ring.p
    delta, k, n = rep.delta, rep.k, rep.n
    rows_total = delta + n - k
    if len(rep.K) != rows_total or len(rep.M) != rows_total:
        return False, "K/M have the wrong row count"

    K = np.array(rep.K, dtype=np.int64).reshape(rows_total, delta)
    M = np.array(rep.M, dtype=np.int64).reshape(rows_total, n)
    if modp.rank(K, p) != delta:
        return False, "condition (i): rank K != delta"
    if modp.rank(np.hstack([K, M]), p) != rows_total:
        return False, "condition (ii): rank [K, M] != delta + n - k"
    pencil = _pencil(rep.K, rep.L, ring)
    block = hstack(pencil, _const_matrix(rep.M, ring))
    if rank_ff(block) != rows_total or not is_minor_prime(block.transpose()):
        return False, "condition (iii): [zK+L | M] is not left-prime"

    mmat = _const_matrix(rep.M, ring)
    joint = hstack(mmat, -pencil)
    syz = syzygies(joint)
    proj = syz.submatrix(range(n), range(syz.cols))
    if hermite_canonical(proj) != hermite_canonical(code.encoder):
        return False, "represented module differs from the code"
    return True, "ok"


def transform_PQR(rep: PqrRep, T, S) -> PqrRep:
    """(T^-1 P S, T^-1 Q S, R S) for invertible constant T (delta) and S
    (delta+k): represents the same code."""
    p = rep.p
    tinv = modp.inverse(np.array(T, dtype=np.int64), p)
    s = np.array(S, dtype=np.int64) % p
    pm = modp.matmul(modp.matmul(tinv, np.array(rep.P), p), s, p)
    qm = modp.matmul(modp.matmul(tinv, np.array(rep.Q), p), s, p)
    rm = modp.matmul(np.array(rep.R), s, p)
    return PqrRep(p=p, delta=rep.delta, k=rep.k, n=rep.n,
                  P=tuple(map(tuple, pm.tolist())),
                  Q=tuple(map(tuple, qm.tolist())),
                  R=tuple(map(tuple, rm.tolist())))


def transform_KLM(rep: KlmRep, T, S) -> KlmRep:
    """(T^-1 K S, T^-1 L S, T^-1 M) for invertible constant T (delta+n-k) and
    S (delta): represents the same code."""
    p = rep.p
    tinv = modp.inverse(np.array(T, dtype=np.int64), p)
    s = np.array(S, dtype=np.int64) % p
    km = modp.matmul(modp.matmul(tinv, np.array(rep.K), p), s, p)
    lm = modp.matmul(modp.matmul(tinv, np.array(rep.L), p), s, p)
    mm = modp.matmul(tinv, np.array(rep.M), p)
    return KlmRep(p=p, delta=rep.delta, k=rep.k, n=rep.n,
                  K=tuple(map(tuple, km.tolist())),
                  L=tuple(map(tuple, lm.tolist())),
                  M=tuple(map(tuple, mm.tolist())))
