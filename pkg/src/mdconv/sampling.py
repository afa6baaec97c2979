"""Seeded random generators for polynomials, matrices, and encoders.

Deterministic given a random.Random instance; used by the duality suite,
the CLI dualcheck command, and the test oracles.
"""

from __future__ import annotations

import random

from . import modp
from .poly import Polynomial, Ring, mono_deg
from .polymat import (
    PolyMatrix,
    is_column_reduced,
    is_minor_prime,
    rank_ff,
)


def _box_monos(ring: Ring, maxdeg: int):
    from itertools import product
    return [m for m in product(range(maxdeg + 1), repeat=ring.nvars) if mono_deg(m) <= maxdeg]


def rand_poly(rng: random.Random, ring: Ring, maxdeg: int, density: float = 0.5) -> Polynomial:
    """Random polynomial of total degree <= maxdeg; each monomial present with
    the given density, coefficient uniform nonzero."""
    items = []
    for mono in _box_monos(ring, maxdeg):
        if rng.random() < density:
            items.append((mono, rng.randrange(1, ring.p)))
    return Polynomial.from_terms(ring, items)


def rand_vector(rng: random.Random, ring: Ring, n: int, maxdeg: int,
                density: float = 0.5) -> tuple:
    return tuple(rand_poly(rng, ring, maxdeg, density) for _ in range(n))


def rand_matrix(rng: random.Random, ring: Ring, rows: int, cols: int, maxdeg: int,
                density: float = 0.5) -> PolyMatrix:
    return PolyMatrix(ring, [[rand_poly(rng, ring, maxdeg, density) for _ in range(cols)]
                             for _ in range(rows)], shape=(rows, cols))


def rand_unimodular(rng: random.Random, ring: Ring, size: int, ops: int = 6,
                    maxdeg: int = 1) -> PolyMatrix:
    """Product of random elementary column operations: unimodular by construction."""
    u = [list(row) for row in PolyMatrix.identity(ring, size).entries]
    for _ in range(ops):
        kind = rng.randrange(3)
        if kind == 0 and size >= 2:
            i, j = rng.sample(range(size), 2)
            for row in u:
                row[i], row[j] = row[j], row[i]
        elif kind == 1:
            j = rng.randrange(size)
            c = rng.randrange(1, ring.p)
            for row in u:
                row[j] = row[j].scale(c)
        else:
            if size < 2:
                continue
            i, j = rng.sample(range(size), 2)
            f = rand_poly(rng, ring, maxdeg, density=0.7)
            for row in u:
                row[i] = row[i] + f * row[j]
    return PolyMatrix(ring, u, shape=(size, size))


def rand_invertible_table(rng: random.Random, p: int, size: int) -> list:
    """Random invertible constant matrix mod p, as a nested int list."""
    while True:
        t = [[rng.randrange(p) for _ in range(size)] for _ in range(size)]
        if modp.is_invertible(t, p):
            return t


def rand_full_column_rank(rng: random.Random, ring: Ring, rows: int, cols: int,
                          maxdeg: int) -> PolyMatrix:
    while True:
        m = rand_matrix(rng, ring, rows, cols, maxdeg, density=0.6)
        if rank_ff(m) == cols:
            return m


def rand_1d_encoder(rng: random.Random, ring: Ring, n: int, k: int, maxdeg: int) -> PolyMatrix:
    """Random full-column-rank one-variable generator matrix."""
    return rand_full_column_rank(rng, ring, n, k, maxdeg)


def rand_cr_minor_prime_encoder(rng: random.Random, ring: Ring, n: int, k: int,
                                delta: int) -> PolyMatrix:
    """Random column-reduced minor-prime encoder with column degrees summing
    to delta (> 0). Resamples until the minor-primeness and reducedness
    conditions hold."""
    if ring.nvars != 1:
        raise ValueError("one-variable encoders only")
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n for a nontrivial minor-prime encoder")
    while True:
        degs = _rand_composition(rng, delta, k)
        cols = []
        for j in range(k):
            col = []
            for i in range(n):
                coeffs = {(d,): rng.randrange(ring.p) for d in range(degs[j] + 1)}
                col.append(Polynomial.from_terms(ring, coeffs.items()))
            cols.append(col)
        m = PolyMatrix(ring, [[cols[j][i] for j in range(k)] for i in range(n)],
                       shape=(n, k))
        if rank_ff(m) != k:
            continue
        degs_ok = all(max((e.degree_in(0) for e in m.col(j)), default=-1) == degs[j]
                      for j in range(k))
        if not degs_ok:
            continue
        if not is_column_reduced(m):
            continue
        if not is_minor_prime(m):
            continue
        return m


def _rand_composition(rng: random.Random, total: int, parts: int) -> list:
    """Nonnegative integers summing to total, at least one positive."""
    while True:
        cuts = [rng.randint(0, total) for _ in range(parts - 1)]
        cuts.sort()
        out = []
        prev = 0
        for c in cuts + [total]:
            out.append(c - prev)
            prev = c
        if sum(out) == total and total > 0:
            return out
