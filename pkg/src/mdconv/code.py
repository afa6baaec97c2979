"""Codes as submodules of D^n: analytics, weight/distance, encoding,
syndromes, and an exhaustive coset-leader decoding oracle."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .modengine import ModuleBasis, freeness_certificate, parity_check, vec_is_zero, vec_sub
from .poly import Polynomial, Ring, grlex_key
from .polymat import PolyMatrix, hermite_canonical, is_minor_prime, minors, rank_ff

ENUM_GUARD = 1 << 22  # cap on exhaustive message enumerations


class CodeError(ValueError):
    pass


@dataclass
class Codeword:
    """A vector in D^n sharing the code's ring context. Membership is not an
    invariant; ``valid`` records the result of a membership check, when one
    was done."""

    vector: tuple
    valid: bool | None = None


def _as_vector(w):
    return w.vector if isinstance(w, Codeword) else tuple(w)


class Code:
    """A submodule of D^n presented by a generator matrix, with cached
    analytics: rank, rate, freeness, minor-primeness and degree (one
    variable), plus the canonical module basis used for syndromes."""

    def __init__(self, G: PolyMatrix):
        if G.rows < 1:
            raise CodeError("code length must be >= 1")
        self.ring: Ring = G.ring
        self.n: int = G.rows
        self.G: PolyMatrix = G
        self.basis: ModuleBasis = ModuleBasis.from_matrix(G)
        self.k: int = rank_ff(G)
        self.rate: Fraction = Fraction(self.k, self.n)
        cert = freeness_certificate(G)
        self.free: bool = cert["free"]
        self.freeness_witness = cert["witness"]

        # an encoder: the matrix itself when it has full column rank, else a
        # Hermite-extracted one in one variable; none otherwise (no basis
        # synthesis for m >= 2)
        self.encoder: PolyMatrix | None = None
        if self.k == G.cols and self.k > 0:
            self.encoder = G
        elif self.ring.nvars == 1 and self.k > 0:
            self.encoder = hermite_canonical(G)

        self.minor_prime: bool | None = None
        if self.encoder is not None:
            self.minor_prime = is_minor_prime(self.encoder)

        self.delta: int | None = None
        if self.ring.nvars == 1 and self.encoder is not None:
            self.delta = max_minor_degree(self.encoder)
        elif self.ring.nvars == 1 and self.k == 0:
            self.delta = 0

    def parity_check(self) -> PolyMatrix | None:
        if self.encoder is None:
            return None
        return parity_check(self.encoder)

    def contains(self, w) -> bool:
        return self.basis.contains(_as_vector(w))

    def __repr__(self):
        return (f"<code n={self.n} k={self.k} rate={self.rate} free={self.free} "
                f"over {self.ring}>")


def analyze(G: PolyMatrix) -> Code:
    return Code(G)


def max_minor_degree(encoder: PolyMatrix) -> int:
    """Max total degree over the full-size minors of a full-column-rank matrix."""
    k = encoder.cols
    best = -1
    for mn in minors(encoder, k):
        best = max(best, mn.total_degree())
    if best < 0:
        raise CodeError("all full-size minors vanish; not an encoder")
    return best


def weight(w) -> int:
    """Number of nonzero field coefficients over all positions and monomials."""
    return sum(len(comp.terms) for comp in _as_vector(w))


def hamming_distance(w1, w2) -> int:
    return weight(vec_sub(_as_vector(w1), _as_vector(w2)))


def correction_radius(d: int) -> int:
    """floor((d-1)/2): errors up to this weight decode to the unique nearest codeword."""
    if d < 1:
        raise CodeError("distance must be >= 1")
    return (d - 1) // 2


def encode(code: Code, message) -> Codeword:
    if not code.free or code.encoder is None:
        raise CodeError("code has no encoder (not free, or none synthesized)")
    message = tuple(message)
    if len(message) != code.encoder.cols:
        raise CodeError(f"message length {len(message)} != rank {code.encoder.cols}")
    return Codeword(code.encoder.mul_vec(message), valid=True)


def syndrome(code: Code, y) -> tuple:
    """Canonical coset representative of y modulo the code (zero iff y is a codeword)."""
    return code.basis.normal_form(_as_vector(y))


def _box_monomials(ring: Ring, bound) -> list:
    """Monomials with per-variable degree <= bound, ascending grlex."""
    if isinstance(bound, int):
        bound = (bound,) * ring.nvars
    monos = list(product(*(range(b + 1) for b in bound)))
    monos.sort(key=grlex_key)
    return monos


def _message_slots(G: PolyMatrix, bound):
    """(slot basis codewords, slot descriptors) for messages p in D^cols with
    per-variable degree <= bound; slot (j, alpha) contributes p-coefficient
    alpha in component j."""
    ring = G.ring
    monos = _box_monomials(ring, bound)
    slots = []
    vectors = []
    for j in range(G.cols):
        col = G.col(j)
        for mono in monos:
            slots.append((j, mono))
            vectors.append(tuple(f.shift(mono) for f in col))
    return slots, vectors


class _IncrementalWord:
    """Mutable D^n accumulator with O(1) weight queries for the enumeration
    kernels: tracks per-slot coefficient tables and the nonzero count."""

    def __init__(self, ring: Ring, n: int):
        self.p = ring.p
        self.tables = [dict() for _ in range(n)]
        self.weight = 0

    def add(self, vec, c: int):
        p = self.p
        for i, comp in enumerate(vec):
            tab = self.tables[i]
            for mono, v in comp.terms.items():
                new = (tab.get(mono, 0) + c * v) % p
                if new:
                    if mono not in tab:
                        self.weight += 1
                    tab[mono] = new
                else:
                    if mono in tab:
                        self.weight -= 1
                        del tab[mono]


def distance(code: Code, mode: str = "exact_1d", bound=None) -> tuple:
    """(value, certified): the code distance, exactly for one-variable codes
    (trellis search), or an enumeration upper bound over messages within a
    per-variable degree box otherwise."""
    if mode == "exact_1d":
        if code.ring.nvars != 1:
            raise CodeError("exact_1d needs a one-variable code")
        if not code.free or code.encoder is None or code.k == 0:
            raise CodeError("exact_1d needs a free code with at least one generator")
        from . import trellis as _trellis
        from .polymat import column_reduce
        enc, _, profile = column_reduce(code.encoder)
        delta = sum(profile.degrees)
        if delta == 0:
            # block code: minimum over single-step inputs
            p = code.ring.p
            if p ** code.k > ENUM_GUARD:
                raise CodeError("block enumeration exceeds the resource guard")
            best = None
            for msg in product(range(p), repeat=code.k):
                if not any(msg):
                    continue
                w = weight(enc.mul_vec(tuple(Polynomial.constant(code.ring, c) for c in msg)))
                best = w if best is None else min(best, w)
            return best, True
        sg = _trellis.build_state_graph(enc)
        return _trellis.free_distance(sg), True

    if mode == "bounded":
        if bound is None:
            raise CodeError("bounded mode needs a degree bound")
        return bounded_distance(code, bound), False

    raise CodeError(f"unknown distance mode {mode!r}")


def bounded_distance(code: Code, bound) -> int:
    """Min weight over nonzero codewords G*p with message degrees within the
    per-variable box; an upper bound on the code distance. Depth-first
    enumeration with incremental weight bookkeeping."""
    G = code.G
    ring = code.ring
    p = ring.p
    slots, vectors = _message_slots(G, bound)
    total = p ** len(slots)
    if total > ENUM_GUARD:
        raise CodeError(f"message box of size {total} exceeds the resource guard")
    acc = _IncrementalWord(ring, code.n)
    best = [None]

    def rec(s: int):
        if s == len(slots):
            w = acc.weight
            if w > 0 and (best[0] is None or w < best[0]):
                best[0] = w
            return
        vec = vectors[s]
        rec(s + 1)
        for _ in range(1, p):
            acc.add(vec, 1)
            rec(s + 1)
        acc.add(vec, -(p - 1))

    rec(0)
    if best[0] is None:
        raise CodeError("no nonzero codeword in the search box (zero code?)")
    return best[0]


def _dense_stream_key(vec, region, ring: Ring):
    """Dense coefficient stream over the region box, ascending grlex, for the
    deterministic decode tie-break."""
    monos = _box_monomials(ring, region)
    return tuple(comp.terms.get(mono, 0) for mono in monos for comp in vec)


def coset_leader_decode(code: Code, y, search_bound) -> Codeword:
    """Exhaustive syndrome decoding oracle: returns y - e with e the smallest-
    weight element of y + (codewords with messages within the search box),
    ties broken by the lexicographically smallest coefficient stream of e.

    Exponential in the box; intended as a desk-scale ground-truth oracle.
    When weight(e) <= correction_radius(dist) the result is the unique
    nearest codeword.
    """
    yv = _as_vector(y)
    if len(yv) != code.n:
        raise CodeError("received word length mismatch")
    ring = code.ring
    p = ring.p
    slots, vectors = _message_slots(code.G, search_bound)
    total = p ** len(slots)
    if total > ENUM_GUARD:
        raise CodeError(f"message box of size {total} exceeds the resource guard")

    region = [0] * ring.nvars
    for comp in yv:
        for i, d in enumerate(comp.deg_vec()):
            region[i] = max(region[i], d)
    gdeg = code.G.max_deg_vec()
    b = (search_bound,) * ring.nvars if isinstance(search_bound, int) else tuple(search_bound)
    region = tuple(max(region[i], gdeg[i] + b[i]) for i in range(ring.nvars))

    best = None  # (weight, stream key, codeword)
    for assignment in product(range(p), repeat=len(slots)):
        cw = [Polynomial.zero(ring)] * code.n
        for val, vec in zip(assignment, vectors):
            if val:
                for i in range(code.n):
                    cw[i] = cw[i] + vec[i].scale(val)
        e = vec_sub(yv, tuple(cw))
        w = weight(e)
        if best is not None and w > best[0]:
            continue
        key = _dense_stream_key(e, region, ring)
        cand = (w, key, tuple(cw))
        if best is None or cand[:2] < best[:2]:
            best = cand
    return Codeword(best[2], valid=True)
