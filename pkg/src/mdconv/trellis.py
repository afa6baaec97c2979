"""State graphs for one-variable encoders: exact free distance by shortest
path, maximum-likelihood (Viterbi) decoding with zero-tail termination, and
seeded channel simulation.

The state is the shift-register content of the column-reduced encoder: one
register chain per encoder column, chain length = column degree. Walking the
graph from the zero state with a message stream plus a zero tail emits
exactly the coefficient stream of the polynomial encoding.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .code import Code
from .poly import Polynomial, Ring
from .polymat import PolyMatrix, is_column_reduced

STATE_GUARD = 1 << 20
TABLE_GUARD = 1 << 24


class TrellisError(ValueError):
    pass


class ResourceGuardError(TrellisError):
    """Desk-scale resource guard exceeded (state or table count)."""


@dataclass(frozen=True)
class ChannelSpec:
    """Memoryless symbol channel: each symbol is replaced by a uniformly
    random different field element with probability eps."""

    p: int
    eps: float
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.eps <= 1.0:
            raise TrellisError("symbol error probability must be in [0, 1]")


class StateGraph:
    """Deterministic, total transition structure of a column-reduced encoder.

    States are mixed-radix integers over the register digits; transition
    tables are dense numpy arrays consumed by the Viterbi kernels."""

    def __init__(self, encoder: PolyMatrix):
        ring = encoder.ring
        if ring.nvars != 1:
            raise TrellisError("state graphs need a one-variable encoder")
        if not is_column_reduced(encoder):
            raise TrellisError("encoder must be column-reduced")
        p = ring.p
        n, k = encoder.rows, encoder.cols
        degs = [max((encoder[i, j].degree_in(0) for i in range(n)), default=-1)
                for j in range(k)]
        if any(d < 0 for d in degs):
            raise TrellisError("zero column in encoder")
        delta = sum(degs)
        if p ** delta > STATE_GUARD:
            raise ResourceGuardError(
                f"{p}^{delta} states exceed the guard of {STATE_GUARD}")
        S = p ** delta
        A = p ** k
        if S * A * max(n, 1) > TABLE_GUARD:
            raise ResourceGuardError("transition tables exceed the resource guard")

        # register slots (j, i), i = 1..deg_j, digit value = input j from i steps ago
        slots = [(j, i) for j in range(k) for i in range(1, degs[j] + 1)]
        coeff = np.zeros((n, k, max(degs) + 1), dtype=np.int64)
        for i in range(n):
            for j in range(k):
                for d, c in encoder[i, j].terms.items():
                    coeff[i, j, d[0]] = c

        state_digits = self._digits(np.arange(S, dtype=np.int64), p, delta)  # (S, delta)
        input_digits = self._digits(np.arange(A, dtype=np.int64), p, k)      # (A, k)

        # output = G_0 u + sum over register slots of g_(j,i) * digit
        w_reg = np.zeros((delta, n), dtype=np.int64)
        for t, (j, i) in enumerate(slots):
            w_reg[t] = coeff[:, j, i]
        w_in = np.zeros((k, n), dtype=np.int64)
        for j in range(k):
            w_in[j] = coeff[:, j, 0]
        out = (state_digits @ w_reg)[:, None, :] + (input_digits @ w_in)[None, :, :]
        self.out_labels = (out % p).astype(np.int64)  # (S, A, n)

        # next state: register chains shift by one, inputs enter slot (j, 1)
        place = {si: p ** t for t, si in enumerate(slots)}
        v_state = np.zeros(delta, dtype=np.int64)
        for t, (j, i) in enumerate(slots):
            if i < degs[j]:
                v_state[t] = place[(j, i + 1)]
        v_in = np.zeros(k, dtype=np.int64)
        for j in range(k):
            if degs[j] >= 1:
                v_in[j] = place[(j, 1)]
        self.next_state = (state_digits @ v_state)[:, None] + (input_digits @ v_in)[None, :]
        self.next_state = self.next_state.astype(np.int64)  # (S, A)

        self.ring: Ring = ring
        self.p = p
        self.n = n
        self.k = k
        self.delta = delta
        self.degs = tuple(degs)
        self.num_states = S
        self.num_inputs = A
        self.encoder = encoder

    @staticmethod
    def _digits(values: np.ndarray, p: int, width: int) -> np.ndarray:
        out = np.zeros((values.shape[0], width), dtype=np.int64)
        v = values.copy()
        for t in range(width):
            out[:, t] = v % p
            v //= p
        return out

    def input_index(self, symbols) -> int:
        """Mixed-radix index of an input vector u in F_p^k."""
        idx = 0
        for j in reversed(range(self.k)):
            idx = idx * self.p + int(symbols[j])
        return idx

    def input_symbols(self, index: int) -> np.ndarray:
        out = np.zeros(self.k, dtype=np.int64)
        for j in range(self.k):
            out[j] = index % self.p
            index //= self.p
        return out

    def walk(self, message_steps: np.ndarray) -> np.ndarray:
        """Emit the output stream for a message stream (T, k), starting and
        ending bookkeeping left to the caller (append a zero tail of
        max(degs) steps to return to the zero state)."""
        msg = np.asarray(message_steps, dtype=np.int64) % self.p
        T = msg.shape[0]
        out = np.zeros((T, self.n), dtype=np.int64)
        s = 0
        for t in range(T):
            a = self.input_index(msg[t])
            out[t] = self.out_labels[s, a]
            s = int(self.next_state[s, a])
        return out

    @property
    def tail_len(self) -> int:
        return max(self.degs) if self.degs else 0


def build_state_graph(code_or_encoder) -> StateGraph:
    """State graph of a free one-variable code; the encoder must already be
    column-reduced (column_reduce provides one for any encoder)."""
    if isinstance(code_or_encoder, Code):
        code = code_or_encoder
        if not code.free or code.encoder is None:
            raise TrellisError("code has no encoder")
        return StateGraph(code.encoder)
    return StateGraph(code_or_encoder)


def free_distance(sg: StateGraph) -> int:
    """Exact code distance: minimum-weight path that leaves the zero state
    once and returns, excluding the all-zero self-loop (Dijkstra over label
    weights; deterministic)."""
    weights = (sg.out_labels != 0).sum(axis=2)  # (S, A)
    best_answer = None
    dist = {}
    heap = []
    for a in range(1, sg.num_inputs):
        w = int(weights[0, a])
        tgt = int(sg.next_state[0, a])
        if tgt == 0:
            if w == 0:
                raise TrellisError("zero-weight nonzero loop: encoder not injective")
            best_answer = w if best_answer is None else min(best_answer, w)
        elif w < dist.get(tgt, 1 << 60):
            dist[tgt] = w
            heapq.heappush(heap, (w, tgt))
    while heap:
        d, s = heapq.heappop(heap)
        if d > dist.get(s, 1 << 60):
            continue
        if best_answer is not None and d >= best_answer:
            continue
        for a in range(sg.num_inputs):
            w2 = d + int(weights[s, a])
            tgt = int(sg.next_state[s, a])
            if tgt == 0:
                best_answer = w2 if best_answer is None else min(best_answer, w2)
            elif w2 < dist.get(tgt, 1 << 60):
                dist[tgt] = w2
                heapq.heappush(heap, (w2, tgt))
    if best_answer is None:
        raise TrellisError("no nonzero zero-to-zero path found")
    return best_answer


def viterbi_decode(sg: StateGraph, received: np.ndarray):
    """ML decoding of a received stream (T, n) under the zero-tail convention:
    the closest output stream over all zero-to-zero paths of length T.

    Returns (codeword_stream (T, n), message_steps (T, k), distance). Ties
    broken deterministically: smallest previous state index, then smallest
    input symbol index."""
    rec = np.asarray(received, dtype=np.int64) % sg.p
    if rec.ndim != 2 or rec.shape[1] != sg.n:
        raise TrellisError(f"received stream must be (T, {sg.n})")
    T = rec.shape[0]
    if T < sg.tail_len:
        raise TrellisError("stream shorter than the termination tail")
    metric, bp = _kernels.viterbi_forward(sg.next_state, sg.out_labels, rec)
    if metric[0] >= _kernels.INF:
        raise TrellisError("no zero-to-zero path of this length")
    msg = np.zeros((T, sg.k), dtype=np.int64)
    out = np.zeros((T, sg.n), dtype=np.int64)
    cur = 0
    for t in range(T - 1, -1, -1):
        codev = int(bp[t, cur])
        prev, a = divmod(codev, sg.num_inputs)
        msg[t] = sg.input_symbols(a)
        out[t] = sg.out_labels[prev, a]
        cur = prev
    if cur != 0:
        raise TrellisError("traceback did not reach the zero state")
    return out, msg, int(metric[0])


def simulate(code_or_graph, channel: ChannelSpec, message_len: int, trials: int) -> dict:
    """Seeded end-to-end runs: random message -> walk -> symbol channel ->
    Viterbi. Reports symbol error rates before and after decoding, the frame
    error rate, and corrected/miscorrected counts. Bit-for-bit reproducible
    from the seed (per-trial derived seeds)."""
    sg = code_or_graph if isinstance(code_or_graph, StateGraph) else build_state_graph(code_or_graph)
    if channel.p != sg.p:
        raise TrellisError("channel/field mismatch")
    if trials < 1 or message_len < 1:
        raise TrellisError("need at least one trial and one message step")
    tail = sg.tail_len
    total_steps = message_len + tail
    nsym = total_steps * sg.n
    stats = {
        "trials": trials,
        "message_len": message_len,
        "stream_len": total_steps,
        "eps": channel.eps,
        "seed": channel.seed,
        "backend": _kernels.backend(),
        "symbols_total": trials * nsym,
        "symbol_errors_pre": 0,
        "symbol_errors_post": 0,
        "frames_corrupted": 0,
        "frames_corrected": 0,
        "frames_wrong": 0,
    }
    children = np.random.SeedSequence(channel.seed).spawn(trials)
    for i in range(trials):
        rng = np.random.default_rng(children[i])
        msg = rng.integers(0, sg.p, size=(message_len, sg.k), dtype=np.int64)
        steps = np.vstack([msg, np.zeros((tail, sg.k), dtype=np.int64)])
        sent = sg.walk(steps)
        flips = rng.random(size=sent.shape) < channel.eps
        offsets = rng.integers(1, sg.p, size=sent.shape, dtype=np.int64) if sg.p > 1 else 0
        received = np.where(flips, (sent + offsets) % sg.p, sent)
        decoded, _, _ = viterbi_decode(sg, received)
        pre = int(flips.sum())
        post = int((decoded != sent).sum())
        stats["symbol_errors_pre"] += pre
        stats["symbol_errors_post"] += post
        if pre:
            stats["frames_corrupted"] += 1
            if post == 0:
                stats["frames_corrected"] += 1
        if post:
            stats["frames_wrong"] += 1
    stats["ser_pre"] = stats["symbol_errors_pre"] / stats["symbols_total"]
    stats["ser_post"] = stats["symbol_errors_post"] / stats["symbols_total"]
    stats["frame_error_rate"] = stats["frames_wrong"] / trials
    return stats
