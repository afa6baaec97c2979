"""Hot numeric kernels for trellis decoding.

The Viterbi forward pass dominates decode/simulation runtime, so it ships in
two bit-identical implementations: a numba-jitted one and a pure-numpy one.
Selection is via the MDCONV_KERNELS environment variable: "numba", "numpy",
or "auto" (default: numba when importable, else numpy). Both use the same
combined-key arithmetic, so metrics, backpointers, and decoded streams agree
exactly, including tie-breaking (smallest previous state, then smallest
input symbol). benchmarks/bench_kernels.py compares the two.
"""

from __future__ import annotations

import os

import numpy as np

INF = np.int64(1) << 40

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap


def backend() -> str:
    """Resolved kernel backend name."""
    choice = os.environ.get("MDCONV_KERNELS", "auto").lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("MDCONV_KERNELS=numba but numba is not importable")
        return "numba"
    if choice == "auto":
        return "numba" if HAS_NUMBA else "numpy"
    raise RuntimeError(f"unknown MDCONV_KERNELS value {choice!r}")


def viterbi_forward_numpy(next_state: np.ndarray, out_labels: np.ndarray,
                          received: np.ndarray):
    """Forward DP over all states. Returns (final metrics (S,), backpointers
    (T, S) encoding prev_state * A + input). Unreachable states carry metrics
    >= INF. Tie-break: smallest combined key = smallest (metric, prev, input)."""
    S, A = next_state.shape
    T = received.shape[0]
    SA = S * A
    metric = np.full(S, INF, dtype=np.int64)
    metric[0] = 0
    bp = np.zeros((T, S), dtype=np.int64)
    flat_next = next_state.reshape(SA)
    idx = np.arange(SA, dtype=np.int64)
    sentinel = (INF + np.int64(T + 1) * out_labels.shape[2]) * SA + SA
    for t in range(T):
        cost = (out_labels != received[t][None, None, :]).sum(axis=2).astype(np.int64)
        key = (metric[:, None] + cost).reshape(SA) * SA + idx
        best = np.full(S, sentinel, dtype=np.int64)
        np.minimum.at(best, flat_next, key)
        metric = best // SA
        bp[t] = best % SA
    return metric, bp


@njit(cache=True)
def _viterbi_forward_jit(next_state, out_labels, received):  # pragma: no cover
    S, A = next_state.shape
    T = received.shape[0]
    n = received.shape[1]
    SA = S * A
    inf = np.int64(1) << 40
    sentinel = (inf + np.int64(T + 1) * n) * SA + SA
    metric = np.full(S, inf, dtype=np.int64)
    metric[0] = 0
    bp = np.zeros((T, S), dtype=np.int64)
    best = np.empty(S, dtype=np.int64)
    for t in range(T):
        for s in range(S):
            best[s] = sentinel
        for s in range(S):
            ms = metric[s]
            base = s * A
            for a in range(A):
                c = np.int64(0)
                for i in range(n):
                    if out_labels[s, a, i] != received[t, i]:
                        c += 1
                key = (ms + c) * SA + base + a
                tgt = next_state[s, a]
                if key < best[tgt]:
                    best[tgt] = key
        for s in range(S):
            metric[s] = best[s] // SA
            bp[t, s] = best[s] % SA
    return metric, bp


def viterbi_forward_numba(next_state: np.ndarray, out_labels: np.ndarray,
                          received: np.ndarray):
    if not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return _viterbi_forward_jit(
        np.ascontiguousarray(next_state, dtype=np.int64),
        np.ascontiguousarray(out_labels, dtype=np.int64),
        np.ascontiguousarray(received, dtype=np.int64))


def viterbi_forward(next_state: np.ndarray, out_labels: np.ndarray,
                    received: np.ndarray):
    if backend() == "numba":
        return viterbi_forward_numba(next_state, out_labels, received)
    return viterbi_forward_numpy(next_state, out_labels, received)
