"""Command-line front end.

Code definition files are a flat key = value header (p, m, n, optional
label) followed by the generator matrix, one row per line, entries separated
by semicolons, using the polynomial grammar. Streams are text files with one
time step per line, comma-separated field elements.

Commands: analyze | distance | realize | encode | decode | dualcheck |
simulate. Exit codes: 0 success, 2 input error, 3 verification failure,
4 resource guard. Reports are deterministic given inputs and seeds (up to
the timestamp field); --json selects the machine rendering.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .code import Code, CodeError, analyze as analyze_code, correction_radius, distance
from .duality import duality_property_suite
from .field import FieldError
from .firstorder import (
    RealizationError,
    realize_KLM,
    realize_PQR,
    verify_KLM,
    verify_PQR,
)
from .modengine import VerificationError
from .poly import ParseError, Polynomial, PolyError, parse_poly, render_poly, ring
from .polymat import MatrixError, PolyMatrix, column_reduce
from .trellis import (
    ChannelSpec,
    ResourceGuardError,
    TrellisError,
    build_state_graph,
    free_distance,
    simulate as run_simulation,
    viterbi_decode,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VERIFY = 3
EXIT_GUARD = 4


class CodeFileError(ValueError):
    pass


@dataclass
class CodeFile:
    p: int
    m: int
    n: int
    label: str | None
    matrix: PolyMatrix
    digest: str


def load_code_file(path: str) -> CodeFile:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        raise CodeFileError(f"cannot read {path}: {e}") from e
    digest = hashlib.sha256(raw).hexdigest()
    header = {}
    rows = []
    for lineno, line in enumerate(raw.decode("utf-8").splitlines(), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if "=" in text and not rows:
            key, _, value = text.partition("=")
            header[key.strip().lower()] = value.strip()
            continue
        rows.append((lineno, text))
    for key in ("p", "m", "n"):
        if key not in header:
            raise CodeFileError(f"missing header field '{key}'")
        try:
            header[key] = int(header[key])
        except ValueError as e:
            raise CodeFileError(f"header field '{key}' is not an integer") from e
    p, m, n = header["p"], header["m"], header["n"]
    if len(rows) != n:
        raise CodeFileError(f"expected {n} matrix rows, found {len(rows)}")
    try:
        rg = ring(p, m)
    except (FieldError, PolyError) as e:
        raise CodeFileError(str(e)) from e
    parsed = []
    width = None
    for lineno, text in rows:
        entries = [cell.strip() for cell in text.split(";")]
        if width is None:
            width = len(entries)
        elif len(entries) != width:
            raise CodeFileError(f"line {lineno}: ragged matrix row")
        try:
            parsed.append([parse_poly(cell, rg) for cell in entries])
        except ParseError as e:
            raise CodeFileError(f"line {lineno}: {e}") from e
    matrix = PolyMatrix(rg, parsed, shape=(n, width or 0))
    return CodeFile(p=p, m=m, n=n, label=header.get("label"), matrix=matrix,
                    digest=digest)


def load_stream(path: str, p: int, width: int) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh]
    except OSError as e:
        raise CodeFileError(f"cannot read {path}: {e}") from e
    rows = []
    for lineno, ln in enumerate(lines, start=1):
        if not ln or ln.startswith("#"):
            continue
        cells = [c.strip() for c in ln.split(",")]
        if len(cells) != width:
            raise CodeFileError(f"{path} line {lineno}: expected {width} symbols")
        try:
            vals = [int(c) for c in cells]
        except ValueError as e:
            raise CodeFileError(f"{path} line {lineno}: non-integer symbol") from e
        if any(v < 0 or v >= p for v in vals):
            raise CodeFileError(f"{path} line {lineno}: symbol out of range [0, {p})")
        rows.append(vals)
    if not rows:
        raise CodeFileError(f"{path}: empty stream")
    return np.array(rows, dtype=np.int64)


def dump_stream(arr: np.ndarray) -> str:
    return "\n".join(",".join(str(int(x)) for x in row) for row in arr) + "\n"


def matrix_strings(M: PolyMatrix) -> list:
    return [[render_poly(M[i, j]) for j in range(M.cols)] for i in range(M.rows)]


def base_report(command: str, cf: CodeFile | None, **extra) -> dict:
    report = {
        "tool": "mdconv",
        "version": __version__,
        "command": command,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    if cf is not None:
        report["input_digest"] = cf.digest
        if cf.label:
            report["label"] = cf.label
    report.update(extra)
    return report


def _analytics(code: Code) -> dict:
    out = {
        "length": code.n,
        "rank": code.k,
        "rate": f"{code.k}/{code.n}",
        "free": code.free,
        "minor_prime": code.minor_prime,
    }
    if code.delta is not None:
        out["delta"] = code.delta
    pc = code.parity_check() if code.encoder is not None else None
    out["parity_check"] = matrix_strings(pc) if pc is not None else None
    return out


def cmd_analyze(args) -> tuple:
    cf = load_code_file(args.file)
    code = analyze_code(cf.matrix)
    return base_report("analyze", cf, results=_analytics(code)), EXIT_OK


def cmd_distance(args) -> tuple:
    cf = load_code_file(args.file)
    code = analyze_code(cf.matrix)
    if code.k == 0:
        raise CodeError("no nonzero codeword: the zero code has no distance")
    if args.mode == "exact":
        value, certified = distance(code, "exact_1d")
    else:
        if args.bound is None:
            raise CodeFileError("bounded mode needs --bound")
        value, certified = distance(code, "bounded", bound=args.bound)
    results = {"distance": value, "certified": certified, "mode": args.mode}
    if certified:
        results["t"] = correction_radius(value)
    if args.mode == "bounded":
        results["bound"] = args.bound
    return base_report("distance", cf, results=results), EXIT_OK


def cmd_realize(args) -> tuple:
    cf = load_code_file(args.file)
    code = analyze_code(cf.matrix)
    if args.form == "pqr":
        rep = realize_PQR(code)
        verified, reason = verify_PQR(code, rep)
    else:
        rep = realize_KLM(code)
        verified, reason = verify_KLM(code, rep)
    results = rep.as_dict()
    results["verified"] = verified
    results["reason"] = reason
    report = base_report("realize", cf, results=results)
    return report, EXIT_OK if verified else EXIT_VERIFY


def _prepared_graph(code: Code):
    """Column-reduced state graph plus the unimodular change of message
    coordinates back to the code's encoder."""
    if not code.free or code.encoder is None:
        raise CodeError("code has no encoder")
    reduced, u, _ = column_reduce(code.encoder)
    return build_state_graph(reduced), u


def cmd_encode(args) -> tuple:
    cf = load_code_file(args.file)
    code = analyze_code(cf.matrix)
    if not code.free or code.encoder is None:
        raise CodeError("code has no encoder; cannot encode")
    enc = code.encoder
    msg_steps = load_stream(args.message, cf.p, enc.cols)
    rg = enc.ring
    if rg.nvars != 1:
        raise CodeError("stream encoding is one-variable only")
    message = tuple(
        Polynomial.from_terms(rg, [((t,), int(msg_steps[t, j]))
                                   for t in range(msg_steps.shape[0])])
        for j in range(enc.cols))
    word = enc.mul_vec(message)
    total = msg_steps.shape[0] + max(enc.max_deg_vec())
    stream = np.zeros((total, code.n), dtype=np.int64)
    for i, f in enumerate(word):
        for mono, c in f.terms.items():
            if mono[0] < total:
                stream[mono[0], i] = c
    text = dump_stream(stream)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    results = {
        "message_len": int(msg_steps.shape[0]),
        "stream_len": total,
        "codeword": [render_poly(f) for f in word],
        "stream": [[int(x) for x in row] for row in stream],
    }
    return base_report("encode", cf, results=results), EXIT_OK


def cmd_decode(args) -> tuple:
    cf = load_code_file(args.file)
    code = analyze_code(cf.matrix)
    sg, u = _prepared_graph(code)
    received = load_stream(args.received, cf.p, code.n)
    decoded, msg_steps, dist_found = viterbi_decode(sg, received)
    rg = code.ring
    reduced_msg = tuple(
        Polynomial.from_terms(rg, [((t,), int(msg_steps[t, j]))
                                   for t in range(msg_steps.shape[0])])
        for j in range(sg.k))
    message = u.mul_vec(reduced_msg)  # coordinates of the code's encoder
    text = dump_stream(decoded)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    results = {
        "stream_len": int(received.shape[0]),
        "hamming_distance": dist_found,
        "message": [render_poly(f) for f in message],
        "decoded_stream": [[int(x) for x in row] for row in decoded],
    }
    return base_report("decode", cf, results=results), EXIT_OK


def cmd_dualcheck(args) -> tuple:
    report = duality_property_suite(seed=args.seed, trials=args.trials)
    code = EXIT_OK if report["failures_total"] == 0 else EXIT_VERIFY
    return base_report("dualcheck", None, results=report, seed=args.seed), code


def cmd_simulate(args) -> tuple:
    cf = load_code_file(args.file)
    code = analyze_code(cf.matrix)
    sg, _ = _prepared_graph(code)
    chan = ChannelSpec(p=cf.p, eps=args.eps, seed=args.seed)
    stats = run_simulation(sg, chan, args.len, args.trials)
    report = base_report("simulate", cf, results=stats, seed=args.seed)
    return report, EXIT_OK


def cmd_freedist(args) -> tuple:
    # internal convenience used by tests; equivalent to distance --mode exact
    cf = load_code_file(args.file)
    code = analyze_code(cf.matrix)
    sg, _ = _prepared_graph(code)
    return base_report("freedist", cf, results={"distance": free_distance(sg)}), EXIT_OK


def render_human(report: dict, indent: int = 0) -> str:
    lines = []

    def walk(obj, depth):
        pad = "  " * depth
        if isinstance(obj, dict):
            for key in obj:
                val = obj[key]
                if isinstance(val, (dict, list)) and val:
                    lines.append(f"{pad}{key}:")
                    walk(val, depth + 1)
                else:
                    lines.append(f"{pad}{key}: {val if val != [] else '[]'}")
        elif isinstance(obj, list):
            for val in obj:
                if isinstance(val, (dict, list)):
                    lines.append(f"{pad}-")
                    walk(val, depth + 1)
                else:
                    lines.append(f"{pad}- {val}")
        else:
            lines.append(f"{pad}{obj}")

    walk(report, indent)
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mdconv",
        description="Exact toolkit for multidimensional convolutional codes.")
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_file(p):
        p.add_argument("file", help="code definition file")

    p = sub.add_parser("analyze", help="rank, rate, freeness, parity check")
    add_file(p)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("distance", help="code distance")
    add_file(p)
    p.add_argument("--mode", choices=["exact", "bounded"], default="exact")
    p.add_argument("--bound", type=int, default=None,
                   help="per-variable message degree bound (bounded mode)")
    p.set_defaults(fn=cmd_distance)

    p = sub.add_parser("realize", help="first-order representation (one variable)")
    add_file(p)
    p.add_argument("--form", choices=["pqr", "klm"], required=True)
    p.set_defaults(fn=cmd_realize)

    p = sub.add_parser("encode", help="encode a message stream file")
    add_file(p)
    p.add_argument("message", help="message stream file (one step per line)")
    p.add_argument("--out", default=None, help="write the codeword stream here")
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("decode", help="Viterbi-decode a received stream file")
    add_file(p)
    p.add_argument("received", help="received stream file (one step per line)")
    p.add_argument("--out", default=None, help="write the decoded stream here")
    p.set_defaults(fn=cmd_decode)

    p = sub.add_parser("dualcheck", help="randomized duality property suite")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(fn=cmd_dualcheck)

    p = sub.add_parser("simulate", help="seeded channel simulation")
    add_file(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--len", type=int, required=True, help="message steps per frame")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(fn=cmd_simulate)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        report, exit_code = args.fn(args)
    except (CodeFileError, ParseError, PolyError, MatrixError, FieldError,
            CodeError, RealizationError) as e:
        _emit({"tool": "mdconv", "version": __version__, "error": str(e),
               "exit_code": EXIT_INPUT}, args.json)
        return EXIT_INPUT
    except ResourceGuardError as e:
        _emit({"tool": "mdconv", "version": __version__, "error": str(e),
               "exit_code": EXIT_GUARD}, args.json)
        return EXIT_GUARD
    except (VerificationError, TrellisError) as e:
        _emit({"tool": "mdconv", "version": __version__, "error": str(e),
               "exit_code": EXIT_VERIFY}, args.json)
        return EXIT_VERIFY
    _emit(report, args.json)
    return exit_code


def _emit(report: dict, as_json: bool):
    if as_json:
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write(render_human(report))


if __name__ == "__main__":
    sys.exit(main())
