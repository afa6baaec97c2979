"""Randomized property suite for the duality between codes and behaviors.

Every check is an exact statement at the truncated scale: boxes are sized per
check from the degrees of everything involved, including the degrees of the
membership witnesses, so that the asserted identities are theorems on the
regions where they are tested. A failure therefore witnesses an
implementation bug and is reported with its instance data.

The membership/annihilation equivalences are evaluated at the origin
coefficient: a member annihilates every truncated solution there once the box
exceeds the witness degrees, and a non-member always has a truncated witness
with a nonzero origin pairing (shift the full witness so its nonzero
coefficient lands at the origin, then restrict).

The operator-side completeness statements that genuinely need the infinite
trajectory space (the forward cogenerator directions) are recorded as not
checked rather than approximated.
"""

from __future__ import annotations

import math
import random

import numpy as np

from . import modp
from .behavior import (
    TruncatedSeries,
    apply_matrix,
    dual_of_code,
    f_pairing,
    pairing,
    region_nonempty,
    region_sub,
    scalar_action,
    series_add,
    span_matrix,
    truncated_kernel,
    _box_shape,
    _flat_index,
    _region_points,
)
from .modengine import ModuleBasis, solve_image_preimage_full, syzygies
from .poly import Polynomial, Ring, ring as make_ring, shift_mul
from .polymat import PolyMatrix, rank_ff
from .sampling import rand_matrix, rand_poly, rand_vector

NOT_CHECKED = [
    "exactness transfer (full image direction) needs the cogenerator property",
    "kernel-inclusion factorization, forward direction, needs the cogenerator property",
]


def _deg_vec_of(obj):
    """Componentwise max degree vector of a matrix, polynomial, or vector."""
    if isinstance(obj, PolyMatrix):
        return obj.max_deg_vec()
    if isinstance(obj, Polynomial):
        return obj.deg_vec()
    out = None
    for f in obj:
        d = f.deg_vec()
        out = d if out is None else tuple(max(a, b) for a, b in zip(out, d))
    return out


def _deg_sum(*objs):
    total = None
    for o in objs:
        if o is None:
            continue
        d = _deg_vec_of(o)
        total = d if total is None else tuple(a + b for a, b in zip(total, d))
    return total


def _box(margin, *objs):
    d = _deg_sum(*objs)
    return tuple(x + margin for x in d)


def _rand_series(rng: random.Random, ring: Ring, n: int, box) -> TruncatedSeries:
    shape = (n,) + tuple(b + 1 for b in box)
    data = np.array([rng.randrange(ring.p) for _ in range(math.prod(shape))],
                    dtype=np.int64).reshape(shape)
    return TruncatedSeries(ring, data)


def _transpose_times_vec(M: PolyMatrix, v) -> tuple:
    """M^T v: component j is sum_i M[i][j] v_i."""
    out = []
    for j in range(M.cols):
        acc = Polynomial.zero(M.ring)
        for i in range(M.rows):
            if not M[i, j].is_zero() and not v[i].is_zero():
                acc = acc + M[i, j] * v[i]
        out.append(acc)
    return tuple(out)


def _module_of(gens_matrix: PolyMatrix, n: int, ring: Ring) -> ModuleBasis:
    if gens_matrix.cols:
        return ModuleBasis.from_matrix(gens_matrix)
    return ModuleBasis(ring, n, [tuple(Polynomial.zero(ring) for _ in range(n))])


def _member_witness(mod: ModuleBasis, pvec):
    """(is_member, combination over mod.generators or None)."""
    nf, comb = mod.normal_form_with_witness(pvec)
    if any(not c.is_zero() for c in nf):
        return False, None
    return True, comb


def _combine_columns(M: PolyMatrix, comb) -> tuple:
    """M @ comb for a combination vector given as a tuple of polynomials."""
    return M.mul_vec(tuple(comb)) if M.cols else tuple()


class _Recorder:
    def __init__(self):
        self.checks = {}
        self.failures = []

    def record(self, trial: int, name: str, ok: bool, detail: str = ""):
        slot = self.checks.setdefault(name, {"passed": 0, "failed": 0})
        if ok:
            slot["passed"] += 1
        else:
            slot["failed"] += 1
            self.failures.append({"trial": trial, "check": name, "detail": detail})


def _origin(m: int) -> tuple:
    return (0,) * m


def _vanishes_at_origin(pvec, series_list, mapper=None) -> bool:
    """All origin coefficients of <p, map(s)> are zero."""
    for s in series_list:
        t = mapper(s) if mapper is not None else s
        pr = pairing(pvec, t)
        if pr.coeff_at(0, _origin(len(pr.box))) != 0:
            return False
    return True


def duality_property_suite(seed: int, trials: int, margin: int = 3) -> dict:
    """Run the randomized duality checks; returns a JSON-serializable report.

    Instances: p in {2,3,5}, one or two variables, lengths <= 3, entry
    degrees <= 2. Zero failures expected; any failure carries witness data.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rec = _Recorder()
    max_box = 0
    for trial in range(trials):
        rng = random.Random(seed * 1_000_003 + trial)
        box_used = _run_trial(rng, rec, trial, margin)
        max_box = max(max_box, box_used)
    return {
        "suite": "duality",
        "seed": seed,
        "trials": trials,
        "margin": margin,
        "max_box_entry": max_box,
        "checks": {k: rec.checks[k] for k in sorted(rec.checks)},
        "failures": rec.failures,
        "failures_total": len(rec.failures),
        "not_checked": NOT_CHECKED,
    }


def _run_trial(rng: random.Random, rec: _Recorder, trial: int, margin: int) -> int:
    p = rng.choice([2, 3, 5])
    m = rng.choice([1, 2])
    rg = make_ring(p, m)
    maxdeg = 2
    boxes = [0]

    def track(box):
        boxes.append(max(box))
        return box

    # --- scalar-action module axioms ------------------------------------
    p1 = rand_poly(rng, rg, maxdeg)
    p2 = rand_poly(rng, rg, maxdeg)
    box = track(_box(margin, p1, p2))
    f = _rand_series(rng, rg, 1, box)
    lhs = scalar_action(p1 * p2, f)
    rhs = scalar_action(p1, scalar_action(p2, f))
    rec.record(trial, "scalar_action_associative",
               lhs.equal_on(rhs, region_sub(box, _deg_sum(p1, p2))), f"p={p} m={m}")
    lhs2 = scalar_action(p1 + p2, f)
    rhs2 = series_add(scalar_action(p1, f), scalar_action(p2, f))
    rec.record(trial, "scalar_action_additive",
               lhs2.equal_on(rhs2, rhs2.valid), f"p={p} m={m}")

    # --- shared operator instance ----------------------------------------
    n = rng.randint(1, 3)
    k = rng.randint(1, 3)
    Q = rand_matrix(rng, rg, k, n, maxdeg)
    Gt = Q.transpose()  # generator matrix of the code im Q^T
    code_mod = ModuleBasis.from_matrix(Gt)

    # adjointness <Q^T u, a> = <u, Q a> on the common valid region
    u = rand_vector(rng, rg, k, 1)
    box = track(_box(margin, Q, u))
    a = _rand_series(rng, rg, n, box)
    w = _transpose_times_vec(Q, u)
    lhs = pairing(w, a)
    rhs = pairing(u, apply_matrix(Q, a))
    reg = region_sub(box, _deg_sum(Q, u))
    rec.record(trial, "adjointness",
               region_nonempty(reg) and lhs.equal_on(rhs, reg), f"p={p} m={m}")

    # thm36(1)/(2) checked half: R = X Q annihilates ker Q where computable
    X = rand_matrix(rng, rg, rng.randint(1, 2), k, 1)
    Rm = X @ Q
    box = track(_box(margin, Q, X))
    kerQ = truncated_kernel(Q, box)
    reg = region_sub(box, _deg_sum(Q, X))
    ok = all(apply_matrix(Rm, s).is_zero_on(reg) for s in kerQ)
    rec.record(trial, "kernel_inclusion_under_left_factor", ok, f"p={p} m={m}")

    # thm36(3): full row rank => truncated right-hand sides are solvable
    if rank_ff(Q) == Q.rows:
        box = track(_box(margin, Q))
        g = _rand_series(rng, rg, Q.rows, box)
        rec.record(trial, "full_row_rank_surjective",
                   _truncated_solvable(Q, g, box), f"p={p} m={m}")

    # thm36(4): the truncated dual of im Q^T equals the truncated kernel of Q
    box = track(_box(margin, Q))
    duals = dual_of_code(Gt, box)
    kerQ = truncated_kernel(Q, box)
    if len(duals) == 0 and len(kerQ) == 0:
        ok = True
    elif len(duals) == 0 or len(kerQ) == 0:
        ok = False
    else:
        ok = modp.span_equal(span_matrix(duals, box), span_matrix(kerQ, box), p)
    rec.record(trial, "dual_of_image_is_kernel", ok, f"p={p} m={m}")

    # thm36(5): p in im Q^T iff p annihilates the truncated kernel
    for tag, pvec in (("member", _transpose_times_vec(Q, rand_vector(rng, rg, k, 1))),
                      ("random", rand_vector(rng, rg, n, maxdeg))):
        mem, comb = _member_witness(code_mod, pvec)
        witness_deg = comb if mem else None
        box = track(_box(margin, Q, pvec, witness_deg))
        kerQ = truncated_kernel(Q, box)
        vanish = _vanishes_at_origin(pvec, kerQ)
        ok = (mem == vanish) and (tag != "member" or mem)
        rec.record(trial, "dual_membership_equivalence", ok,
                   f"p={p} m={m} tag={tag} mem={mem} vanish={vanish}")

    # thm36(6): (im_A Q)^perp = ker_D Q^T with a constructive witness
    u = rand_vector(rng, rg, k, maxdeg)
    w = _transpose_times_vec(Q, u)
    box = track(_box(margin, Q, u, w))
    if all(fq.is_zero() for fq in w):
        a = _rand_series(rng, rg, n, box)
        pr = pairing(u, apply_matrix(Q, a))
        rec.record(trial, "image_dual_is_transposed_kernel",
                   pr.is_zero_on(pr.valid), f"p={p} m={m} zero-case")
    else:
        comp, mono = next((i, mo) for i, fq in enumerate(w) for mo in fq.terms)
        ind = TruncatedSeries.indicator(rg, n, box, comp, mono)
        v1 = pairing(u, apply_matrix(Q, ind))
        v2 = pairing(w, ind)
        ok = (region_nonempty(v1.valid) and region_nonempty(v2.valid)
              and v1.coeff_at(0, _origin(m)) == v2.coeff_at(0, _origin(m))
              and v2.coeff_at(0, _origin(m)) == w[comp].terms[mono])
        rec.record(trial, "image_dual_is_transposed_kernel", ok, f"p={p} m={m}")

    # thm36(7): double-dual closure; candidates solved from the truncated
    # dual must be code members, and Groebner generators must annihilate the
    # dual within their witness margins
    dp = maxdeg
    need = _deg_vec_of(Q)
    for wit in code_mod.witnesses:
        d = _deg_sum(Gt, wit)
        need = tuple(max(a, b) for a, b in zip(need, d))
    box = track(tuple(x + margin + dp for x in need))
    duals = dual_of_code(Gt, box)
    cands = _annihilator_candidates(duals, rg, n, dp, box)
    ok = all(code_mod.contains(c) for c in cands)
    for gen, wit in zip(code_mod.gb, code_mod.witnesses):
        reg = region_sub(box, _deg_sum(Gt, wit))
        if not region_nonempty(reg):
            ok = False
        for s in duals:
            if not pairing(gen, s).is_zero_on(reg):
                ok = False
    rec.record(trial, "double_dual_closure", ok,
               f"p={p} m={m} candidates={len(cands)} duals={len(duals)}")

    # thm37(a): (R ker_A N)^perp = {p : R^T p in im_D N^T}
    l = rng.randint(1, 3)
    R37 = rand_matrix(rng, rg, n, l, maxdeg)
    N37 = rand_matrix(rng, rg, rng.randint(1, 2), l, maxdeg)
    Wa, Xa = solve_image_preimage_full(R37.transpose(), N37.transpose())
    wa_mod = _module_of(Wa, n, rg)
    zero_n = tuple(Polynomial.zero(rg) for _ in range(n))
    for tag in ("member", "random"):
        if tag == "member":
            c = rand_vector(rng, rg, Wa.cols, 1)
            pvec = _combine_columns(Wa, c) if Wa.cols else zero_n
        else:
            pvec = rand_vector(rng, rg, n, maxdeg)
        mem, comb = _member_witness(wa_mod, pvec)
        xw = None
        if mem and Wa.cols:
            xw = _combine_columns(Xa, comb)
        box = track(_box(margin, R37, N37, pvec, xw))
        zetas = truncated_kernel(N37, box)
        vanish = _vanishes_at_origin(pvec, zetas, mapper=lambda z: apply_matrix(R37, z))
        ok = (mem == vanish) and (tag != "member" or mem)
        rec.record(trial, "latent_image_dual_formula", ok,
                   f"p={p} m={m} tag={tag} mem={mem} vanish={vanish}")

    # thm37(b): {a : M a in im_A N}^perp = M^T ker_D N^T
    M37 = rand_matrix(rng, rg, rng.randint(1, 2), n, maxdeg)
    N37b = rand_matrix(rng, rg, M37.rows, rng.randint(1, 2), maxdeg)
    _check_preimage_dual(rng, rec, trial, "preimage_dual_formula",
                         M37, N37b, margin, boxes)

    # thm37(c): (R ker_D N)^perp = {a : R^T a in im_A N^T}: the transposed
    # instance of the same equivalence
    _check_preimage_dual(rng, rec, trial, "polynomial_latent_dual_formula",
                         R37.transpose(), N37.transpose(), margin, boxes)

    # thm37(d): {p : M p in im_D N}^perp = M^T ker_A N^T
    Wd, Xd = solve_image_preimage_full(M37, N37b)
    wd_mod = _module_of(Wd, n, rg)
    for tag in ("member", "random"):
        if tag == "member":
            c = rand_vector(rng, rg, Wd.cols, 1)
            pvec = _combine_columns(Wd, c) if Wd.cols else zero_n
        else:
            pvec = rand_vector(rng, rg, n, maxdeg)
        mem, comb = _member_witness(wd_mod, pvec)
        xw = None
        if mem and Wd.cols:
            xw = _combine_columns(Xd, comb)
        box = track(_box(margin, M37, N37b, pvec, xw))
        zetas = truncated_kernel(N37b.transpose(), box)
        vanish = _vanishes_at_origin(
            pvec, zetas, mapper=lambda z: apply_matrix(M37.transpose(), z))
        ok = (mem == vanish) and (tag != "member" or mem)
        rec.record(trial, "module_preimage_dual_formula", ok,
                   f"p={p} m={m} tag={tag} mem={mem} vanish={vanish}")

    # equality of the module form and the field form
    pv = rand_vector(rng, rg, n, maxdeg)
    box = track(_box(margin + 1, pv))
    av = _rand_series(rng, rg, n, box)
    beta = tuple(rng.randint(0, 1) for _ in range(m))
    c1 = pairing(pv, av)
    if region_nonempty(region_sub(c1.valid, beta)):
        shifted = scalar_action(Polynomial.monomial(rg, beta, 1), av)
        c2 = f_pairing(pv, shifted)
        c3 = f_pairing(tuple(shift_mul(fp, beta) for fp in pv), av)
        got = c1.coeff_at(0, beta)
        ok = (got == c2.value) and (got == c3.value)
        rec.record(trial, "bilinear_forms_agree", ok,
                   f"p={p} m={m} beta={beta} c1={got} c2={c2.value} c3={c3.value}")

    return max(boxes)


def _check_preimage_dual(rng, rec, trial, name, M: PolyMatrix, N: PolyMatrix,
                         margin: int, boxes: list):
    """Equivalence check shared by the two preimage-form statements:
    p in im(M^T ker N^T) iff p annihilates the truncated kernel of Q0 M,
    where the rows of Q0 generate ker_D N^(TT) ... i.e. ker_A Q0 = im_A N.

    Member side: p = M^T Syz(N^T) c, so p pairs through u = c against
    Q0 M a = 0; box must exceed deg(Q0 M) + deg(u)."""
    rg = M.ring
    p = rg.p
    narg = M.cols
    maxdeg = 2
    Syz = syzygies(N.transpose())      # columns generate ker_D N^T
    Q0 = Syz.transpose()               # ker_A Q0 = im_A N
    Qc = Q0 @ M
    Wb = M.transpose() @ Syz
    wb_mod = _module_of(Wb, narg, rg)
    zero_n = tuple(Polynomial.zero(rg) for _ in range(narg))
    for tag in ("member", "random"):
        if tag == "member":
            c = rand_vector(rng, rg, Wb.cols, 1) if Wb.cols else ()
            pvec = _combine_columns(Wb, c) if Wb.cols else zero_n
        else:
            pvec = rand_vector(rng, rg, narg, maxdeg)
        mem, comb = _member_witness(wb_mod, pvec)
        uw = comb if (mem and Wb.cols) else None
        box = _box(margin, Qc, M, pvec, uw)
        boxes.append(max(box))
        kerb = truncated_kernel(Qc, box)
        vanish = _vanishes_at_origin(pvec, kerb)
        ok = (mem == vanish) and (tag != "member" or mem)
        rec.record(trial, name, ok,
                   f"p={p} tag={tag} mem={mem} vanish={vanish}")


def _annihilator_candidates(duals, ring: Ring, n: int, dp: int, box):
    """Basis of {p in D^n, per-variable deg <= dp : <p, a> = 0 on the valid
    region for every a in duals}, by coefficientwise linear solving."""
    pbox = (dp,) * ring.nvars
    pshape = _box_shape(pbox)
    psize = math.prod(pshape)
    nunk = n * psize
    rows = []
    region = region_sub(box, pbox)
    for a in duals:
        for beta in _region_points(region):
            eq = np.zeros(nunk, dtype=np.int64)
            for i in range(n):
                for gamma in _region_points(pbox):
                    alpha = tuple(g + b for g, b in zip(gamma, beta))
                    eq[_flat_index(pshape, i, gamma)] = a.coeff_at(i, alpha)
            rows.append(eq)
    mat = np.stack(rows) if rows else np.zeros((0, nunk), dtype=np.int64)
    basis = modp.nullspace(mat, ring.p)
    out = []
    for t in range(basis.shape[1]):
        flat = basis[:, t].reshape((n,) + pshape)
        vec = []
        for i in range(n):
            items = [(gamma, int(flat[(i,) + gamma]))
                     for gamma in _region_points(pbox) if flat[(i,) + gamma]]
            vec.append(Polynomial.from_terms(ring, items))
        out.append(tuple(vec))
    return out


def _truncated_solvable(Q: PolyMatrix, g: TruncatedSeries, box) -> bool:
    """Consistency of (Q f)|region = g|region for an unknown f on the box."""
    rg = Q.ring
    n = Q.cols
    boxshape = _box_shape(box)
    boxsize = math.prod(boxshape)
    nunk = n * boxsize
    rows = []
    rhs = []
    for r in range(Q.rows):
        dr = [0] * rg.nvars
        for j in range(n):
            for i, d in enumerate(Q[r, j].deg_vec()):
                dr[i] = max(dr[i], d)
        region = region_sub(box, tuple(dr))
        for beta in _region_points(region):
            eq = np.zeros(nunk, dtype=np.int64)
            for j in range(n):
                for mono, c in Q[r, j].terms.items():
                    alpha = tuple(gg + b for gg, b in zip(mono, beta))
                    idx = _flat_index(boxshape, j, alpha)
                    eq[idx] = (eq[idx] + c) % rg.p
            rows.append(eq)
            rhs.append(g.coeff_at(r, beta))
    if not rows:
        return True
    mat = np.stack(rows)
    return modp.solve(mat, np.array(rhs, dtype=np.int64), rg.p) is not None
