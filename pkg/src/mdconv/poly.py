"""Multivariate polynomials over F_p.

Realizes the operator ring F_p[z_1,...,z_m]: sparse term maps keyed by
dense exponent tuples, a fixed graded-lexicographic term order with
z_1 > z_2 > ... > z_m, a text parser for the CLI grammar, and a
content/primitive-part multivariate GCD.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .field import FieldElement, FieldSpec

Monomial = tuple  # exponent vectors; length == ring.nvars everywhere


class PolyError(ValueError):
    """Ring mismatch or other invalid polynomial operation."""


class ParseError(PolyError):
    """Syntax error in polynomial text, with 1-based line/column."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Ring:
    """Ring context: prime field plus variable count."""

    field: FieldSpec
    nvars: int

    def __post_init__(self):
        if self.nvars < 1:
            raise PolyError("need at least one variable")

    @property
    def p(self) -> int:
        return self.field.p

    def zero_mono(self) -> Monomial:
        return (0,) * self.nvars

    def __repr__(self):
        return f"F_{self.p}[z1..z{self.nvars}]"


def ring(p: int, nvars: int) -> Ring:
    return Ring(FieldSpec(p), nvars)


# monomial helpers on plain exponent tuples

def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    """a | b componentwise."""
    return all(x <= y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    """a / b; caller guarantees divisibility."""
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_deg(a: Monomial) -> int:
    return sum(a)


def grlex_key(a: Monomial):
    """Sort key for graded lex with z1 > z2 > ... > zm; larger key = larger monomial."""
    return (sum(a),) + a


class Polynomial:
    """Sparse exact polynomial: ring context plus {monomial: coeff in [1, p)}.

    Treated as immutable; no stored zero coefficients.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: dict):
        self.ring = ring
        self.terms = terms  # normalized by constructors below

    # construction -----------------------------------------------------

    @classmethod
    def from_terms(cls, ring: Ring, items) -> "Polynomial":
        """Build from (monomial, int coeff) pairs, reducing mod p and dropping zeros."""
        p = ring.p
        terms: dict = {}
        for mono, c in items:
            if len(mono) != ring.nvars:
                raise PolyError(f"monomial {mono} has wrong arity for {ring}")
            c = (terms.get(mono, 0) + c) % p
            if c:
                terms[mono] = c
            elif mono in terms:
                del terms[mono]
        return cls(ring, terms)

    @classmethod
    def zero(cls, ring: Ring) -> "Polynomial":
        return cls(ring, {})

    @classmethod
    def constant(cls, ring: Ring, c: int) -> "Polynomial":
        c %= ring.p
        return cls(ring, {ring.zero_mono(): c} if c else {})

    @classmethod
    def one(cls, ring: Ring) -> "Polynomial":
        return cls.constant(ring, 1)

    @classmethod
    def variable(cls, ring: Ring, i: int) -> "Polynomial":
        """The variable z_{i+1} (0-based index i)."""
        if not 0 <= i < ring.nvars:
            raise PolyError(f"variable index {i} out of range for {ring}")
        mono = tuple(1 if j == i else 0 for j in range(ring.nvars))
        return cls(ring, {mono: 1})

    @classmethod
    def monomial(cls, ring: Ring, mono: Monomial, c: int = 1) -> "Polynomial":
        return cls.from_terms(ring, [(tuple(mono), c)])

    # predicates and views ---------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_unit(self) -> bool:
        """Nonzero constant."""
        return len(self.terms) == 1 and self.ring.zero_mono() in self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.ring.zero_mono() in self.terms)

    def constant_value(self) -> int:
        return self.terms.get(self.ring.zero_mono(), 0)

    def coeff(self, mono: Monomial) -> FieldElement:
        return self.ring.field.element(self.terms.get(tuple(mono), 0))

    def lead_mono(self) -> Monomial:
        if not self.terms:
            raise PolyError("zero polynomial has no leading term")
        return max(self.terms, key=grlex_key)

    def lead_coeff(self) -> int:
        return self.terms[self.lead_mono()]

    def total_degree(self) -> int:
        """Max total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def deg_vec(self) -> tuple:
        """Per-variable max degree; the zero vector for the zero polynomial."""
        if not self.terms:
            return (0,) * self.ring.nvars
        return tuple(max(m[i] for m in self.terms) for i in range(self.ring.nvars))

    def degree_in(self, i: int) -> int:
        """Degree in variable z_{i+1}; -1 for zero."""
        if not self.terms:
            return -1
        return max(m[i] for m in self.terms)

    def support(self) -> Iterator[Monomial]:
        return iter(self.terms)

    # arithmetic -------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise PolyError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        p = self.ring.p
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            c = (terms.get(mono, 0) + c) % p
            if c:
                terms[mono] = c
            elif mono in terms:
                del terms[mono]
        return Polynomial(self.ring, terms)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        p = self.ring.p
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            c = (terms.get(mono, 0) - c) % p
            if c:
                terms[mono] = c
            elif mono in terms:
                del terms[mono]
        return Polynomial(self.ring, terms)

    def __neg__(self) -> "Polynomial":
        p = self.ring.p
        return Polynomial(self.ring, {m: (-c) % p for m, c in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        p = self.ring.p
        terms: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                mono = mono_mul(ma, mb)
                c = (terms.get(mono, 0) + ca * cb) % p
                if c:
                    terms[mono] = c
                elif mono in terms:
                    del terms[mono]
        return Polynomial(self.ring, terms)

    def scale(self, c: int) -> "Polynomial":
        """Multiply by the constant c mod p."""
        p = self.ring.p
        c %= p
        if c == 0:
            return Polynomial.zero(self.ring)
        return Polynomial(self.ring, {m: (v * c) % p for m, v in self.terms.items()})

    def shift(self, alpha: Monomial) -> "Polynomial":
        """Multiply by the monomial z^alpha (forward shift of the coefficient table)."""
        alpha = tuple(alpha)
        if len(alpha) != self.ring.nvars:
            raise PolyError("shift exponent has wrong arity")
        return Polynomial(self.ring, {mono_mul(m, alpha): c for m, c in self.terms.items()})

    def monic(self) -> "Polynomial":
        """Scale so the grlex-leading coefficient is 1."""
        if not self.terms:
            return self
        return self.scale(self.ring.field.inv(self.lead_coeff()))

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.terms.items()))))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"<{render_poly(self)} over {self.ring}>"


def poly_arith(f: Polynomial, g: Polynomial, op: str) -> Polynomial:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown op {op!r}")


def shift_mul(f: Polynomial, alpha: Monomial) -> Polynomial:
    return f.shift(alpha)


# division -------------------------------------------------------------

def poly_divmod(f: Polynomial, g: Polynomial) -> tuple:
    """Multivariate division of f by a single nonzero divisor g under grlex.

    Returns (q, r) with f = q*g + r and no term of r divisible by LT(g).
    For a single divisor, r == 0 iff g | f.
    """
    if g.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    ring_ = f.ring
    f._check(g)
    g_lm = g.lead_mono()
    g_lc_inv = ring_.field.inv(g.lead_coeff())
    q_terms: dict = {}
    r = f
    while not r.is_zero():
        # largest reducible term of the remainder
        cand = None
        for m in r.terms:
            if mono_divides(g_lm, m):
                if cand is None or grlex_key(m) > grlex_key(cand):
                    cand = m
        if cand is None:
            break
        c = (r.terms[cand] * g_lc_inv) % ring_.p
        qm = mono_div(cand, g_lm)
        q_terms[qm] = (q_terms.get(qm, 0) + c) % ring_.p
        r = r - g.shift(qm).scale(c)
    q = Polynomial.from_terms(ring_, q_terms.items())
    return q, r


def poly_divexact(f: Polynomial, g: Polynomial) -> Polynomial:
    q, r = poly_divmod(f, g)
    if not r.is_zero():
        raise PolyError("inexact division")
    return q


def divides(g: Polynomial, f: Polynomial) -> bool:
    if g.is_zero():
        return f.is_zero()
    return poly_divmod(f, g)[1].is_zero()


# GCD ------------------------------------------------------------------

def _univar_coeffs(f: Polynomial, var: int) -> dict:
    """View f as a polynomial in z_{var+1} with Polynomial coefficients
    in the remaining variables. Returns {exponent: Polynomial}."""
    out: dict = {}
    for m, c in f.terms.items():
        e = m[var]
        rest = m[:var] + (0,) + m[var + 1:]
        out.setdefault(e, []).append((rest, c))
    return {e: Polynomial.from_terms(f.ring, items) for e, items in out.items()}


def _from_univar(ring_: Ring, var: int, coeffs: dict) -> Polynomial:
    items = []
    for e, poly in coeffs.items():
        for m, c in poly.terms.items():
            items.append((m[:var] + (e,) + m[var + 1:], c))
    return Polynomial.from_terms(ring_, items)


def _univar_gcd(f: Polynomial, g: Polynomial, var: int) -> Polynomial:
    """Euclid in F_p[z_{var+1}] for polynomials involving only that variable."""
    ring_ = f.ring

    def deg(h):
        return h.degree_in(var)

    def divmod1(a, b):
        # univariate long division in variable `var`
        binv = ring_.field.inv(_leading(b))
        r = a
        while not r.is_zero() and deg(r) >= deg(b):
            d = deg(r) - deg(b)
            c = (_leading(r) * binv) % ring_.p
            shift = tuple(d if j == var else 0 for j in range(ring_.nvars))
            r = r - b.shift(shift).scale(c)
        return r

    def _leading(h):
        d = deg(h)
        mono = tuple(d if j == var else 0 for j in range(ring_.nvars))
        return h.terms[mono]

    a, b = f, g
    while not b.is_zero():
        a, b = b, divmod1(a, b)
    return a


def _content(f: Polynomial, var: int) -> Polynomial:
    """GCD of the coefficients of f viewed in the main variable `var`."""
    coeffs = list(_univar_coeffs(f, var).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        g = poly_gcd(g, c)
        if g.is_unit():
            break
    return g


def _pseudo_rem(f: Polynomial, g: Polynomial, var: int) -> Polynomial:
    """Pseudo-remainder of f by g in the main variable `var`."""
    fc = _univar_coeffs(f, var)
    gc = _univar_coeffs(g, var)
    dg = max(gc)
    lead_g = gc[dg]
    r = f
    while not r.is_zero():
        rc = _univar_coeffs(r, var)
        dr = max(rc)
        if dr < dg:
            break
        shift = tuple(dr - dg if j == var else 0 for j in range(f.ring.nvars))
        r = r * lead_g - g.shift(shift) * rc[dr]
    return r


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """GCD by recursion on variables: content/primitive part with a primitive
    pseudo-remainder sequence, univariate Euclid at the base. Result is monic
    under the term order."""
    f._check(g)
    if f.is_zero() and g.is_zero():
        raise PolyError("gcd(0, 0) undefined")
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    if f.is_constant() or g.is_constant():
        return Polynomial.one(f.ring)

    # pick the first variable actually present in f or g
    fv, gv = f.deg_vec(), g.deg_vec()
    var = next(i for i in range(f.ring.nvars) if fv[i] or gv[i])
    if not fv[var]:
        # f is free of the main variable: gcd(f, g) = gcd(f, content_var(g))
        return poly_gcd(f, _content(g, var)).monic()
    if not gv[var]:
        return poly_gcd(g, _content(f, var)).monic()

    others = [i for i in range(f.ring.nvars) if i != var and (fv[i] or gv[i])]
    if not others:
        return _univar_gcd(f, g, var).monic()

    cf = _content(f, var)
    cg = _content(g, var)
    cont = poly_gcd(cf, cg)
    a = poly_divexact(f, cf)
    b = poly_divexact(g, cg)
    # primitive PRS in the main variable
    while True:
        if b.is_zero():
            result = a
            break
        bc = _univar_coeffs(b, var)
        if max(bc) == 0:
            # b free of main variable and primitive => unit content
            result = Polynomial.one(f.ring)
            break
        r = _pseudo_rem(a, b, var)
        if r.is_zero():
            result = b
            break
        rcont = _content(r, var)
        a, b = b, poly_divexact(r, rcont)
    result = poly_divexact(result, _content(result, var)) if not result.is_constant() else result
    return (cont * result).monic()


# parsing and rendering ------------------------------------------------

def _tokenize(text: str):
    """Yield (kind, value, line, col) with kind in INT, VAR, OP."""
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch in "+-*^":
            yield ("OP", ch, line, col)
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            yield ("INT", int(text[i:j]), line, col)
            col += j - i
            i = j
            continue
        if ch == "z":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise ParseError("variable needs an index, e.g. z1", line, col)
            yield ("VAR", int(text[i + 1:j]), line, col)
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)


def parse_poly(text: str, ring_: Ring) -> Polynomial:
    """Parse the CLI polynomial grammar:

        poly  := term (("+"|"-") term)*
        term  := coeff | coeff "*" monos | monos
        monos := mono ("*" mono)*
        mono  := var ("^" nat)?
        var   := "z" nat   (1-indexed, <= nvars)

    Coefficients are reduced mod p. Whitespace is insignificant.
    """
    toks = list(_tokenize(text))
    if not toks:
        raise ParseError("empty polynomial", 1, 1)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, None, toks[-1][2], toks[-1][3] + 1)

    def take():
        nonlocal pos
        t = peek()
        pos += 1
        return t

    def parse_mono_factor():
        kind, val, line, col = take()
        if kind != "VAR":
            raise ParseError("expected a variable", line, col)
        if not 1 <= val <= ring_.nvars:
            raise ParseError(f"unknown variable z{val} (ring has {ring_.nvars})", line, col)
        exp = 1
        k2, v2, l2, c2 = peek()
        if k2 == "OP" and v2 == "^":
            take()
            k3, v3, l3, c3 = take()
            if k3 != "INT":
                raise ParseError("expected an integer exponent", l3, c3)
            exp = v3
        return val - 1, exp

    def parse_term():
        kind, val, line, col = peek()
        coeff = 1
        mono = [0] * ring_.nvars
        saw_factor = False
        if kind == "INT":
            take()
            coeff = val
            saw_factor = True
            k2, v2, _, _ = peek()
            if k2 == "OP" and v2 == "*":
                take()
                var, exp = parse_mono_factor()
                mono[var] += exp
        elif kind == "VAR":
            var, exp = parse_mono_factor()
            mono[var] += exp
            saw_factor = True
        else:
            raise ParseError("expected a term", line, col)
        while True:
            k2, v2, _, _ = peek()
            if k2 == "OP" and v2 == "*":
                take()
                var, exp = parse_mono_factor()
                mono[var] += exp
            else:
                break
        if not saw_factor:
            raise ParseError("empty term", line, col)
        return coeff, tuple(mono)

    items = []
    sign = 1
    coeff, mono = parse_term()
    items.append((mono, coeff))
    while pos < len(toks):
        kind, val, line, col = take()
        if kind != "OP" or val not in "+-":
            raise ParseError("expected '+' or '-'", line, col)
        sign = 1 if val == "+" else -1
        coeff, mono = parse_term()
        items.append((mono, sign * coeff))
    return Polynomial.from_terms(ring_, items)


def render_mono(mono: Monomial) -> str:
    parts = []
    for i, e in enumerate(mono):
        if e == 1:
            parts.append(f"z{i + 1}")
        elif e > 1:
            parts.append(f"z{i + 1}^{e}")
    return "*".join(parts)


def render_poly(f: Polynomial) -> str:
    """Canonical text form; parse(render(f)) == f. Terms in descending grlex order."""
    if f.is_zero():
        return "0"
    parts = []
    for mono in sorted(f.terms, key=grlex_key, reverse=True):
        c = f.terms[mono]
        ms = render_mono(mono)
        if not ms:
            parts.append(str(c))
        elif c == 1:
            parts.append(ms)
        else:
            parts.append(f"{c}*{ms}")
    return "+".join(parts)
