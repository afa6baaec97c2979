"""Exact arithmetic in prime fields F_p.

Every other layer of the package does its scalar arithmetic here (or with
raw ints reduced mod p where a hot loop demands it, see ``_kernels``).
"""

from __future__ import annotations

from dataclasses import dataclass

MAX_MODULUS = 1 << 13


class FieldError(ValueError):
    """Invalid field construction or mismatched-field operation."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """A prime field F_p, 2 <= p <= 2^13. Primality checked by trial division."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int):
            raise FieldError(f"modulus must be an integer, got {self.p!r}")
        if self.p < 2 or self.p > MAX_MODULUS:
            raise FieldError(f"modulus {self.p} outside [2, {MAX_MODULUS}]")
        if not _is_prime(self.p):
            raise FieldError(f"modulus {self.p} is not prime")

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value % self.p, self)

    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    def inv(self, value: int) -> int:
        """Inverse of ``value`` mod p by extended Euclid. Raises on zero."""
        a = value % self.p
        if a == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        old_r, r = a, self.p
        old_s, s = 1, 0
        while r:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s = s, old_s - q * s
        return old_s % self.p

    def __repr__(self):
        return f"F_{self.p}"


class FieldElement:
    """A residue in F_p. Immutable; operations require identical specs."""

    __slots__ = ("value", "spec")

    def __init__(self, value: int, spec: FieldSpec):
        object.__setattr__(self, "value", value % spec.p)
        object.__setattr__(self, "spec", spec)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldError(f"mismatched fields {self.spec} and {other.spec}")
            return other
        if isinstance(other, int):
            return FieldElement(other, self.spec)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.value + o.value, self.spec)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.value - o.value, self.spec)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(o.value - self.value, self.spec)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.value * o.value, self.spec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.value * self.spec.inv(o.value), self.spec)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(o.value * self.spec.inv(self.value), self.spec)

    def __neg__(self):
        return FieldElement(-self.value, self.spec)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.spec.inv(self.value), self.spec)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.spec.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.spec.p))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.spec.p})"


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Dispatch add/sub/mul/div on two elements of the same field."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")
