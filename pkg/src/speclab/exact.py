"""Exact arithmetic in a real quadratic field Q(sqrt(D)).

Used to give exact simplicity and resonance verdicts for orthotopes whose
inverse squared side ratios are quadratic irrationals, e.g. mu = (1, 2**-0.25)
with 1/mu**2 = (1, sqrt(2)).
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering


def _squarefree(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


@total_ordering
class QuadSurd:
    """The number ``a + b*sqrt(D)`` with rational ``a``, ``b`` and squarefree ``D``.

    ``D = 1`` is reserved for purely rational values (``b`` is then 0).
    """

    __slots__ = ("a", "b", "D")

    def __init__(self, a=0, b=0, D=1):
        a, b = Fraction(a), Fraction(b)
        D = int(D)
        if D != 1 and not _squarefree(D):
            raise ValueError(f"D={D} is not squarefree")
        if D == 1:
            a, b = a + b, Fraction(0)
        self.a, self.b, self.D = a, b, D

    def _coerce(self, other) -> "QuadSurd":
        if isinstance(other, QuadSurd):
            if other.b == 0:
                return QuadSurd(other.a, 0, self.D)
            if self.b == 0 or self.D == 1:
                return other
            if other.D != self.D:
                raise ValueError("mixing different quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadSurd(other, 0, self.D)
        return NotImplemented

    def _field(self, other: "QuadSurd") -> int:
        return max(self.D, other.D)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadSurd(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.a, -self.b, self.D)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadSurd(self.a * other, self.b * other, self.D)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        D = self._field(o)
        return QuadSurd(self.a * o.a + self.b * o.b * D, self.a * o.b + self.b * o.a, D)

    __rmul__ = __mul__

    def sign(self) -> int:
        """Exact sign, decided by comparing ``a**2`` with ``b**2 * D``."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0 or sa == sb:
            return sa if sa != 0 else sb
        if sa == 0:
            return sb
        lhs, rhs = self.a * self.a, self.b * self.b * self.D
        if lhs == rhs:
            return 0
        return sa if lhs > rhs else sb

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return (self - o).sign() == 0

    def __lt__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return (self - o).sign() < 0

    def __hash__(self):
        return hash((self.a, self.b, self.D if self.b else 1))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.D)

    def __repr__(self):
        if self.b == 0:
            return f"QuadSurd({self.a})"
        return f"QuadSurd({self.a} + {self.b}*sqrt({self.D}))"

    def to_pair(self) -> tuple[Fraction, Fraction]:
        return self.a, self.b
