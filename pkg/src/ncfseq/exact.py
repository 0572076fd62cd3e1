"""Exact real numbers for the greedy N-continued fraction map.

Only two kinds of values are supported: rationals (backed by
:class:`fractions.Fraction`) and real quadratic surds ``(a + b*sqrt(D)) / c``.
Both kinds are closed under the operations the map needs (reciprocal,
subtracting an integer, scaling by an integer), so orbits never round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union


class RepresentationError(ValueError):
    """A surd was given in a form that cannot be canonicalised."""


def _squarefree_split(D: int) -> tuple[int, int]:
    """Return ``(k, r)`` with ``D == k*k*r`` and ``r`` square-free."""
    k, r = 1, D
    f = 2
    while f * f <= r:
        while r % (f * f) == 0:
            r //= f * f
            k *= f
        f += 1
    return k, r


def _floor_b_sqrt(b: int, D: int) -> int:
    # floor(b*sqrt(D)) for non-square D and b != 0
    s = math.isqrt(b * b * D)
    return s if b > 0 else -s - 1


@dataclass(frozen=True)
class Surd:
    """The real number ``(a + b*sqrt(D)) / c`` in canonical form.

    Canonical form: ``c > 0``, ``D`` square-free and > 1, ``b != 0`` and
    ``gcd(a, b, c) == 1``.  Construct through :meth:`make`, which reduces
    and may return a :class:`~fractions.Fraction` when the value is rational.
    """

    a: int
    b: int
    c: int
    D: int

    @staticmethod
    def make(a: int, b: int, c: int, D: int) -> "ExactReal":
        if c == 0:
            raise RepresentationError("surd denominator c must be nonzero")
        if D < 0:
            raise RepresentationError("surd radicand D must be non-negative")
        if c < 0:
            a, b, c = -a, -b, -c
        k, r = _squarefree_split(D) if D > 0 else (0, 0)
        b *= k
        if b == 0 or r == 1:
            # sqrt(D) is an integer (r == 1) or absent
            return Fraction(a + b * (1 if r == 1 else 0), c)
        g = math.gcd(math.gcd(a, b), c)
        return Surd(a // g, b // g, c // g, r)

    def __float__(self) -> float:
        return (self.a + self.b * math.sqrt(self.D)) / self.c

    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt(D)`` (``c`` is positive)."""
        a, b2d = self.a, self.b * self.b * self.D
        if self.b > 0:
            if a >= 0:
                return 1
            return 1 if b2d > a * a else -1
        if a <= 0:
            return -1
        return 1 if a * a > b2d else -1

    def floor(self) -> int:
        return (self.a + _floor_b_sqrt(self.b, self.D)) // self.c

    def reciprocal(self) -> "ExactReal":
        # c / (a + b sqrt D) = c (a - b sqrt D) / (a^2 - b^2 D)
        norm = self.a * self.a - self.b * self.b * self.D
        return Surd.make(self.c * self.a, -self.c * self.b, norm, self.D)

    def scale(self, k: int) -> "ExactReal":
        return Surd.make(k * self.a, k * self.b, self.c, self.D)

    def sub_int(self, k: int) -> "ExactReal":
        return Surd.make(self.a - k * self.c, self.b, self.c, self.D)

    def __str__(self) -> str:
        return f"({self.a}{self.b:+d}*sqrt({self.D}))/{self.c}"


ExactReal = Union[Fraction, Surd]


def as_exact(x) -> ExactReal:
    if isinstance(x, Surd):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or Surd")
    return Fraction(x)


def exact_sign(x: ExactReal) -> int:
    if isinstance(x, Surd):
        return x.sign()
    return (x > 0) - (x < 0)


def exact_floor(x: ExactReal) -> int:
    if isinstance(x, Surd):
        return x.floor()
    return math.floor(x)


def exact_reciprocal(x: ExactReal) -> ExactReal:
    if isinstance(x, Surd):
        return x.reciprocal()
    return 1 / x


def exact_scale(x: ExactReal, k: int) -> ExactReal:
    return x.scale(k) if isinstance(x, Surd) else x * k


def exact_sub_int(x: ExactReal, k: int) -> ExactReal:
    return x.sub_int(k) if isinstance(x, Surd) else x - k


def exact_cmp(x: ExactReal, q: Fraction) -> int:
    """Compare an exact real with a rational; returns -1, 0 or 1."""
    if isinstance(x, Surd):
        diff = Surd.make(x.a * q.denominator - x.c * q.numerator,
                         x.b * q.denominator, x.c * q.denominator, x.D)
        return exact_sign(diff)
    return (x > q) - (x < q)
