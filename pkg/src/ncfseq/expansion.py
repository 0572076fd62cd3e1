"""Greedy N-continued fraction expansions, convergents and cylinders."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .exact import (
    ExactReal,
    Surd,
    as_exact,
    exact_cmp,
    exact_floor,
    exact_reciprocal,
    exact_scale,
    exact_sign,
    exact_sub_int,
)


class DomainError(ValueError):
    """An argument lies outside the domain of the map or expansion."""


class InsufficientDigits(ValueError):
    """A finite digit source ran out before the request was satisfied."""


def tn_step(x: ExactReal, N: int) -> tuple[int, ExactReal]:
    """One step of ``T_N(x) = N/x - floor(N/x)``; returns ``(digit, T_N(x))``."""
    if N < 1:
        raise DomainError("N must be >= 1")
    x = as_exact(x)
    if exact_sign(x) <= 0 or exact_cmp(x, Fraction(1)) > 0:
        raise DomainError(f"tn_step needs x in (0, 1], got {x}")
    y = exact_scale(exact_reciprocal(x), N)
    d = exact_floor(y)
    return d, exact_sub_int(y, d)


def greedy_digits(x: ExactReal, N: int, count: int) -> list[int]:
    """Up to ``count`` greedy digits of ``x``; shorter iff the orbit hits 0."""
    x = as_exact(x)
    if exact_sign(x) < 0 or exact_cmp(x, Fraction(1)) > 0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    digits = []
    while len(digits) < count and exact_sign(x) != 0:
        d, x = tn_step(x, N)
        digits.append(d)
    return digits


def orbit_until_repeat(x: ExactReal, N: int, limit: int = 10_000):
    """Iterate ``T_N`` until a state repeats exactly.

    Returns ``(digits, preperiod_length, period_length)``; the period is
    ``None`` when the orbit reaches 0 (rational input) or ``limit`` steps
    pass without repetition.
    """
    seen: dict[ExactReal, int] = {}
    digits = []
    x = as_exact(x)
    while exact_sign(x) != 0 and len(digits) < limit:
        if x in seen:
            start = seen[x]
            return digits, start, len(digits) - start
        seen[x] = len(digits)
        d, x = tn_step(x, N)
        digits.append(d)
    return digits, len(digits), None


# -- digit sources -----------------------------------------------------------


@dataclass(frozen=True)
class Explicit:
    digits: tuple[int, ...]

    def __iter__(self) -> Iterator[int]:
        return iter(self.digits)


@dataclass(frozen=True)
class EventuallyPeriodic:
    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be nonempty")

    def __iter__(self) -> Iterator[int]:
        return itertools.chain(self.preperiod, itertools.cycle(self.period))


@dataclass(frozen=True)
class Arithmetic:
    """``d_n = start + (n - 1) * step``."""

    start: int
    step: int

    def __post_init__(self):
        if self.start < 1 or self.step < 0:
            raise ValueError("arithmetic digits need start >= 1 and step >= 0")

    def __iter__(self) -> Iterator[int]:
        return itertools.count(self.start, self.step)


@dataclass(frozen=True)
class FromReal:
    x: ExactReal
    N: int

    def __iter__(self) -> Iterator[int]:
        x = as_exact(self.x)
        while exact_sign(x) != 0:
            d, x = tn_step(x, self.N)
            yield d


DigitSource = Explicit | EventuallyPeriodic | Arithmetic | FromReal


def take(source: Iterable[int], count: int) -> list[int]:
    return list(itertools.islice(iter(source), count))


def validate_greedy(digits: Sequence[int], N: int) -> None:
    for i, d in enumerate(digits, 1):
        if d < N:
            raise DomainError(f"digit d_{i} = {d} < N = {N} is not greedy")


def _int_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    return tuple(int(t) for t in text.split(",")) if text else ()


def _kv(text: str) -> dict[str, str]:
    out = {}
    for part in text.split(","):
        if "=" not in part:
            raise ValueError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_source(spec: str, N: int = 1) -> DigitSource:
    """Parse the digit-source DSL.

    ``list:4,2,4,2`` | ``periodic:pre=;per=4,2`` | ``arith:start=2,step=1`` |
    ``surd:a=-1,b=1,c=1,D=2`` | ``rational:3/4``.  ``N`` is only used by the
    real-number forms, which expand greedily.
    """
    kind, sep, body = spec.partition(":")
    if not sep:
        raise ValueError(f"malformed digit source {spec!r}: missing ':'")
    try:
        if kind == "list":
            digits = _int_list(body)
            if not digits:
                raise ValueError("empty digit list")
            return Explicit(digits)
        if kind == "periodic":
            m = re.fullmatch(r"\s*pre=([\d,\s]*);\s*per=([\d,\s]+)", body)
            if not m:
                raise ValueError("expected pre=...;per=...")
            return EventuallyPeriodic(_int_list(m.group(1)), _int_list(m.group(2)))
        if kind == "arith":
            kv = _kv(body)
            return Arithmetic(int(kv["start"]), int(kv.get("step", "0")))
        if kind == "surd":
            kv = _kv(body)
            x = Surd.make(int(kv["a"]), int(kv["b"]), int(kv.get("c", "1")),
                          int(kv["D"]))
            return FromReal(x, N)
        if kind == "rational":
            return FromReal(Fraction(body.strip()), N)
    except (KeyError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed digit source {spec!r}: {exc}") from exc
    raise ValueError(f"unknown digit source kind {kind!r}")


# -- convergents and cylinders -----------------------------------------------


@dataclass(frozen=True)
class ConvergentPair:
    n: int
    p: int
    q: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


def convergents(digits: Sequence[int], N: int, n: int | None = None) -> list[ConvergentPair]:
    """``(p_k, q_k)`` for ``k = 1..n`` from ``p_k = d_k p_{k-1} + N p_{k-2}``."""
    digits = list(digits) if n is None else take(digits, n)
    if not digits:
        raise ValueError("convergents need at least one digit")
    if n is not None and len(digits) < n:
        raise InsufficientDigits(f"need {n} digits, have {len(digits)}")
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    out = []
    for k, d in enumerate(digits, 1):
        if d < 1:
            raise DomainError("digits must be >= 1")
        p_prev, p = p, d * p + N * p_prev
        q_prev, q = q, d * q + N * q_prev
        out.append(ConvergentPair(k, p, q))
    return out


def evaluate_cf(digits: Sequence[int], N: int) -> Fraction:
    """Evaluate ``N/(d_1 + N/(d_2 + ...))`` bottom-up."""
    if not digits:
        raise ValueError("empty digit list")
    value = Fraction(0)
    for d in reversed(digits):
        if d < 1:
            raise DomainError("digits must be >= 1")
        value = Fraction(N) / (d + value)
    return value


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, other: "RationalInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


def cylinder(digits: Sequence[int], N: int, n: int) -> RationalInterval:
    """The rank-``n`` cylinder of points whose first ``n`` digits match."""
    if n < 1:
        raise ValueError("cylinder rank must be >= 1")
    cs = convergents(digits, N, n)
    p, q = cs[-1].p, cs[-1].q
    p1, q1 = (cs[-2].p, cs[-2].q) if n > 1 else (0, 1)
    a, b = Fraction(p, q), Fraction(p + p1, q + q1)
    return RationalInterval(min(a, b), max(a, b))


def cylinder_width_formula(digits: Sequence[int], N: int, n: int) -> Fraction:
    cs = convergents(digits, N, n)
    q = cs[-1].q
    q1 = cs[-2].q if n > 1 else 1
    return Fraction(N**n, q * (q + q1))


def slow_digits(digits: Iterable[int], N: int, count: int) -> list[int]:
    """Slow (Farey) expansion: each digit ``d`` becomes ``1^(d-N)`` then ``N``."""
    out: list[int] = []
    for i, d in enumerate(digits, 1):
        if len(out) >= count:
            break
        if d < N:
            raise DomainError(f"digit d_{i} = {d} < N = {N}; slow expansion needs greedy digits")
        out.extend([1] * (d - N))
        out.append(N)
    return out[:count]


def farey_step_exact(x: ExactReal, N: int) -> tuple[int, ExactReal]:
    """One exact step of the Farey-like map; returns ``(slow symbol, F_N(x))``.

    The symbol is ``N`` on the branch ``N/x - N`` (x > N/(N+1)) and ``1`` on
    the branch ``Nx/(N - x)``.
    """
    x = as_exact(x)
    if exact_sign(x) < 0 or exact_cmp(x, Fraction(1)) > 0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    if exact_cmp(x, Fraction(N, N + 1)) > 0:
        return N, exact_sub_int(exact_scale(exact_reciprocal(x), N), N)
    # Nx/(N - x) = N / (N/x - 1)
    if exact_sign(x) == 0:
        return 1, x
    inner = exact_sub_int(exact_scale(exact_reciprocal(x), N), 1)
    return 1, exact_scale(exact_reciprocal(inner), N)
