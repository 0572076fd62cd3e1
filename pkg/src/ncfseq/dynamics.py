"""Floating-point bench for T_N, its natural extension and the Farey-like map."""

from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numba import njit
from scipy import integrate

from .exact import ExactReal
from .expansion import DomainError, convergents, farey_step_exact, greedy_digits, slow_digits, validate_greedy

MAPS = ("T", "F", "NatExt")


@dataclass
class OrbitSample:
    map: str
    N: int
    seed: tuple
    states: np.ndarray            # shape (n+1,) or (n+1, 2) including the seed
    digits: np.ndarray            # d_n for T and NatExt, slow symbols for F
    boundary: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))


def _t_step(x: float, N: int) -> tuple[int, float]:
    if x == 0.0:
        return 0, 0.0
    y = N / x
    d = math.floor(y)
    return d, y - d


def orbit(kind: str, N: int, seed, n: int, slack: float = 8.0) -> OrbitSample:
    """Iterate one of the maps ``n`` times in double precision.

    ``boundary`` lists the steps where ``N/x`` lies within a propagated
    rounding-error bound (times ``slack``) of an integer, i.e. where the
    float digit may disagree with the exact digit of the seed.
    """
    if N < 1 or n < 1:
        raise ValueError("need N >= 1 and n >= 1")
    if kind not in MAPS:
        raise ValueError(f"map must be one of {MAPS}")
    if kind == "NatExt":
        x, y = map(float, seed)
        if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0 / N):
            raise ValueError("NatExt seed must lie in [0,1] x [0,1/N]")
    else:
        x = float(seed if not isinstance(seed, tuple) else seed[0])
        y = 0.0
        if not 0.0 <= x <= 1.0:
            raise ValueError("seed must lie in [0, 1]")
    states = [(x, y)]
    digits, boundary = [], []
    eps = 2.0**-52
    err = eps * x
    for i in range(n):
        if kind == "F":
            if x > N / (N + 1):
                x, sym = N / x - N, N
            else:
                x, sym = N * x / (N - x), 1
            digits.append(sym)
        else:
            if x == 0.0:
                d, x, y = 0, 0.0, 0.0
            else:
                r = N / x
                err = err * r / x + 2 * eps * r       # |d(N/x)/dx| = r/x
                if abs(r - round(r)) <= slack * err:
                    boundary.append(i)
                d, x = _t_step(x, N)
                err += eps
                y = 1.0 / (N * y + d)
            digits.append(d)
        states.append((x, y))
    arr = np.array(states)
    return OrbitSample(
        kind, N, tuple(seed) if isinstance(seed, tuple) else (seed,),
        arr if kind == "NatExt" else arr[:, 0],
        np.array(digits, dtype=np.int64), np.array(boundary, dtype=np.int64),
    )


# -- Farey-like map, symbolic ------------------------------------------------


@dataclass
class FareyDigitReport:
    ok: bool
    trace: list[int]
    failures: list[str]


def farey_digit_semantics_check(digits: Sequence[int], N: int, steps: int) -> FareyDigitReport:
    """Check the decrement/shift action of ``F_N`` on a finite greedy digit list."""
    digits = list(digits)
    validate_greedy(digits, N)
    state = deque(digits)
    trace, failures = [], []
    for _ in range(steps):
        if not state:
            break
        head = state[0]
        before = list(state)
        if head > N:
            state[0] -= 1
            trace.append(1)
            expected = [head - 1] + before[1:]
        else:
            state.popleft()
            trace.append(N)
            expected = before[1:]
        if list(state) != expected:
            failures.append(f"step {len(trace)}: {before} -> {list(state)}")
    # d_1 - N + 1 steps carry (d_1, d_2, ...) to (d_2, ...)
    block = deque(digits)
    for _ in range(digits[0] - N + 1):
        if block[0] > N:
            block[0] -= 1
        else:
            block.popleft()
    if list(block) != digits[1:]:
        failures.append("block law: d_1 - N + 1 steps did not shift the digits")
    if trace != slow_digits(digits, N, len(trace)):
        failures.append("symbol trace differs from the slow expansion")
    return FareyDigitReport(not failures, trace, failures)


def farey_itinerary_exact(x: ExactReal, N: int, steps: int) -> list[int]:
    """Branch symbols of the exact ``F_N`` orbit of ``x``."""
    out = []
    for _ in range(steps):
        sym, x = farey_step_exact(x, N)
        out.append(sym)
    return out


def farey_invariance_check(a: float, b: float, N: int) -> float:
    """``|log(b/a) - measure of the two preimage intervals|`` for ``dx/x``."""
    if a <= 0:
        raise ValueError("a must be > 0; dx/x is infinite near 0")
    if not a <= b <= 1:
        raise ValueError("need 0 < a <= b <= 1")
    if a == b:
        return 0.0
    lower = (N * a / (N + a), N * b / (N + b))
    upper = (N / (N + b), N / (N + a))
    pre = sum(math.log(hi / lo) for lo, hi in (lower, upper))
    return abs(math.log(b / a) - pre)


# -- entropy -----------------------------------------------------------------


@dataclass
class EntropyReport:
    N: int
    formula_value: float
    rokhlin_value: float
    dilog_value: float
    formula_error: float
    rokhlin_error: float

    @property
    def sign_mismatch(self) -> bool:
        return (self.formula_value < 0) != (self.rokhlin_value < 0)

    @property
    def abs_gap(self) -> float:
        return abs(abs(self.formula_value) - self.rokhlin_value)

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "formula": self.formula_value,
            "rokhlin": self.rokhlin_value,
            "li2_integral": self.dilog_value,
            "formula_minus_rokhlin": self.formula_value - self.rokhlin_value,
            "abs_gap": self.abs_gap,
            "sign_mismatch": self.sign_mismatch,
            "quadrature_error": max(self.formula_error, self.rokhlin_error),
        }


class QuadratureError(ArithmeticError):
    pass


def _quad(f, a, b, tol=1e-12):
    val, err = integrate.quad(f, a, b, epsabs=tol, epsrel=tol, limit=200)
    if not err < 1e-9:
        raise QuadratureError(f"quadrature did not converge (error estimate {err:g})")
    return val, err


def li2_integral(x: float) -> tuple[float, float]:
    """``int_0^x log(t)/(1-t) dt`` and its error estimate, for ``x >= 0``."""
    # [0, 1] with t = exp(-s): the log singularity becomes -s e^-s / (1 - e^-s), smooth at 0
    head, e1 = _quad(lambda s: s * math.exp(-s) / math.expm1(-s) if s > 0 else -1.0, 0.0, math.inf)
    if x <= 1.0:
        if x == 1.0:
            return head, e1
        val, err = _quad(lambda t: math.log(t) / (1 - t), 0.0, x)
        return val, err

    def g(t):
        u = t - 1.0
        return -math.log1p(u) / u if u != 0 else -1.0

    tail, e2 = _quad(g, 1.0, x)
    return head + tail, e1 + e2


def entropy_formula(N: int) -> tuple[float, float, float]:
    """The printed entropy expression, evaluated as written.

    Returns ``(value, li2(N+1), error estimate)``.  No sign or branch
    correction is applied.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    li2, err = li2_integral(N + 1.0)
    num = math.pi**2 / 3 + 2 * li2 + math.log(N + 1) * math.log(N)
    den = math.log((N + 1) / N)
    return num / den, li2, 2 * err / den


def invariant_density(x, N: int):
    """Density of the absolutely continuous invariant probability of ``T_N``."""
    return 1.0 / (math.log((N + 1) / N) * (N + np.asarray(x, dtype=float)))


def rokhlin_entropy(N: int) -> tuple[float, float]:
    """``int_0^1 log(N/x^2) rho_N(x) dx`` by quadrature; returns ``(value, error)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    c = 1.0 / math.log((N + 1) / N)
    # x = exp(-t): dx = -x dt, log(N/x^2) = log N + 2t
    f = lambda t: (math.log(N) + 2 * t) * c * math.exp(-t) / (N + math.exp(-t))
    return _quad(f, 0.0, math.inf)


def entropy_report(N: int) -> EntropyReport:
    fv, li2, ferr = entropy_formula(N)
    rv, rerr = rokhlin_entropy(N)
    return EntropyReport(N, fv, rv, li2, ferr, rerr)


# -- growth rate -------------------------------------------------------------


@dataclass
class GrowthRate:
    log_q: np.ndarray             # (1/k) log q_k, k = 1..n
    log_sigma: np.ndarray         # (1/k) log |Sigma_k| = (1/k) log(p_{k-1} + q_{k-1})


def growth_rate(digits: Iterable[int], N: int, n: int) -> GrowthRate:
    cs = convergents(digits, N, n)
    k = np.arange(1, n + 1)
    log_q = np.array([math.log(c.q) for c in cs]) / k
    sig = [0.0] + [math.log(c.p + c.q) for c in cs[:-1]]
    return GrowthRate(log_q, np.array(sig) / k)


def random_digits(N: int, n: int, rng: np.random.Generator) -> list[int]:
    """Digits of the float ``T_N`` orbit of a uniform random start."""
    x = float(rng.random())
    out = []
    while len(out) < n:
        if x == 0.0:
            x = float(rng.random())
        d, x = _t_step(x, N)
        if d >= N:
            out.append(d)
    return out


def levy_constant(N: int) -> float:
    """``(h + log N) / 2`` with ``h`` the Rokhlin entropy."""
    return 0.5 * (rokhlin_entropy(N)[0] + math.log(N))


# -- invariant densities -----------------------------------------------------


@dataclass
class DensityCheck:
    map: str
    bins: int
    empirical: np.ndarray
    theoretical: np.ndarray
    edges: tuple[np.ndarray, ...]
    reseeds: int = 0

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.empirical - self.theoretical).max())

    @property
    def total_variation(self) -> float:
        return 0.5 * float(np.abs(self.empirical - self.theoretical).sum())

    def to_json(self) -> dict:
        return {
            "map": self.map,
            "bins": self.bins,
            "sup_norm": self.sup_norm,
            "total_variation": self.total_variation,
            "theoretical_total": float(self.theoretical.sum()),
            "reseeds": self.reseeds,
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["bin_lo_x", "bin_lo_y", "mass_empirical", "mass_theoretical"])
            if self.empirical.ndim == 1:
                for i, (e, t) in enumerate(zip(self.empirical, self.theoretical)):
                    out.writerow([self.edges[0][i], "", e, t])
            else:
                ex, ey = self.edges
                for i in range(self.bins):
                    for j in range(self.bins):
                        out.writerow([ex[i], ey[j], self.empirical[i, j], self.theoretical[i, j]])


@njit(cache=True)
def _natext_histogram(x, y, N, iters, burn, bins, reseed):
    h2 = np.zeros((bins, bins), np.int64)
    h1 = np.zeros(bins, np.int64)
    r = 0
    ymax = 1.0 / N
    for i in range(burn + iters):
        if x == 0.0:
            x = reseed[r % reseed.size]
            r += 1
        q = N / x
        d = math.floor(q)
        x = q - d
        y = 1.0 / (N * y + d)
        if i >= burn:
            bx = min(int(x * bins), bins - 1)
            by = min(int(y / ymax * bins), bins - 1)
            h2[bx, by] += 1
            h1[bx] += 1
    return h2, h1, r


def natext_masses(N: int, bins: int) -> np.ndarray:
    """Exact bin masses of ``dx dy / (1+xy)^2`` on ``[0,1] x [0,1/N]``, normalised."""
    ex = np.linspace(0.0, 1.0, bins + 1)
    ey = np.linspace(0.0, 1.0 / N, bins + 1)
    # a primitive of 1/(1+xy)^2 in both variables is log(1 + xy)
    F = np.log1p(np.outer(ex, ey))
    m = F[1:, 1:] - F[1:, :-1] - F[:-1, 1:] + F[:-1, :-1]
    return m / math.log((N + 1) / N)


def marginal_masses(N: int, bins: int) -> np.ndarray:
    e = np.linspace(0.0, 1.0, bins + 1)
    return np.log((N + e[1:]) / (N + e[:-1])) / math.log((N + 1) / N)


def natext_invariance_check(N: int, iterations: int = 10**7, bins: int = 20,
                            seed: int = 0, burn_in: int = 1000) -> tuple[DensityCheck, DensityCheck]:
    """Histogram a long natural-extension orbit against the invariant densities.

    Returns the 2-D check on ``[0,1] x [0,1/N]`` and the 1-D check of the
    ``x`` marginal against ``rho_N``.
    """
    if iterations < 10**5 or bins < 10:
        raise ValueError("need at least 1e5 iterations and 10 bins per axis")
    rng = np.random.default_rng(seed)
    x0 = float(rng.random())
    y0 = float(rng.random()) / N
    reseed = rng.random(1024)
    h2, h1, r = _natext_histogram(x0, y0, N, iterations, burn_in, bins, reseed)
    ex = np.linspace(0.0, 1.0, bins + 1)
    ey = np.linspace(0.0, 1.0 / N, bins + 1)
    two = DensityCheck("NatExt", bins, h2 / iterations, natext_masses(N, bins), (ex[:-1], ey[:-1]), int(r))
    one = DensityCheck("T", bins, h1 / iterations, marginal_masses(N, bins), (ex[:-1],), int(r))
    return two, one
