"""Balance, factor complexity, special factors and frequencies of binary words."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .expansion import convergents
from .words import BinaryWord, as_digits, thresholds


class PrefixTooShort(ValueError):
    """Counts on a prefix and on its half disagree, so the prefix is too short."""


# -- balance -----------------------------------------------------------------


@dataclass
class BalanceProfile:
    lengths: np.ndarray
    min1: np.ndarray
    max1: np.ndarray
    argmin: np.ndarray
    argmax: np.ndarray

    @property
    def spread(self) -> np.ndarray:
        return self.max1 - self.min1

    @property
    def constant(self) -> int:
        return int(self.spread.max()) if self.spread.size else 0

    def to_json(self) -> list[dict]:
        return [
            {"length": int(l), "min1": int(lo), "max1": int(hi), "spread": int(hi - lo)}
            for l, lo, hi in zip(self.lengths, self.min1, self.max1)
        ]


def _window_ones(bits: np.ndarray, ell: int, csum: np.ndarray | None = None) -> np.ndarray:
    if csum is None:
        csum = np.concatenate(([0], np.cumsum(bits, dtype=np.int64)))
    return csum[ell:] - csum[:-ell]


def balance_profile(w: BinaryWord, ell_max: int) -> BalanceProfile:
    """Extreme counts of letter 1 over all windows of each length ``1..ell_max``."""
    bits = w.bits
    if ell_max < 1 or ell_max > bits.size:
        raise ValueError(f"ell_max must be in [1, {bits.size}], got {ell_max}")
    csum = np.concatenate(([0], np.cumsum(bits, dtype=np.int64)))
    lo = np.empty(ell_max, np.int64)
    hi = np.empty(ell_max, np.int64)
    alo = np.empty(ell_max, np.int64)
    ahi = np.empty(ell_max, np.int64)
    for i, ell in enumerate(range(1, ell_max + 1)):
        counts = csum[ell:] - csum[:-ell]
        alo[i] = counts.argmin()
        ahi[i] = counts.argmax()
        lo[i] = counts[alo[i]]
        hi[i] = counts[ahi[i]]
    return BalanceProfile(np.arange(1, ell_max + 1), lo, hi, alo, ahi)


@dataclass(frozen=True)
class ImbalanceWitness:
    length: int
    u_pos: int
    v_pos: int
    spread: int

    def words(self, w: BinaryWord) -> tuple[BinaryWord, BinaryWord]:
        return w[self.u_pos:self.u_pos + self.length], w[self.v_pos:self.v_pos + self.length]


def find_imbalance_witness(w: BinaryWord, ell: int, target: int) -> ImbalanceWitness | None:
    """Windows ``u``, ``v`` of length ``ell`` with ``|v|_1 - |u|_1 >= target``, if any."""
    if ell < 1 or ell > len(w):
        raise ValueError(f"window length must be in [1, {len(w)}]")
    if target <= 0:
        return ImbalanceWitness(ell, 0, 0, 0)
    counts = _window_ones(w.bits, ell)
    i, j = int(counts.argmin()), int(counts.argmax())
    spread = int(counts[j] - counts[i])
    return ImbalanceWitness(ell, i, j, spread) if spread >= target else None


def search_imbalance(w: BinaryWord, target: int, ell_max: int | None = None) -> ImbalanceWitness | None:
    """Shortest window length admitting a pair with spread ``>= target``."""
    bits = w.bits
    ell_max = bits.size if ell_max is None else min(ell_max, bits.size)
    csum = np.concatenate(([0], np.cumsum(bits, dtype=np.int64)))
    for ell in range(1, ell_max + 1):
        counts = csum[ell:] - csum[:-ell]
        i, j = int(counts.argmin()), int(counts.argmax())
        if counts[j] - counts[i] >= target:
            return ImbalanceWitness(ell, i, j, int(counts[j] - counts[i]))
    return None


# -- factor classes ----------------------------------------------------------


@dataclass
class _Level:
    n: int
    ids: np.ndarray          # class id of the window starting at i, i = 0..L-n
    count: int               # number of distinct factors of length n
    ls_mask: np.ndarray      # ls_mask[c]: class c has both left extensions


def _levels(bits: np.ndarray, n_max: int) -> Iterator[_Level]:
    """Exact classes of length-n windows for n = 0..n_max.

    Windows of length ``n+1`` are identified by (class of their length-n
    prefix, last letter), so relabelling through a presence table keeps ids
    dense and comparisons exact.
    """
    L = bits.size
    bits64 = bits.astype(np.int64)
    ids = np.zeros(L + 1, np.int64)
    count = 1
    for n in range(0, n_max + 1):
        # left extensions: window at i >= 1 is preceded by bits[i-1]
        if L - n >= 1:
            key = ids[1:] * 2 + bits64[: L - n]
            present = np.zeros(2 * count, bool)
            present[key] = True
            ls_mask = present[0::2] & present[1::2]
        else:
            ls_mask = np.zeros(count, bool)
        yield _Level(n, ids, count, ls_mask)
        if n == n_max or L - n - 1 < 0:
            return
        key = ids[: L - n] * 2 + bits64[n:]
        present = np.zeros(2 * count, bool)
        present[key] = True
        remap = np.cumsum(present) - 1
        ids = remap[key]
        count = int(present.sum())


@dataclass
class ComplexityProfile:
    """``p[n]`` for ``n = 0..n_max``; ``ls_counts[n]`` and ``bands[n]`` describe
    the step from ``n`` to ``n + 1``."""

    p: list[int]
    ls_counts: list[int]
    thresholds: list[tuple[int, int]] = field(default_factory=list)
    bands: list[str] = field(default_factory=list)

    def diffs(self) -> list[int]:
        return [b - a for a, b in zip(self.p, self.p[1:])]

    def to_json(self) -> list[dict]:
        out = []
        for n, pn in enumerate(self.p):
            row = {"n": n, "p": pn}
            if n < len(self.ls_counts):
                row["ls_count"] = self.ls_counts[n]
            if n < len(self.bands):
                row["band"] = self.bands[n]
            out.append(row)
        return out


def _raw_complexity(bits: np.ndarray, n_max: int) -> tuple[list[int], list[int]]:
    p, ls = [], []
    for lev in _levels(bits, n_max):
        p.append(lev.count)
        ls.append(int(lev.ls_mask.sum()))
    return p, ls


def factor_complexity(w: BinaryWord, n_max: int, check: bool = True) -> ComplexityProfile:
    """Exact number of distinct factors of each length ``0..n_max`` of ``w``.

    With ``check`` the counts are recomputed on the first half of ``w`` and
    must agree, otherwise :class:`PrefixTooShort` is raised.
    """
    bits = w.bits
    if n_max + 1 > bits.size:
        raise PrefixTooShort(f"word of length {bits.size} cannot show factors of length {n_max}")
    p, ls = _raw_complexity(bits, n_max)
    if check:
        half = bits[: bits.size // 2]
        if n_max + 1 > half.size:
            raise PrefixTooShort("word too short for the stabilisation check")
        p_half, ls_half = _raw_complexity(half, n_max)
        if p_half != p or ls_half != ls:
            bad = next(n for n in range(n_max + 1) if p_half[n] != p[n] or ls_half[n] != ls[n])
            raise PrefixTooShort(f"factor counts not stable at n = {bad}; use a longer prefix")
    return ComplexityProfile(p, ls)


def _thresholds_covering(digits, N: int, n_max: int, flavor: str) -> list[tuple[int, int]]:
    ds = as_digits(digits)
    k = 1
    while True:
        th = thresholds(ds, N, k, flavor)
        if th[-1][1] >= n_max:
            return th
        k += 1


def complexity_closed_form(digits: Iterable[int], N: int, n_max: int,
                           flavor: str = "primal") -> ComplexityProfile:
    """Prefix sums of the left-special difference law.

    ``p(0) = 1`` and ``p(n+1) - p(n)`` is 2 on the bands ``(s_k, t_k]`` and 1
    elsewhere; for the primal word the ``k = 0`` band is ``(0, N-1]``.
    """
    th = _thresholds_covering(digits, N, n_max, flavor)
    p, ls, bands = [1], [], []
    for n in range(n_max):
        in_two = n >= 1 and any(s < n <= t for s, t in th)
        d = 2 if in_two else 1
        ls.append(d)
        bands.append("2" if in_two else "1")
        p.append(p[-1] + d)
    return ComplexityProfile(p, ls, th, bands)


def complexity_displayed(digits: Iterable[int], N: int, n_max: int,
                         flavor: str = "primal") -> list[int]:
    """Re-evaluate the printed closed-form complexity expressions verbatim."""
    ds = as_digits(digits)
    th = _thresholds_covering(ds, N, n_max, flavor)
    kmax = len(th) + 1
    cs = convergents([ds[j] for j in range(1, kmax + 1)], N)
    pq = {-1: (1, 0), 0: (0, 1)}
    for c in cs:
        pq[c.n] = (c.p, c.q)
    out = []
    for n in range(n_max + 1):
        if n == 0:
            out.append(1)
            continue
        if flavor == "primal":
            if n <= N - 1:
                out.append(2 * n)
                continue
            val = None
            for k in range(len(th)):
                acc = sum(pq[j][0] + pq[j][1] for j in range(-1, k)) * (N - 1)
                s_k, t_k = th[k]
                if k + 1 < len(th) and t_k < n <= th[k + 1][0]:
                    val = n + 1 + acc
                    break
                if k >= 1 and s_k < n <= t_k:
                    val = 2 * n + 1 + acc - s_k
                    break
            out.append(val)
        else:
            val = None
            for k in range(1, len(th)):
                acc = sum(Fraction(pq[j][0], N) + pq[j][1] for j in range(0, k - 1)) * (N - 1)
                if th[k - 1][1] < n <= th[k][0]:
                    val = n + 1 + acc
                    break
                if th[k][0] < n <= th[k][1]:
                    val = 2 * n + 1 + acc - th[k][0]
                    break
            out.append(int(val) if val is not None and val == int(val) else val)
    return out


@dataclass(frozen=True)
class Discrepancy:
    n: int
    expected: int
    displayed: int
    band: str

    @property
    def delta(self) -> int:
        return self.displayed - self.expected


def compare_displayed(digits, N: int, n_max: int, flavor: str = "primal") -> list[Discrepancy]:
    """Positions where the printed closed form departs from the difference law."""
    ds = as_digits(digits)
    ref = complexity_closed_form(ds, N, n_max, flavor)
    shown = complexity_displayed(ds, N, n_max, flavor)
    out = []
    for n in range(n_max + 1):
        if shown[n] != ref.p[n]:
            two = n >= 1 and any(s < n <= t for s, t in ref.thresholds)
            out.append(Discrepancy(n, ref.p[n], shown[n], "2" if two else "1"))
    return out


# -- special factors ---------------------------------------------------------


@dataclass(frozen=True)
class SpecialFactor:
    word: str
    is_prefix: bool
    is_maximal: bool
    is_total_bispecial: bool


@dataclass
class SpecialFactorReport:
    n: int
    factors: list[SpecialFactor]

    @property
    def words(self) -> set[str]:
        return {f.word for f in self.factors}


def _special_reports(bits: np.ndarray, n_values: set[int]) -> dict[int, SpecialFactorReport]:
    n_top = max(n_values) + 1
    reports: dict[int, SpecialFactorReport] = {}
    prev = None
    for lev in _levels(bits, n_top):
        if prev is not None and prev.n in n_values:
            reports[prev.n] = _report_level(bits, prev, lev)
        prev = lev
    return reports


def _report_level(bits: np.ndarray, lev: _Level, nxt: _Level) -> SpecialFactorReport:
    n = lev.n
    m = nxt.ids.size            # windows of length n+1
    ids_n = lev.ids[:m]
    ext = bits[n:n + m]
    table = np.full((lev.count, 2), -1, np.int64)
    table[ids_n, ext] = nxt.ids
    _, first = np.unique(lev.ids, return_index=True)
    prefix_class = lev.ids[0]
    factors = []
    for c in np.flatnonzero(lev.ls_mask):
        pos = int(first[c])
        u = str(BinaryWord(bits[pos:pos + n]))
        ext_ls = [table[c, a] >= 0 and bool(nxt.ls_mask[table[c, a]]) for a in (0, 1)]
        factors.append(SpecialFactor(u, bool(c == prefix_class), not any(ext_ls), all(ext_ls)))
    factors.sort(key=lambda f: f.word)
    return SpecialFactorReport(n, factors)


def left_special(w: BinaryWord, n: int, check: bool = True) -> SpecialFactorReport:
    """Left special factors of length ``n`` with prefix/maximal/bispecial flags."""
    return left_special_many(w, [n], check)[n]


def left_special_many(w: BinaryWord, ns: Iterable[int], check: bool = True) -> dict[int, SpecialFactorReport]:
    ns = set(ns)
    bits = w.bits
    if max(ns) + 2 > bits.size:
        raise PrefixTooShort("word too short for the requested factor length")
    reports = _special_reports(bits, ns)
    if check:
        half = _special_reports(bits[: bits.size // 2], ns)
        for n in ns:
            if half[n].factors != reports[n].factors:
                raise PrefixTooShort(f"left special factors of length {n} not stable; use a longer prefix")
    return reports


def maximal_left_special(w: BinaryWord, n_max: int, check: bool = True) -> list[str]:
    """All maximal left special factors of length ``<= n_max`` that are not prefixes."""
    reps = left_special_many(w, range(0, n_max + 1), check)
    return [f.word for n in sorted(reps) for f in reps[n].factors if f.is_maximal and not f.is_prefix]


def longest_common_prefix(a: BinaryWord, b: BinaryWord) -> BinaryWord:
    m = min(len(a), len(b))
    diff = np.flatnonzero(a.bits[:m] != b.bits[:m])
    k = int(diff[0]) if diff.size else m
    return a[:k]


# -- blocks and frequencies ---------------------------------------------------


def maximal_blocks(w: BinaryWord) -> dict[int, set[int]]:
    """Lengths of runs flanked on both sides by the other letter."""
    runs = w.runs
    out: dict[int, set[int]] = {0: set(), 1: set()}
    for a, n in runs[1:-1]:
        out[a].add(n)
    return out


@dataclass
class FrequencyReport:
    factor: str
    windows: int
    window_length: int
    frequencies: np.ndarray

    @property
    def mean(self) -> float:
        return float(self.frequencies.mean())

    @property
    def max_deviation(self) -> float:
        return float(np.abs(self.frequencies - self.frequencies.mean()).max())

    def to_json(self) -> dict:
        return {
            "factor": self.factor,
            "windows": self.windows,
            "window_length": self.window_length,
            "mean": self.mean,
            "max_deviation": self.max_deviation,
            "frequencies": self.frequencies.tolist(),
        }


def occurrences(w: BinaryWord, u: BinaryWord) -> np.ndarray:
    """Boolean mask of start positions of ``u`` in ``w``."""
    bits, ub = w.bits, u.bits
    m = ub.size
    span = bits.size - m + 1
    if span <= 0:
        return np.zeros(0, bool)
    mask = np.ones(span, bool)
    for j in range(m):
        mask &= bits[j:j + span] == ub[j]
    return mask


def frequency_report(w: BinaryWord, u: BinaryWord, windows: int) -> FrequencyReport:
    """Occurrence frequency of ``u`` in ``windows`` disjoint blocks of ``w``."""
    if len(u) == 0 or windows < 1:
        raise ValueError("need a nonempty factor and at least one window")
    size = len(w) // windows
    if size < len(u):
        raise ValueError("windows shorter than the factor")
    freqs = np.empty(windows)
    for i in range(windows):
        block = w[i * size:(i + 1) * size]
        freqs[i] = occurrences(block, u).sum() / size
    return FrequencyReport(str(u), windows, size, freqs)
