"""The acceptance suite as plain functions, shared by ``ncf verify`` and the tests."""

from __future__ import annotations

import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import analysis as an
from . import dynamics as dy
from . import expansion as ex
from . import words as wd
from .exact import Surd

EXAMPLE_PRIMAL = "0011001100110000110011001100001100110011000011001100110000110011001"
EXAMPLE_DUAL = "0010010010000100100100001001001000010010010000100100100100100001001"
EXAMPLE_SIGMA = {("primal", 2): "0011", ("primal", 3): "00110011001100", ("dual", 3): "00100100100"}


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d}. {self.title}"

    def to_json(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed, "details": self.details}


def digit_sequences(N: int, count: int, seed: int = 0, length: int = 80) -> list[tuple[str, list[int]]]:
    """A fixed family of greedy digit lists, long enough for 10^6-symbol prefixes."""
    rng = random.Random(seed * 1000 + N)
    fixed = [
        (f"const {N}", [N] * length),
        (f"const {N + 1}", [N + 1] * length),
        (f"arith {N},1", list(range(N, N + length))),
        (f"periodic {N},{N + 2}", [N, N + 2] * (length // 2)),
        (f"periodic {N + 3},{N}", [N + 3, N] * (length // 2)),
        (f"arith {N + 1},2", list(range(N + 1, N + 1 + 2 * length, 2))),
        (f"const {2 * N + 1}", [2 * N + 1] * length),
    ]
    out = fixed[:4] + [("random 0", [rng.randint(N, N + 9) for _ in range(length)])] + fixed[4:]
    i = 1
    while len(out) < count:
        out.append((f"random {i}", [rng.randint(N, N + 9) for _ in range(length)]))
        i += 1
    return out[:count]


def _stable_complexity(digits, N, n_max, flavor):
    size = 20_000
    while True:
        w = wd.limit_prefix(digits, N, size, flavor)
        try:
            return an.factor_complexity(w, n_max), size
        except an.PrefixTooShort:
            if size > 4_000_000:
                raise
            size *= 4


# -- criteria ----------------------------------------------------------------


def c01_exact_identities() -> CriterionResult:
    rng = random.Random(1)
    bad = []
    for trial in range(1000):
        N = rng.choice((1, 2, 3, 5))
        n = rng.randint(1, 12)
        ds = [rng.randint(N, N + 9) for _ in range(n)]
        cs = ex.convergents(ds, N)
        p, q = cs[-1].p, cs[-1].q
        p1, q1 = (cs[-2].p, cs[-2].q) if n > 1 else (0, 1)
        if q * p1 - p * q1 != (-N) ** n:
            bad.append(("determinant", N, ds))
        if ex.evaluate_cf(ds, N) != Fraction(p, q):
            bad.append(("evaluate_cf", N, ds))
        # the other cylinder endpoint is the expansion with d_n + 1
        other = ex.evaluate_cf(ds[:-1] + [ds[-1] + 1], N)
        width = abs(other - Fraction(p, q))
        if not (width == ex.cylinder(ds, N, n).width == Fraction(N**n, q * (q + q1))):
            bad.append(("cylinder", N, ds))
    return CriterionResult(1, "exact convergent identities", not bad, {"trials": 1000, "failures": bad[:5]})


def c02_periodicity() -> CriterionResult:
    x = Surd.make(-1, 1, 1, 2)
    ds = ex.greedy_digits(x, 2, 50)
    _, pre, per = ex.orbit_until_repeat(x, 2)
    ok = ds == [4, 2] * 25 and min(ds) >= 2 and (pre, per) == (0, 2)
    return CriterionResult(2, "periodic expansion of a quadratic surd", ok,
                           {"digits": ds[:6], "preperiod": pre, "period": per})


def c03_example_words() -> CriterionResult:
    src = ex.Arithmetic(2, 1)
    got = {
        "omega": str(wd.limit_prefix(src, 2, 67)) == EXAMPLE_PRIMAL,
        "omega_hat": str(wd.limit_prefix(src, 2, 67, "dual")) == EXAMPLE_DUAL,
    }
    for (flavor, k), text in EXAMPLE_SIGMA.items():
        got[f"{flavor} Sigma_{k}"] = str(wd.sigma_word(src, 2, k, flavor)) == text
    return CriterionResult(3, "printed example words reproduced", all(got.values()), got)


def c04_tau() -> CriterionResult:
    L = 100_000
    bad = []
    for N in (1, 2, 3, 5):
        for label, ds in digit_sequences(N, 5):
            image = wd.apply(wd.tau(N), wd.limit_prefix(ds, N, L, "dual"))
            if image[:L] != wd.limit_prefix(ds, N, L, "primal"):
                bad.append((N, label))
    return CriterionResult(4, "tau maps the dual word to the primal word", not bad, {"failures": bad})


def c05_blocks() -> CriterionResult:
    L = 100_000
    bad = []
    for N in (1, 2, 3, 5):
        for label, ds in digit_sequences(N, 5):
            d1 = ds[0]
            for flavor, ones in (("primal", N), ("dual", 1)):
                b = an.maximal_blocks(wd.limit_prefix(ds, N, L, flavor))
                if b[1] != {ones} or b[0] != {d1, d1 + N}:
                    bad.append((N, label, flavor, sorted(b[0]), sorted(b[1])))
    return CriterionResult(5, "maximal block lengths", not bad, {"failures": bad})


def c06_balance() -> CriterionResult:
    L, ell = 100_000, 2048
    bad, seen = [], {}
    for N in (2, 3, 4):
        for label, ds in digit_sequences(N, 5):
            for flavor, bound in (("dual", N), ("primal", N * N)):
                c = an.balance_profile(wd.limit_prefix(ds, N, L, flavor), ell).constant
                seen[f"N={N} {label} {flavor}"] = c
                if c > bound:
                    bad.append((N, label, flavor, c, bound))
        for K in (2 * N, 3 * N):
            bound = (K - 1) // (K + 1 - N) + 1
            c = an.balance_profile(wd.limit_prefix([K] * 80, N, L, "dual"), ell).constant
            seen[f"N={N} const {K} dual (bound {bound})"] = c
            if c > bound:
                bad.append((N, f"const {K}", "dual", c, bound))
    return CriterionResult(6, "balance upper bounds", not bad, {"failures": bad, "constants": seen})


def c07_imbalance() -> CriterionResult:
    """Witnesses must fit in the first ``|Sigma_4|`` symbols.

    Where the shortest witness in a longer prefix ends is reported too, since
    the primal pair can extend past ``|Sigma_4|``.
    """
    found, ok = {}, True
    for N in (2, 3):
        for label, ds in digit_sequences(N, 5):
            for flavor, target in (("dual", 2), ("primal", 2 * N)):
                lens = wd.sigma_lengths(ds, N, 5, flavor)
                w = wd.limit_prefix(ds, N, lens[5], flavor)
                inside = an.search_imbalance(w[:lens[4]], target)
                wit = an.search_imbalance(w, target)
                row = {"sigma4_length": lens[4], "inside_sigma4": inside is not None}
                if wit is not None:
                    u, v = wit.words(w)
                    row.update(length=wit.length, spread=wit.spread, u=str(u), v=str(v),
                               ends_at=max(wit.u_pos, wit.v_pos) + wit.length)
                found[f"N={N} {label} {flavor}"] = row
                ok &= inside is not None and inside.spread >= target
    return CriterionResult(7, "imbalance witnesses inside Sigma_4", ok, {"witnesses": found})


def c08_complexity() -> CriterionResult:
    n_max = 200
    bad, reported = [], {}
    for N in (1, 2, 3):
        for label, ds in digit_sequences(N, 10):
            for flavor in ("primal", "dual"):
                emp, size = _stable_complexity(ds, N, n_max, flavor)
                ref = an.complexity_closed_form(ds, N, n_max, flavor)
                diffs = emp.diffs()
                fine = (
                    emp.p == ref.p
                    and all(pn <= 2 * n for n, pn in enumerate(emp.p) if n >= 1)
                    and set(diffs) <= {1, 2}
                    and (N != 1 or emp.p == list(range(1, n_max + 2)))
                )
                if not fine:
                    bad.append((N, label, flavor))
                disc = an.compare_displayed(ds, N, n_max, flavor)
                if disc:
                    reported[f"N={N} {label} {flavor}"] = [(d.n, d.expected, str(d.displayed), d.band)
                                                          for d in disc[:6]]
    return CriterionResult(8, "factor complexity equals the closed form", not bad,
                           {"failures": bad, "displayed_form_discrepancies": reported})


def c09_special() -> CriterionResult:
    src = list(range(2, 40))
    N = 2
    t3 = wd.thresholds(src, N, 3, "dual")[3][1]
    w = wd.limit_prefix(src, N, 200_000, "dual")
    ls = an.left_special_many(w, range(0, t3 + 1))
    T = [wd.special_words(src, N, k, "dual") for k in (1, 2, 3)]
    maximal = [f.word for n in sorted(ls) for f in ls[n].factors if f.is_maximal and not f.is_prefix]
    got = {
        "LS2": ls[2].words == {"00"},
        "LS3": ls[3].words == {"000", "001"},
        "maximal": maximal == [str(t) for _, t in T],
        "lcp": all(an.longest_common_prefix(t, w) == s for s, t in T),
    }
    return CriterionResult(9, "left special factors", all(got.values()), {**got, "maximal_found": maximal})


def c10_frequencies() -> CriterionResult:
    L = 1_000_000
    rows, ok = {}, True
    for N in (1, 2, 3):
        for label, ds in digit_sequences(N, 5):
            w = wd.limit_prefix(ds, N, L, "primal")
            cs = [c for c in ex.convergents(ds[:40], N) if c.q <= 1000]
            ratio = w.count(1) / w.count(0)
            err = abs(ratio - cs[-1].p / cs[-1].q)
            factors = [wd.word("0"), wd.word("1"), wd.limit_prefix(ds, N, 3), wd.limit_prefix(ds, N, 8)]
            dev = max(an.frequency_report(w, u, 16).max_deviation for u in factors)
            rows[f"N={N} {label}"] = {"ratio_error": err, "m": cs[-1].n, "window_deviation": dev}
            ok &= err < 1e-3 and dev < 1e-2
    return CriterionResult(10, "letter and factor frequencies", ok, rows)


def c11_entropy() -> CriterionResult:
    r1 = dy.rokhlin_entropy(1)[0]
    reports = {N: dy.entropy_report(N) for N in range(1, 6)}
    gauss = abs(r1 - math.pi**2 / (6 * math.log(2))) < 1e-9
    per_n = {N: r.abs_gap < 1e-6 and r.sign_mismatch for N, r in reports.items()}
    return CriterionResult(11, "entropy formula against the Rokhlin integral", gauss and all(per_n.values()),
                           {"gauss_entropy_ok": gauss, "per_N_ok": per_n,
                            "reports": {N: r.to_json() for N, r in reports.items()}})


def c12_growth() -> CriterionResult:
    rows, ok = {}, True
    for N in (1, 2, 3):
        rng = np.random.default_rng(12 + N)
        vals = [dy.growth_rate(dy.random_digits(N, 5000, rng), N, 5000).log_q[-1] for _ in range(100)]
        target = math.pi**2 / (12 * math.log(2)) if N == 1 else dy.levy_constant(N)
        rel = abs(float(np.mean(vals)) - target) / target
        rows[f"random N={N}"] = {"mean": float(np.mean(vals)), "target": target, "rel_error": rel}
        ok &= rel < 0.02
    for N in (1, 2, 3, 5):
        v = dy.growth_rate([N] * 1000, N, 1000).log_q[-1]
        target = math.log((N + math.sqrt(N * N + 4 * N)) / 2)
        rows[f"const N={N}"] = {"value": float(v), "target": target, "abs_error": abs(v - target)}
        ok &= abs(v - target) < 1e-3
    return CriterionResult(12, "growth rate of denominators", ok, rows)


def c13_farey() -> CriterionResult:
    rng = random.Random(13)
    sem_bad = []
    for _ in range(1000):
        N = rng.choice((1, 2, 3, 5))
        ds = [rng.randint(N, N + 9) for _ in range(rng.randint(1, 12))]
        rep = dy.farey_digit_semantics_check(ds, N, sum(d - N + 1 for d in ds))
        if not rep.ok:
            sem_bad.append((N, ds, rep.failures[:2]))
    conj_bad = []
    for x, N in ((Surd.make(-1, 1, 1, 2), 2), (Surd.make(-1, 1, 2, 5), 1), (Surd.make(-3, 1, 1, 13), 3)):
        slow = ex.slow_digits(ex.greedy_digits(x, N, 60), N, 60)
        if dy.farey_itinerary_exact(x, N, 60) != slow:
            conj_bad.append(str(x))
    frng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(100):
        a, b = sorted(frng.uniform(1e-3, 1.0, 2))
        for N in (1, 2, 3, 5):
            worst = max(worst, dy.farey_invariance_check(float(a), float(b), N))
    mat_bad = []
    for N in (1, 2, 3, 5):
        B, D = wd.incidence(wd.tau_b(N)), wd.incidence(wd.tau_d(N))
        for d in range(N, N + 21):
            if B ** (d - N) @ D != wd.incidence(wd.primal(d, N)).scaled(N ** (d - N)):
                mat_bad.append((N, d))
    ok = not sem_bad and not conj_bad and worst < 1e-12 and not mat_bad
    return CriterionResult(13, "Farey map semantics, invariance and matrices", ok,
                           {"semantic_failures": sem_bad[:3], "conjugacy_failures": conj_bad,
                            "max_invariance_residual": worst, "matrix_failures": mat_bad})


def c14_natext() -> CriterionResult:
    rows, ok = {}, True
    for N in (1, 2):
        two, one = dy.natext_invariance_check(N, 10**7, 20, seed=14)
        rows[f"N={N}"] = {"2d": two.to_json(), "1d": one.to_json()}
        ok &= two.total_variation < 0.05 and one.total_variation < 0.05
    return CriterionResult(14, "natural extension invariant density", ok, rows)


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: c01_exact_identities, 2: c02_periodicity, 3: c03_example_words, 4: c04_tau,
    5: c05_blocks, 6: c06_balance, 7: c07_imbalance, 8: c08_complexity,
    9: c09_special, 10: c10_frequencies, 11: c11_entropy, 12: c12_growth,
    13: c13_farey, 14: c14_natext,
}


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("NCF_THREADS", "1")))
    except ValueError:
        return 1


def run(numbers=None, threads: int | None = None) -> list[CriterionResult]:
    """Run the selected criteria; results come back in criterion order."""
    numbers = sorted(CRITERIA) if numbers is None else sorted(numbers)
    unknown = [n for n in numbers if n not in CRITERIA]
    if unknown:
        raise ValueError(f"unknown criteria {unknown}; valid are 1..{len(CRITERIA)}")
    threads = thread_count() if threads is None else threads
    if threads == 1:
        return [CRITERIA[n]() for n in numbers]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(lambda n: CRITERIA[n](), numbers))
