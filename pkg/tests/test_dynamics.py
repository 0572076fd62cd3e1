import csv
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from ncfseq.dynamics import (
    entropy_formula, entropy_report, farey_digit_semantics_check, farey_invariance_check,
    growth_rate, invariant_density, levy_constant, li2_integral, marginal_masses,
    natext_invariance_check, natext_masses, orbit, random_digits, rokhlin_entropy,
)
from ncfseq.expansion import DomainError, cylinder_width_formula, greedy_digits, slow_digits

GAUSS_H = math.pi**2 / (6 * math.log(2))


class TestOrbit:
    def test_examples(self):
        o = orbit("T", 2, 0.75, 1)
        assert o.digits.tolist() == [2] and math.isclose(o.states[1], 2 / 3)
        assert math.isclose(orbit("F", 2, 0.5, 1).states[1], 2 / 3)
        assert orbit("NatExt", 3, (0.0, 0.2), 1).states[1].tolist() == [0.0, 0.0]

    def test_digits_match_exact_expansion(self):
        from ncfseq.exact import Surd
        x = Surd.make(-2, 1, 1, 7)
        assert orbit("T", 3, float(x), 10).digits.tolist() == greedy_digits(x, 3, 10)

    def test_terminal_digit_disagreement_is_flagged(self):
        x = Fraction(12345, 67891)
        exact = greedy_digits(x, 2, 10)
        o = orbit("T", 2, float(x), len(exact))
        bad = [i for i, (a, b) in enumerate(zip(o.digits.tolist(), exact)) if a != b]
        assert bad and set(bad) <= set(o.boundary.tolist())

    def test_farey_symbols(self):
        o = orbit("F", 2, math.sqrt(2) - 1, 12)
        assert o.digits.tolist() == slow_digits([4, 2] * 6, 2, 12)

    def test_boundary_flag(self):
        assert orbit("T", 2, 0.5, 1).boundary.tolist() == [0]

    @pytest.mark.parametrize("args", [("T", 0, 0.5, 1), ("T", 2, 1.5, 1), ("X", 2, 0.5, 1),
                                      ("NatExt", 2, (0.5, 0.9), 1)])
    def test_bad_arguments(self, args):
        with pytest.raises(ValueError):
            orbit(*args)


class TestFarey:
    def test_semantics(self):
        rep = farey_digit_semantics_check([4, 2], 2, 10)
        assert rep.ok and rep.trace == [1, 1, 2, 2]
        assert farey_digit_semantics_check([3, 2, 5], 2, 1).trace == [1]
        assert farey_digit_semantics_check([2, 7], 2, 1).trace == [2]

    def test_not_greedy(self):
        with pytest.raises(DomainError):
            farey_digit_semantics_check([1, 3], 2, 3)

    def test_invariance(self):
        assert farey_invariance_check(0.25, 0.5, 2) < 1e-12
        assert farey_invariance_check(0.1, 1.0, 5) < 1e-12
        assert farey_invariance_check(0.3, 0.3, 2) == 0.0
        with pytest.raises(ValueError):
            farey_invariance_check(0.0, 0.5, 2)

    def test_preimages_are_the_orbit_preimages(self):
        # points of the claimed preimage intervals land in (a, b) under F
        a, b, N = 0.2, 0.45, 3
        for x in np.linspace(N * a / (N + a), N * b / (N + b), 7)[1:-1]:
            assert a < orbit("F", N, float(x), 1).states[1] < b
        for x in np.linspace(N / (N + b), N / (N + a), 7)[1:-1]:
            assert a < orbit("F", N, float(x), 1).states[1] < b


class TestEntropy:
    def test_dilog_values(self):
        assert math.isclose(li2_integral(1.0)[0], -math.pi**2 / 6, abs_tol=1e-10)
        assert math.isclose(li2_integral(2.0)[0], -math.pi**2 / 4, abs_tol=1e-10)
        val = integrate.quad(lambda t: math.log(t) / (1 - t), 0, 0.5)[0]
        assert math.isclose(li2_integral(0.5)[0], val, abs_tol=1e-10)

    def test_formula_n1(self):
        v, li2, _ = entropy_formula(1)
        assert math.isclose(v, -GAUSS_H, abs_tol=1e-9)

    def test_rokhlin_n1(self):
        assert abs(rokhlin_entropy(1)[0] - GAUSS_H) < 1e-9

    @pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
    def test_rokhlin_against_closed_form(self, N):
        # log N + (2/L) * integral of -log x/(N+x) = log N - 2 Li2(-1/N) / L
        from mpmath import polylog
        L = math.log((N + 1) / N)
        closed = math.log(N) - 2 * float(polylog(2, -1 / N)) / L
        assert abs(rokhlin_entropy(N)[0] - closed) < 1e-9
        assert rokhlin_entropy(N)[0] > 0

    def test_sign_flagged(self):
        for N in range(1, 6):
            assert entropy_report(N).sign_mismatch

    def test_bad_N(self):
        with pytest.raises(ValueError):
            entropy_formula(0)
        with pytest.raises(ValueError):
            rokhlin_entropy(0)


class TestGrowth:
    def test_first_term(self):
        assert math.isclose(growth_rate([7, 3], 2, 2).log_q[0], math.log(7))

    @pytest.mark.parametrize("N", [1, 2, 3, 5])
    def test_constant_digits(self, N):
        lam = (N + math.sqrt(N * N + 4 * N)) / 2
        assert abs(growth_rate([N] * 1000, N, 1000).log_q[-1] - math.log(lam)) < 1e-3

    def test_word_length_form(self):
        g = growth_rate([2, 3, 4, 5], 2, 4)
        assert g.log_sigma[0] == 0 and math.isclose(g.log_sigma[2] * 3, math.log(14))

    def test_levy_n1(self):
        rng = np.random.default_rng(7)
        vals = [growth_rate(random_digits(1, 2000, rng), 1, 2000).log_q[-1] for _ in range(30)]
        assert abs(np.mean(vals) - math.pi**2 / (12 * math.log(2))) < 0.03 * levy_constant(1)

    def test_cylinder_shrinkage(self):
        rng = np.random.default_rng(3)
        N, n = 2, 3000
        vals = []
        for _ in range(20):
            ds = random_digits(N, n, rng)
            w = cylinder_width_formula(ds, N, n)
            vals.append((math.log(w.denominator) - math.log(w.numerator)) / n)
        assert abs(np.mean(vals) - rokhlin_entropy(N)[0]) < 0.03 * rokhlin_entropy(N)[0]


class TestDensities:
    @pytest.mark.parametrize("N", [1, 2, 3])
    def test_masses_normalised(self, N):
        assert abs(natext_masses(N, 20).sum() - 1) < 1e-9
        assert abs(marginal_masses(N, 20).sum() - 1) < 1e-9

    def test_masses_match_numerical_integration(self):
        N, bins = 2, 4
        m = natext_masses(N, bins)
        L = math.log((N + 1) / N)
        f = lambda y, x: 1 / (L * (1 + x * y) ** 2)
        for i, j in [(0, 0), (1, 3), (3, 2)]:
            val = integrate.dblquad(f, i / bins, (i + 1) / bins, j / (N * bins), (j + 1) / (N * bins))[0]
            assert abs(val - m[i, j]) < 1e-10
        marg = integrate.quad(lambda x: invariant_density(x, N), 0.25, 0.5)[0]
        assert abs(marg - marginal_masses(N, bins)[1]) < 1e-12

    def test_short_run(self, tmp_path):
        two, one = natext_invariance_check(2, 10**6, 10, seed=1)
        assert two.total_variation < 0.05 and one.total_variation < 0.05
        path = tmp_path / "hist.csv"
        two.write_csv(path)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["bin_lo_x", "bin_lo_y", "mass_empirical", "mass_theoretical"]
        assert len(rows) == 101

    def test_deterministic(self):
        a, _ = natext_invariance_check(1, 10**5, 10, seed=5)
        b, _ = natext_invariance_check(1, 10**5, 10, seed=5)
        assert np.array_equal(a.empirical, b.empirical)

    def test_discrepancy_shrinks_with_length(self):
        short, _ = natext_invariance_check(2, 10**5, 10, seed=2)
        long, _ = natext_invariance_check(2, 10**7, 10, seed=2)
        assert long.total_variation < short.total_variation

    def test_preconditions(self):
        with pytest.raises(ValueError):
            natext_invariance_check(2, 10**4, 20)
        with pytest.raises(ValueError):
            natext_invariance_check(2, 10**5, 5)
