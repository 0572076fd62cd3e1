import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncfseq.analysis import (
    PrefixTooShort, balance_profile, compare_displayed, complexity_closed_form,
    complexity_displayed, factor_complexity, find_imbalance_witness, frequency_report,
    left_special, longest_common_prefix, maximal_blocks, maximal_left_special, occurrences,
    search_imbalance,
)
from ncfseq.expansion import Arithmetic
from ncfseq.words import limit_prefix, special_words, thresholds, word

EX = Arithmetic(2, 1)
DUAL = limit_prefix(EX, 2, 100_000, "dual")
PRIMAL = limit_prefix(EX, 2, 100_000)


def brute_factors(text, n):
    return {text[i:i + n] for i in range(len(text) - n + 1)}


def brute_left_special(text, n):
    fs = brute_factors(text, n + 1)
    return {u for u in brute_factors(text, n) if "0" + u in fs and "1" + u in fs}


class TestBalance:
    def test_dual_example(self):
        prof = balance_profile(DUAL, 64)
        assert prof.spread[3] == 2 and prof.constant == 2
        wit = find_imbalance_witness(DUAL, 4, 2)
        assert tuple(map(str, wit.words(DUAL))) == ("0000", "1001")

    def test_primal_example(self):
        wit = find_imbalance_witness(PRIMAL, 18, 4)
        u, v = wit.words(PRIMAL)
        assert wit.spread == 4
        assert u == "00" + "0011" * 3 + "0000"
        assert v == "11" + "0011" * 3 + "0011"
        assert search_imbalance(PRIMAL, 4).length == 18

    def test_no_witness_beyond_bound(self):
        assert find_imbalance_witness(DUAL, 4, 3) is None
        w = find_imbalance_witness(DUAL, 7, 0)
        assert (w.u_pos, w.v_pos, w.spread) == (0, 0, 0)

    def test_sturmian_is_balanced(self):
        w = limit_prefix([1, 2, 1, 3, 1, 1, 4] * 10, 1, 100_000)
        assert balance_profile(w, 1024).constant <= 1

    def test_constant_word(self):
        assert balance_profile(word("0" * 50), 50).constant == 0

    def test_bad_length(self):
        with pytest.raises(ValueError):
            balance_profile(word("0101"), 5)

    @given(st.text(alphabet="01", min_size=1, max_size=80))
    def test_profile_matches_brute_force(self, text):
        ell_max = len(text)
        prof = balance_profile(word(text), ell_max)
        for ell in range(1, ell_max + 1):
            counts = [text[i:i + ell].count("1") for i in range(len(text) - ell + 1)]
            assert (prof.min1[ell - 1], prof.max1[ell - 1]) == (min(counts), max(counts))


class TestComplexity:
    def test_examples(self):
        p = factor_complexity(DUAL, 14).p
        assert p[1] == 2 and p[3] == 4 and p[4] == 6
        assert brute_factors(str(DUAL), 3) == {"000", "001", "010", "100"}
        assert p[12] == len(brute_factors(str(DUAL), 12)) == 14
        w3 = limit_prefix(Arithmetic(3, 1), 3, 100_000)
        assert factor_complexity(w3, 2).p[2] == 4

    def test_sturmian(self):
        w = limit_prefix([1, 3, 2, 1, 1, 5] * 15, 1, 100_000)
        assert factor_complexity(w, 50).p == list(range(1, 52))

    def test_closed_form_examples(self):
        d = complexity_closed_form(EX, 2, 14, "dual")
        assert d.p[3] == 4 and d.p[4] == 6 and d.p[12] == 14
        assert d.thresholds[:3] == [(0, 0), (2, 3), (11, 14)]
        p = complexity_closed_form(EX, 2, 4, "primal")
        assert p.p[2] == 4 and p.p[3] == 5
        assert complexity_closed_form(itertools.repeat(1), 1, 30).p == list(range(1, 32))

    @pytest.mark.parametrize("flavor", ["primal", "dual"])
    @pytest.mark.parametrize("N", [1, 2, 3])
    def test_empirical_equals_closed_form(self, N, flavor):
        ds = [N + (i * 7) % 5 for i in range(60)]
        emp = factor_complexity(limit_prefix(ds, N, 60_000, flavor), 120)
        assert emp.p == complexity_closed_form(ds, N, 120, flavor).p

    def test_refinement_matches_brute_force(self):
        text = str(DUAL[:3000])
        p = factor_complexity(word(text), 40, check=False).p
        assert p == [len(brute_factors(text, n)) for n in range(41)]

    def test_prefix_too_short(self):
        with pytest.raises(PrefixTooShort):
            factor_complexity(DUAL[:60], 40)
        with pytest.raises(PrefixTooShort):
            factor_complexity(DUAL[:10], 40)

    def test_displayed_forms_are_reported(self):
        disc = compare_displayed(EX, 2, 20, "dual")
        assert [(d.n, d.delta, d.band) for d in disc] == [(3, 1, "2"), (12, 1, "2"), (13, 1, "2"), (14, 1, "2")]
        shown = complexity_displayed(EX, 2, 20, "primal")
        assert shown[3] == 7 and complexity_closed_form(EX, 2, 3, "primal").p[3] == 5


class TestSpecialFactors:
    def test_examples(self):
        r2, r3 = left_special(DUAL, 2), left_special(DUAL, 3)
        assert r2.words == {"00"}
        (f,) = r2.factors
        assert f.is_prefix and f.is_total_bispecial
        assert r3.words == {"000", "001"}
        flags = {f.word: f for f in r3.factors}
        assert flags["001"].is_prefix and flags["000"].is_maximal

    def test_against_brute_force(self):
        text = str(DUAL[:20_000])
        for n in range(0, 30):
            assert left_special(DUAL, n).words == brute_left_special(text, n)

    def test_maximal_are_T_words(self):
        t3 = thresholds(EX, 2, 3, "dual")[3][1]
        found = maximal_left_special(DUAL, t3)
        assert found == [str(special_words(EX, 2, k, "dual")[1]) for k in (1, 2, 3)]
        for k in (1, 2, 3):
            s, t = special_words(EX, 2, k, "dual")
            assert longest_common_prefix(t, DUAL) == s

    def test_unstable(self):
        with pytest.raises(PrefixTooShort):
            left_special(DUAL[:100], 12)


class TestBlocksAndFrequencies:
    def test_blocks(self):
        assert maximal_blocks(PRIMAL) == {0: {2, 4}, 1: {2}}
        assert maximal_blocks(DUAL) == {0: {2, 4}, 1: {1}}
        assert maximal_blocks(word("0110")) == {0: set(), 1: {2}}

    def test_periodic_frequency(self):
        rep = frequency_report(word("01" * 500), word("01"), 5)
        assert np.allclose(rep.frequencies, 0.5) and rep.max_deviation == 0

    def test_uniform_frequency(self):
        w = limit_prefix(EX, 2, 1_000_000)
        assert frequency_report(w, word("0011"), 16).max_deviation < 1e-2

    def test_occurrences(self):
        assert occurrences(word("010010"), word("010")).nonzero()[0].tolist() == [0, 3]
        assert occurrences(word("01"), word("011")).size == 0

    def test_frequency_errors(self):
        with pytest.raises(ValueError):
            frequency_report(word("0101"), word(""), 2)
        with pytest.raises(ValueError):
            frequency_report(word("0101"), word("010"), 4)
