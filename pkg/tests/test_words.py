import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncfseq.expansion import Arithmetic, DomainError, InsufficientDigits, convergents
from ncfseq.words import (
    BinaryWord, Matrix2, abelianize, apply, dual, incidence, limit_prefix,
    limit_prefix_with_depth, matrix_product, primal, read_word, sigma_lengths, sigma_word,
    slow_limit_prefix, special_words, tau, tau_b, tau_d, thresholds, word, write_word,
)

EX = Arithmetic(2, 1)   # digits 2, 3, 4, ...


def naive_apply(images, text):
    return "".join(images[int(c)] for c in text)


def naive_limit(digits, N, length, flavor):
    """Compose the substitutions letter by letter on strings."""
    ds = list(digits)
    for depth in range(1, len(ds) + 1):
        w = "0"
        for d in reversed(ds[:depth]):
            img = {0: "0" * d + ("1" * N if flavor == "primal" else "1"),
                   1: "0" if flavor == "primal" else "0" * N}
            w = naive_apply(img, w)
        if len(w) >= length:
            return w[:length]
    raise AssertionError("not enough digits")


class TestBinaryWord:
    def test_roundtrips(self):
        w = word("0011101")
        assert w.runs == ((0, 2), (1, 3), (0, 1), (1, 1))
        assert BinaryWord.from_runs(w.runs) == w
        assert BinaryWord.from_rle(w.to_rle()) == w
        assert w.to_rle() == "2:0,3:1,1:0,1:1"

    def test_ops(self):
        w = word("0110")
        assert len(w) == 4 and w[1] == 1 and w[1:3] == "11"
        assert w + word("1") == "01101"
        assert w * 2 == "01100110"
        assert (w.count(0), w.count(1)) == (2, 2)
        assert w.startswith(word("01")) and not w.startswith(word("1"))
        assert len(BinaryWord()) == 0 and BinaryWord().runs == ()

    def test_immutable(self):
        with pytest.raises(ValueError):
            word("01").bits[0] = 1

    @pytest.mark.parametrize("bad", ["012", "a"])
    def test_rejects_other_letters(self, bad):
        with pytest.raises(ValueError):
            word(bad)

    def test_bad_rle(self):
        with pytest.raises(ValueError):
            BinaryWord.from_rle("3:2")

    def test_file_formats(self, tmp_path):
        w = limit_prefix(EX, 2, 500)
        for rle in (False, True):
            p = tmp_path / f"w{rle}.txt"
            write_word(p, w, rle=rle)
            assert read_word(p) == w
        assert (tmp_path / "wFalse.txt").read_text() == str(w) + "\n"

    @given(st.text(alphabet="01", max_size=200))
    def test_runs_and_bits_agree(self, text):
        w = word(text)
        assert str(BinaryWord.from_runs(w.runs)) == text
        assert tuple(abelianize(w)) == (text.count("0"), text.count("1"))


class TestSubstitutions:
    def test_images(self):
        assert (primal(3, 2).image0, primal(3, 2).image1) == ("00011", "0")
        assert (dual(3, 2).image0, dual(3, 2).image1) == ("0001", "00")
        assert (tau(3).image0, tau(3).image1) == ("0", "111")
        assert (tau_b(2).image0, tau_b(2).image1) == ("00", "011")
        assert (tau_d(2).image0, tau_d(2).image1) == ("0011", "0")

    def test_apply_examples(self):
        assert apply(primal(2, 2), word("1")) == "0"
        assert apply(dual(2, 2), word("0")) == "001"
        assert apply(tau(2), word("001")) == "0011"

    @given(st.integers(1, 6), st.integers(1, 6), st.text(alphabet="01", max_size=60))
    def test_apply_matches_naive(self, d, N, text):
        for rule in (primal(d, N), dual(d, N), tau(N), tau_b(N), tau_d(N)):
            images = {0: str(rule.image0), 1: str(rule.image1)}
            assert str(apply(rule, word(text))) == naive_apply(images, text)

    @given(st.integers(1, 6), st.integers(1, 6), st.text(alphabet="01", max_size=60))
    def test_abelianization_commutes(self, d, N, text):
        rule = primal(d, N)
        w = word(text)
        assert abelianize(apply(rule, w)) == incidence(rule).apply(abelianize(w))

    def test_incidence_examples(self):
        assert incidence(primal(3, 2)).rows() == [[3, 1], [2, 0]]
        assert incidence(dual(3, 2)) == incidence(primal(3, 2)).transpose()
        assert incidence(tau_b(2)).rows() == [[2, 1], [0, 2]]
        assert (incidence(tau_b(2)) @ incidence(tau_d(2))).rows() == [[6, 2], [4, 0]]

    @pytest.mark.parametrize("N", [1, 2, 3, 5])
    def test_slow_matrix_identity(self, N):
        B, D = incidence(tau_b(N)), incidence(tau_d(N))
        for d in range(N, N + 21):
            assert B ** (d - N) @ D == incidence(primal(d, N)).scaled(N ** (d - N))

    def test_matrix_product(self):
        m = matrix_product([2, 3], 2, 2)
        assert m.rows() == [[8, 2], [6, 2]] and m.det() == 4
        assert matrix_product([2, 3], 2, 0) == Matrix2.identity()
        assert m.to_json() == [["8", "2"], ["6", "2"]]

    @settings(max_examples=50)
    @given(st.integers(1, 5).flatmap(lambda N: st.tuples(
        st.just(N), st.lists(st.integers(N, N + 9), min_size=1, max_size=10))))
    def test_matrix_product_holds_convergents(self, case):
        N, ds = case
        m = matrix_product(ds, N, len(ds))
        cs = convergents(ds, N)
        prev = (cs[-2].p, cs[-2].q) if len(ds) > 1 else (0, 1)
        assert m.rows() == [[cs[-1].q, prev[1]], [cs[-1].p, prev[0]]]
        assert m.det() == (-N) ** len(ds)


class TestSigmaWords:
    def test_examples(self):
        assert sigma_word(EX, 2, 0) == "1" and sigma_word(EX, 2, 1) == "0"
        assert sigma_word(EX, 2, 2) == "0011"
        assert sigma_word(EX, 2, 3) == "00110011001100"
        assert sigma_word(EX, 2, 3, "dual") == "00100100100"

    def test_lengths_are_convergent_sums(self):
        ds = [3, 2, 5, 2, 4, 3, 2]
        lens = sigma_lengths(ds, 2, 7)
        assert lens == [len(sigma_word(ds, 2, k)) for k in range(8)]
        cs = convergents(ds, 2)
        assert lens[2:] == [c.p + c.q for c in cs[:-1]]

    def test_limit_prefix_examples(self):
        assert limit_prefix(EX, 2, 20) == "00110011001100001100"
        assert limit_prefix(EX, 2, 20, "dual") == "00100100100001001001"

    def test_fibonacci_word(self):
        fib = "0"
        while len(fib) < 200:
            fib = naive_apply({0: "01", 1: "0"}, fib)
        assert limit_prefix(itertools.repeat(1), 1, 13) == "0100101001001"
        assert limit_prefix(itertools.repeat(1), 1, 200) == fib[:200]

    @settings(max_examples=60)
    @given(st.integers(1, 4).flatmap(lambda N: st.tuples(
        st.just(N), st.lists(st.integers(N, N + 6), min_size=12, max_size=12))),
        st.sampled_from(["primal", "dual"]))
    def test_limit_prefix_matches_string_composition(self, case, flavor):
        N, ds = case
        assert str(limit_prefix(ds, N, 300, flavor)) == naive_limit(ds, N, 300, flavor)

    def test_depth_and_digits_reported(self):
        w, k, used = limit_prefix_with_depth(EX, 2, 67)
        assert len(w) == 67 and sigma_lengths(EX, 2, k)[k] >= 67 and used == list(range(2, 2 + len(used)))

    def test_exhausted_source(self):
        with pytest.raises(InsufficientDigits):
            limit_prefix([2, 3], 2, 10**4)

    def test_nonpositive_digit(self):
        with pytest.raises(DomainError):
            limit_prefix([2, 0, 3], 2, 100)

    @pytest.mark.parametrize("N", [1, 2, 3, 5])
    def test_tau_correspondence(self, N):
        ds = [N + (i % 4) for i in range(60)]
        img = apply(tau(N), limit_prefix(ds, N, 20_000, "dual"))
        assert img[:20_000] == limit_prefix(ds, N, 20_000)

    def test_shift_commutation(self):
        # the limit word of (d_1, d_2, ...) is sigma_1 of the limit word of (d_2, ...)
        ds = [3, 2, 4, 2, 5, 3, 2, 2, 6, 3, 2, 4]
        for flavor, rule in (("primal", primal), ("dual", dual)):
            inner = limit_prefix(ds[1:], 2, 2000, flavor)
            assert apply(rule(ds[0], 2), inner)[:2000] == limit_prefix(ds, 2, 2000, flavor)


class TestSpecialWords:
    def test_examples(self):
        assert special_words(EX, 2, 1, "dual") == (word("00"), word("000"))
        assert special_words(EX, 3, 0) == (BinaryWord(), word("11"))
        s2, t2 = special_words(EX, 2, 2, "dual")
        assert s2 == "00100100100" and s2 == sigma_word(EX, 2, 2, "dual") * 3 + sigma_word(EX, 2, 1, "dual") * 2
        assert t2 == sigma_word(EX, 2, 2, "dual") + s2 and len(t2) == 14

    def test_dual_k0(self):
        with pytest.raises(ValueError):
            special_words(EX, 2, 0, "dual")

    def test_thresholds(self):
        assert thresholds(EX, 2, 3, "dual") == [(0, 0), (2, 3), (11, 14), (55, 66)]
        assert thresholds(EX, 2, 1) == [(0, 1), (2, 3)]
        # lengths of S_k and T_k are the thresholds
        for k in (1, 2, 3):
            s, t = special_words(EX, 2, k, "dual")
            assert (len(s), len(t)) == thresholds(EX, 2, k, "dual")[k]


class TestSlowLimit:
    def test_examples(self):
        assert slow_limit_prefix(itertools.repeat(2), 2, 8) == "00110011"
        assert slow_limit_prefix([1], 2, 2) == "00"

    def test_errors(self):
        with pytest.raises(InsufficientDigits):
            slow_limit_prefix([1], 2, 50)
        with pytest.raises(DomainError):
            slow_limit_prefix([3], 2, 5)
        with pytest.raises(ValueError):
            slow_limit_prefix([1], 1, 5)

    def test_well_defined_prefixes(self):
        slow = [1, 2, 1, 1, 2, 2, 1, 2] * 10
        a = slow_limit_prefix(slow, 2, 300)
        b = slow_limit_prefix(slow, 2, 1000)
        assert b.startswith(a)
