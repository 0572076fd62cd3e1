"""Binary words, the NCF substitutions and the limit words they generate."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .expansion import DomainError, InsufficientDigits


class BinaryWord:
    """A finite word over ``{0, 1}``.

    The word is kept either as a ``uint8`` symbol array or as a run-length
    block list ``[(letter, length), ...]``; whichever form is missing is
    materialised on first use.
    """

    __slots__ = ("_bits", "_runs")

    def __init__(self, bits=None, runs=None):
        if bits is None and runs is None:
            bits = np.zeros(0, dtype=np.uint8)
        if bits is not None:
            bits = np.ascontiguousarray(bits, dtype=np.uint8)
            if bits.ndim != 1 or (bits.size and bits.max() > 1):
                raise ValueError("binary words hold symbols 0 and 1 only")
            bits.setflags(write=False)
        self._bits = bits
        self._runs = None if runs is None else tuple(_merge_runs(runs))

    @classmethod
    def from_str(cls, text: str) -> "BinaryWord":
        text = text.strip()
        if set(text) - {"0", "1"}:
            raise ValueError("word text may contain only '0' and '1'")
        return cls(np.frombuffer(text.encode(), dtype=np.uint8) - ord("0"))

    @classmethod
    def from_runs(cls, runs: Iterable[tuple[int, int]]) -> "BinaryWord":
        return cls(runs=list(runs))

    @property
    def bits(self) -> np.ndarray:
        if self._bits is None:
            letters = np.array([a for a, _ in self._runs], dtype=np.uint8)
            counts = np.array([n for _, n in self._runs], dtype=np.int64)
            bits = np.repeat(letters, counts)
            bits.setflags(write=False)
            self._bits = bits
        return self._bits

    @property
    def runs(self) -> tuple[tuple[int, int], ...]:
        if self._runs is None:
            b = self._bits
            if b.size == 0:
                self._runs = ()
            else:
                edges = np.flatnonzero(np.diff(b)) + 1
                starts = np.concatenate(([0], edges))
                lengths = np.diff(np.concatenate((starts, [b.size])))
                self._runs = tuple(zip(b[starts].tolist(), lengths.tolist()))
        return self._runs

    def __len__(self) -> int:
        if self._bits is not None:
            return int(self._bits.size)
        return sum(n for _, n in self._runs)

    def __str__(self) -> str:
        return (self.bits + ord("0")).tobytes().decode()

    def __repr__(self) -> str:
        s = str(self) if len(self) <= 40 else str(self[:37]) + "..."
        return f"BinaryWord({s!r})"

    def __eq__(self, other) -> bool:
        if isinstance(other, str):
            other = BinaryWord.from_str(other)
        if not isinstance(other, BinaryWord):
            return NotImplemented
        return len(self) == len(other) and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    def __getitem__(self, item):
        if isinstance(item, slice):
            return BinaryWord(self.bits[item])
        return int(self.bits[item])

    def __add__(self, other: "BinaryWord") -> "BinaryWord":
        return BinaryWord(np.concatenate((self.bits, other.bits)))

    def __mul__(self, k: int) -> "BinaryWord":
        return BinaryWord(np.tile(self.bits, k))

    def count(self, letter: int) -> int:
        return int(np.count_nonzero(self.bits)) if letter else len(self) - int(np.count_nonzero(self.bits))

    def startswith(self, prefix: "BinaryWord") -> bool:
        n = len(prefix)
        return n <= len(self) and bool(np.array_equal(self.bits[:n], prefix.bits))

    def to_rle(self) -> str:
        return ",".join(f"{n}:{a}" for a, n in self.runs)

    @classmethod
    def from_rle(cls, text: str) -> "BinaryWord":
        runs = []
        for tok in filter(None, (t.strip() for t in text.strip().split(","))):
            n, a = tok.split(":")
            if a not in ("0", "1") or int(n) < 0:
                raise ValueError(f"bad RLE token {tok!r}")
            runs.append((int(a), int(n)))
        return cls.from_runs(runs)


def _merge_runs(runs):
    out: list[list[int]] = []
    for a, n in runs:
        if a not in (0, 1) or n < 0:
            raise ValueError(f"bad run ({a}, {n})")
        if n == 0:
            continue
        if out and out[-1][0] == a:
            out[-1][1] += n
        else:
            out.append([a, n])
    return [tuple(r) for r in out]


def word(text: str) -> BinaryWord:
    return BinaryWord.from_str(text)


def read_word(path) -> BinaryWord:
    with open(path) as fh:
        text = fh.read().strip()
    if ":" in text:
        return BinaryWord.from_rle(text)
    return BinaryWord.from_str(text)


def write_word(path, w: BinaryWord, rle: bool = False) -> None:
    with open(path, "w") as fh:
        fh.write((w.to_rle() if rle else str(w)) + "\n")


# -- substitutions -----------------------------------------------------------


@dataclass(frozen=True)
class AbelianVector:
    count0: int
    count1: int

    def __iter__(self):
        return iter((self.count0, self.count1))


def abelianize(w: BinaryWord) -> AbelianVector:
    ones = w.count(1)
    return AbelianVector(len(w) - ones, ones)


@dataclass(frozen=True)
class Matrix2:
    """2x2 integer matrix; entry ``(i, j)`` counts letter ``i`` in the image of ``j``."""

    m00: int
    m01: int
    m10: int
    m11: int

    @classmethod
    def identity(cls) -> "Matrix2":
        return cls(1, 0, 0, 1)

    def __matmul__(self, o: "Matrix2") -> "Matrix2":
        return Matrix2(
            self.m00 * o.m00 + self.m01 * o.m10,
            self.m00 * o.m01 + self.m01 * o.m11,
            self.m10 * o.m00 + self.m11 * o.m10,
            self.m10 * o.m01 + self.m11 * o.m11,
        )

    def __pow__(self, k: int) -> "Matrix2":
        out, base = Matrix2.identity(), self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def scaled(self, k: int) -> "Matrix2":
        return Matrix2(k * self.m00, k * self.m01, k * self.m10, k * self.m11)

    def det(self) -> int:
        return self.m00 * self.m11 - self.m01 * self.m10

    def transpose(self) -> "Matrix2":
        return Matrix2(self.m00, self.m10, self.m01, self.m11)

    def apply(self, v: AbelianVector) -> AbelianVector:
        c0, c1 = v
        return AbelianVector(self.m00 * c0 + self.m01 * c1, self.m10 * c0 + self.m11 * c1)

    def rows(self) -> list[list[int]]:
        return [[self.m00, self.m01], [self.m10, self.m11]]

    def to_json(self) -> list[list[str]]:
        return [[str(v) for v in row] for row in self.rows()]


@dataclass(frozen=True)
class SubstitutionRule:
    image0: BinaryWord
    image1: BinaryWord
    label: str

    def __post_init__(self):
        if len(self.image0) == 0 or len(self.image1) == 0:
            raise ValueError("substitution images must be nonempty")


def _z(n: int) -> BinaryWord:
    return BinaryWord(runs=[(0, n)])


def _o(n: int) -> BinaryWord:
    return BinaryWord(runs=[(1, n)])


def primal(d: int, N: int) -> SubstitutionRule:
    """``0 -> 0^d 1^N``, ``1 -> 0``."""
    return SubstitutionRule(BinaryWord(runs=[(0, d), (1, N)]), _z(1), f"primal({d},{N})")


def dual(d: int, N: int) -> SubstitutionRule:
    """``0 -> 0^d 1``, ``1 -> 0^N``."""
    return SubstitutionRule(BinaryWord(runs=[(0, d), (1, 1)]), _z(N), f"dual({d},{N})")


def tau(N: int) -> SubstitutionRule:
    return SubstitutionRule(_z(1), _o(N), f"tau({N})")


def tau_b(N: int) -> SubstitutionRule:
    return SubstitutionRule(_z(N), BinaryWord(runs=[(0, 1), (1, N)]), f"tauB({N})")


def tau_d(N: int) -> SubstitutionRule:
    return SubstitutionRule(BinaryWord(runs=[(0, N), (1, N)]), _z(1), f"tauD({N})")


def apply(rule: SubstitutionRule, w: BinaryWord) -> BinaryWord:
    """Concatenate the images of the letters of ``w``."""
    images = (rule.image0.bits, rule.image1.bits)
    lengths = np.array([images[0].size, images[1].size], dtype=np.int64)
    bits = w.bits
    if bits.size == 0:
        return BinaryWord()
    ends = np.cumsum(lengths[bits])
    out = np.empty(int(ends[-1]), dtype=np.uint8)
    starts = ends - lengths[bits]
    for a in (0, 1):
        idx = starts[bits == a]
        img = images[a]
        if idx.size:
            # scatter the image at every start position of letter a
            out[(idx[:, None] + np.arange(img.size)).ravel()] = np.tile(img, idx.size)
    return BinaryWord(out)


def incidence(rule: SubstitutionRule) -> Matrix2:
    a0, a1 = abelianize(rule.image0), abelianize(rule.image1)
    return Matrix2(a0.count0, a1.count0, a0.count1, a1.count1)


# -- directive sequences -----------------------------------------------------


class _Digits:
    """1-indexed, lazily pulled view of a digit iterable."""

    def __init__(self, digits: Iterable[int]):
        self._it: Iterator[int] = iter(digits)
        self._buf: list[int] = []

    def __getitem__(self, n: int) -> int:
        while len(self._buf) < n:
            try:
                d = next(self._it)
            except StopIteration:
                raise InsufficientDigits(
                    f"digit d_{n} requested but the source has only {len(self._buf)} digits"
                ) from None
            if d < 1:
                raise DomainError("digits must be >= 1")
            self._buf.append(d)
        return self._buf[n - 1]

    @property
    def used(self) -> list[int]:
        return list(self._buf)


def as_digits(digits: Iterable[int]) -> _Digits:
    return digits if isinstance(digits, _Digits) else _Digits(digits)


def _tile_to(block: np.ndarray, k: int, limit: int | None) -> np.ndarray:
    if limit is not None and block.size:
        k = min(k, -(-limit // block.size))
    return np.tile(block, k)


def _sigma_arrays(digits: _Digits, N: int, k: int, flavor: str, limit: int | None = None):
    """Yield ``(j, Sigma_j)`` for ``j = 0..k`` (or until ``len > limit``)."""
    if flavor not in ("primal", "dual"):
        raise ValueError("flavor must be 'primal' or 'dual'")
    prev = np.array([1], dtype=np.uint8)
    cur = np.array([0], dtype=np.uint8)
    yield 0, prev
    if k == 0:
        return
    yield 1, cur
    for j in range(1, k):
        d = digits[j]
        if j == 1:
            nxt = np.concatenate((np.zeros(d, np.uint8), np.ones(N if flavor == "primal" else 1, np.uint8)))
        else:
            head = _tile_to(cur, d, limit)
            if limit is not None and head.size >= limit:
                nxt = head[:limit]
            else:
                rest = None if limit is None else limit - head.size
                nxt = np.concatenate((head, _tile_to(prev, N, rest)))
                if limit is not None:
                    nxt = nxt[:limit]
        prev, cur = cur, nxt
        yield j + 1, cur
        if limit is not None and cur.size >= limit:
            return


def sigma_word(digits: Iterable[int], N: int, k: int, flavor: str = "primal") -> BinaryWord:
    """``Sigma_k`` (primal) or ``hat Sigma_k`` (dual) by block concatenation.

    ``Sigma_0 = 1``, ``Sigma_1 = 0`` and ``Sigma_{n+1} = Sigma_n^{d_n} Sigma_{n-1}^N``;
    the dual word starts from ``hat Sigma_2 = 0^{d_1} 1`` instead of ``0^{d_1} 1^N``.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    ds = as_digits(digits)
    for j, arr in _sigma_arrays(ds, N, k, flavor):
        if j == k:
            return BinaryWord(arr)
    raise AssertionError("unreachable")


def sigma_lengths(digits: Iterable[int], N: int, k: int, flavor: str = "primal") -> list[int]:
    """``[|Sigma_0|, ..., |Sigma_k|]`` without building the words."""
    ds = as_digits(digits)
    lens = [1, 1]
    for j in range(1, k):
        if j == 1:
            lens.append(ds[1] + (N if flavor == "primal" else 1))
        else:
            lens.append(ds[j] * lens[j] + N * lens[j - 1])
    return lens[: k + 1]


def limit_prefix_with_depth(digits: Iterable[int], N: int, min_len: int,
                            flavor: str = "primal") -> tuple[BinaryWord, int, list[int]]:
    """Like :func:`limit_prefix` but also returns the depth ``k`` and digits used."""
    if min_len < 1:
        raise ValueError("min_len must be >= 1")
    ds = as_digits(digits)
    for j, arr in _sigma_arrays(ds, N, 1 << 62, flavor, limit=min_len):
        if j >= 1 and arr.size >= min_len:
            return BinaryWord(arr[:min_len]), j, ds.used
    raise AssertionError("unreachable")


def limit_prefix(digits: Iterable[int], N: int, min_len: int, flavor: str = "primal") -> BinaryWord:
    """The length-``min_len`` prefix of ``omega(x, N)`` or its dual."""
    return limit_prefix_with_depth(digits, N, min_len, flavor)[0]


def special_words(digits: Iterable[int], N: int, k: int,
                  flavor: str = "primal") -> tuple[BinaryWord, BinaryWord]:
    """``(S_k, T_k)`` with ``S_k = Sigma_k^{d_k} ... Sigma_1^{d_1}`` and
    ``T_k = Sigma_k^{N-1} S_k``; primal ``k = 0`` gives ``(empty, 1^{N-1})``."""
    if k == 0:
        if flavor == "dual":
            raise ValueError("dual special words start at k = 1")
        return BinaryWord(), BinaryWord(runs=[(1, N - 1)])
    ds = as_digits(digits)
    sig = [arr for _, arr in _sigma_arrays(ds, N, k, flavor)]
    s = np.concatenate([np.tile(sig[j], ds[j]) for j in range(k, 0, -1)])
    t = np.concatenate((np.tile(sig[k], N - 1), s))
    return BinaryWord(s), BinaryWord(t)


def thresholds(digits: Iterable[int], N: int, k_max: int, flavor: str = "primal"):
    """Band thresholds ``[(s_k, t_k)]`` for ``k = 0..k_max`` from word lengths.

    ``s_k = sum_j d_j |Sigma_j|`` and ``t_k = s_k + (N-1)|Sigma_k|``; the
    ``k = 0`` entry is ``(0, N-1)`` for the primal flavor and ``(0, 0)`` for
    the dual one.
    """
    ds = as_digits(digits)
    lens = sigma_lengths(ds, N, k_max, flavor)
    out = [(0, N - 1 if flavor == "primal" else 0)]
    s = 0
    for k in range(1, k_max + 1):
        s += ds[k] * lens[k]
        out.append((s, s + (N - 1) * lens[k]))
    return out


def matrix_product(digits: Iterable[int], N: int, n: int) -> Matrix2:
    """``M_{sigma_1} ... M_{sigma_n}``."""
    ds = as_digits(digits)
    out = Matrix2.identity()
    for j in range(1, n + 1):
        out = out @ incidence(primal(ds[j], N))
    return out


def slow_limit_prefix(slow: Iterable[int], N: int, min_len: int) -> BinaryWord:
    """Prefix of the limit word of slow symbols (``1 -> tauB``, ``N -> tauD``).

    Keeps the images of both letters under ``sigma_1 o ... o sigma_n``
    truncated to ``min_len``; since every image starts with 0 the image of 0
    is a prefix of the limit word.
    """
    if N == 1:
        raise ValueError("slow symbols 1 and N coincide for N = 1; the directive sequence is ambiguous")
    rules = {1: tau_b(N), N: tau_d(N)}
    img = [np.array([0], np.uint8), np.array([1], np.uint8)]
    for sym in slow:
        if sym not in rules:
            raise DomainError(f"slow symbol {sym} not in {{1, {N}}}")
        rule = rules[sym]
        new = []
        for image in (rule.image0.bits, rule.image1.bits):
            parts, size = [], 0
            for a in image:
                parts.append(img[a])
                size += img[a].size
                if size >= min_len:
                    break
            new.append(np.concatenate(parts)[:min_len])
        img = new
        if img[0].size >= min_len:
            return BinaryWord(img[0])
    raise InsufficientDigits("slow sequence exhausted before the prefix reached the requested length")
