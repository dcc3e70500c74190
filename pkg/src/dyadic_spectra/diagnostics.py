"""Finite-scale diagnostics for normality and pair-frequency membership.

Positions are 1-based throughout. R(N, i) is the set of 2**i (2k - 1)
below 2**N, i.e. the positions of 2-adic valuation i in [1, 2**N). It
splits into three parts by magnitude:

    I   = R(N-2, i)            (below 2**(N-2))
    II  = R(N-1, i) - R(N-2, i)
    III = R(N, i) - R(N-1, i)
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .measure import as_word

PARTS = ("I", "II", "III")
PAIRS = ("00", "01", "10", "11")


def digit_frequency(word) -> float:
    w = as_word(word)
    return float(w.mean())


def pair_count(word) -> int:
    w = as_word(word)
    half = len(w) // 2
    return int(np.count_nonzero(w[:half] & w[1 : 2 * half : 2]))


def pair_frequency(word) -> float:
    """Fraction of k <= n/2 with w_k = w_2k = 1."""
    half = len(as_word(word)) // 2
    if half == 0:
        return 0.0
    return pair_count(word) / half


# ---------------------------------------------------------------------------
# R-sets and X statistics


def _r_full(N: int, i: int) -> np.ndarray:
    if N - i - 1 < 0:
        return np.empty(0, dtype=np.int64)
    k = np.arange(1, 2 ** (N - i - 1) + 1, dtype=np.int64)
    return (2 * k - 1) << i


def r_set(N: int, i: int, part: str | None = None) -> np.ndarray:
    """Sorted positions of R(N, i), or of one of its parts I/II/III."""
    if i < 0 or i > N - 1:
        raise ValueError(f"need 0 <= i <= N-1, got N={N}, i={i}")
    if part is None:
        return _r_full(N, i)
    if part not in PARTS:
        raise ValueError(f"part must be one of {PARTS}, got {part!r}")
    if i > N - 3:
        raise ValueError(f"parts need 0 <= i <= N-3, got N={N}, i={i}")
    if part == "I":
        return _r_full(N - 2, i)
    if part == "II":
        return np.setdiff1d(_r_full(N - 1, i), _r_full(N - 2, i))
    return np.setdiff1d(_r_full(N, i), _r_full(N - 1, i))


@dataclass
class XTable:
    """Counts over R(N, i-1, part) of (w_n, w_2n) = k1k2, plus digit marginals.

    ``pair[i][k1k2][part]`` for i = 1..m, part in I, II;
    ``single[i][k1][part]`` for i = 0..m, part in I, II, III.
    """

    N: int
    m: int
    pair: dict = field(default_factory=dict)
    single: dict = field(default_factory=dict)

    def X(self, i: int, code: str, part: str) -> int:
        if len(code) == 2:
            return self.pair[i][code][part]
        return self.single[i][code][part]

    def relations(self) -> list[tuple[int, int, int, int]]:
        """(relation number, i, lhs, rhs) for the eight bookkeeping identities."""
        X = self.X
        out = []
        for i in range(1, self.m + 1):
            out += [
                (1, i, X(i, "10", "I") + X(i, "11", "I"), X(i - 1, "1", "I")),
                (2, i, X(i, "00", "I") + X(i, "01", "I"), X(i - 1, "0", "I")),
                (3, i, X(i, "10", "II") + X(i, "11", "II"), X(i - 1, "1", "II")),
                (4, i, X(i, "00", "II") + X(i, "01", "II"), X(i - 1, "0", "II")),
                (5, i, X(i, "01", "I") + X(i, "11", "I"), X(i, "1", "I") + X(i, "1", "II")),
                (6, i, X(i, "00", "I") + X(i, "10", "I"), X(i, "0", "I") + X(i, "0", "II")),
                (7, i, X(i, "01", "II") + X(i, "11", "II"), X(i, "1", "III")),
                (8, i, X(i, "00", "II") + X(i, "10", "II"), X(i, "0", "III")),
            ]
        return out

    def relations_hold(self) -> bool:
        return all(lhs == rhs for _, _, lhs, rhs in self.relations())

    def to_json(self) -> str:
        return json.dumps({"N": self.N, "m": self.m, "pair": self.pair, "single": self.single})


def _part_index(pos: np.ndarray, N: int) -> np.ndarray:
    # 0 -> I, 1 -> II, 2 -> III
    return (pos > 2 ** (N - 2)).astype(np.int64) + (pos > 2 ** (N - 1))


def _valuation(pos: np.ndarray) -> np.ndarray:
    low = pos & -pos
    return np.log2(low).astype(np.int64)


def x_table(word, m: int) -> XTable:
    """Tally the X statistics of a word of length 2**N, for levels up to m.

    One vectorised pass: every position is binned by (valuation, part,
    own bit, child bit) with ``bincount``.
    """
    w = as_word(word)
    n = len(w)
    if n < 1 or n & (n - 1):
        raise ValueError(f"word length must be a power of two, got {n}")
    N = n.bit_length() - 1
    if not (1 <= m <= N - 3):
        raise ValueError(f"need 1 <= m <= N-3, got m={m}, N={N}")

    pos = np.arange(1, n, dtype=np.int64)  # R(N, .) never contains 2**N
    val = _valuation(pos)
    part = _part_index(pos, N)
    bit = w[pos - 1].astype(np.int64)

    keep = val <= m
    single = np.bincount(
        (val[keep] * 3 + part[keep]) * 2 + bit[keep], minlength=(m + 1) * 3 * 2
    ).reshape(m + 1, 3, 2)

    # pairs are indexed by the level of n, i.e. i - 1 = valuation(n)
    sel = (val <= m - 1) & (part <= 1)
    child = w[2 * pos[sel] - 1].astype(np.int64)
    pair = np.bincount(
        ((val[sel] * 2 + part[sel]) * 2 + bit[sel]) * 2 + child, minlength=m * 2 * 4
    ).reshape(m, 2, 2, 2)

    table = XTable(N=N, m=m)
    for i in range(m + 1):
        table.single[i] = {
            str(b): {PARTS[p]: int(single[i, p, b]) for p in range(3)} for b in range(2)
        }
    for i in range(1, m + 1):
        table.pair[i] = {
            f"{k1}{k2}": {PARTS[p]: int(pair[i - 1, p, k1, k2]) for p in range(2)}
            for k1 in range(2)
            for k2 in range(2)
        }
    return table


@dataclass
class GapReport:
    N: int
    m: int
    eps: float
    gaps: list  # (i, gap_I, gap_II, scale) with scale = 2**(N-1-i)
    min_eps: float
    min_eps_I: float
    min_eps_II: float
    holds: bool


def nnorm_gap(table: XTable, eps: float) -> GapReport:
    """Compare |X11 - X00| in parts I and II with eps * 2**(N-1-i).

    ``min_eps`` is the smallest eps for which every bound holds.
    """
    gaps = []
    worst_I = worst_II = 0.0
    for i in range(1, table.m + 1):
        scale = 2 ** (table.N - 1 - i)
        g1 = abs(table.X(i, "11", "I") - table.X(i, "00", "I"))
        g2 = abs(table.X(i, "11", "II") - table.X(i, "00", "II"))
        gaps.append((i, g1, g2, scale))
        worst_I = max(worst_I, g1 / scale)
        worst_II = max(worst_II, g2 / scale)
    worst = max(worst_I, worst_II)
    return GapReport(table.N, table.m, eps, gaps, worst, worst_I, worst_II, worst <= eps)


# ---------------------------------------------------------------------------
# membership checks


@dataclass
class MembershipReport:
    member: bool
    levels_checked: list
    truncated_at: int
    violations: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _levels(w: np.ndarray, N: int) -> list[int]:
    top = len(w).bit_length() - 1  # largest n with 2**n <= len(w)
    return list(range(N, top + 1))


def membership_N(word, N: int, m: int, eps: float) -> MembershipReport:
    """Check the 1-frequency in every R(n, i, part), i <= m, lies in [1/2 - eps, 1/2 + eps].

    Levels n run from N up to floor(log2(len(word))); longer scales are not
    observable and ``truncated_at`` records where the check stopped.
    """
    w = as_word(word)
    if len(w) < 2**N:
        raise ValueError(f"word of length {len(w)} is shorter than 2**N = {2**N}")
    levels = _levels(w, N)
    violations = []
    for n in levels:
        for i in range(0, min(m, n - 3) + 1):
            for part in PARTS:
                pos = r_set(n, i, part)
                freq = float(w[pos - 1].mean())
                if abs(freq - 0.5) > eps:
                    violations.append({"n": n, "i": i, "part": part, "size": len(pos), "freq": freq})
    return MembershipReport(not violations, levels, levels[-1], violations)


def membership_A(word, alpha: float, N: int, eps: float) -> MembershipReport:
    """Check alpha - eps < 2**(1-n) * sum_{j <= 2**(n-1)} w_j w_2j < alpha + eps for n >= N."""
    w = as_word(word)
    if len(w) < 2**N:
        raise ValueError(f"word of length {len(w)} is shorter than 2**N = {2**N}")
    levels = _levels(w, N)
    violations = []
    for n in levels:
        half = 2 ** (n - 1)
        freq = float(np.count_nonzero(w[:half] & w[1 : 2 * half : 2])) / half
        if not (alpha - eps < freq < alpha + eps):
            violations.append({"n": n, "freq": freq})
    return MembershipReport(not violations, levels, levels[-1], violations)


# ---------------------------------------------------------------------------
# block statistics


def block_counts(word, m: int, overlapping: bool = True) -> np.ndarray:
    """Occurrences of each length-m block, indexed by its binary value."""
    if not (1 <= m <= 16):
        raise ValueError(f"block order must be in 1..16, got {m}")
    w = as_word(word).astype(np.int64)
    if len(w) < m:
        return np.zeros(2**m, dtype=np.int64)
    windows = len(w) - m + 1
    codes = np.zeros(windows, dtype=np.int64)
    for j in range(m):
        codes = (codes << 1) | w[j : j + windows]
    if not overlapping:
        codes = codes[::m]
    return np.bincount(codes, minlength=2**m)


def block_frequencies(word, m: int, overlapping: bool = True) -> dict[str, tuple[float, float]]:
    """Map each length-m block to (frequency, |frequency - 2**-m|)."""
    counts = block_counts(word, m, overlapping)
    total = counts.sum()
    freqs = counts / total if total else counts.astype(float)
    target = 2.0**-m
    return {
        format(code, f"0{m}b"): (float(f), float(abs(f - target))) for code, f in enumerate(freqs)
    }


def max_block_deviation(word, m: int, overlapping: bool = True) -> float:
    counts = block_counts(word, m, overlapping)
    total = counts.sum()
    if not total:
        return 0.0
    return float(np.abs(counts / total - 2.0**-m).max())


def arithmetic_subsequence(word, start: int, step: int) -> np.ndarray:
    """Bits at positions start + k * step, k = 1, 2, ... (1-based)."""
    if start < 0 or step < 1:
        raise ValueError(f"need start >= 0 and step >= 1, got {start}, {step}")
    w = as_word(word)
    return w[start + step - 1 :: step].copy()
