"""Counting binary words by their digit and dyadic-pair statistics.

A word w of length n is tallied by

    ones  = #{k <= n : w_k = 1}
    pairs = #{k : 2k <= n, w_k = w_2k = 1}

Only pairs with both ends inside the word are counted, so the pair
statistic lives on adjacencies of the dyadic chains (see ``chains``) and
the bivariate generating polynomial of the whole word factorises as a
product of one small polynomial per chain.

Exact mode keeps Python integers. Log mode keeps natural-log counts in
float64 arrays with ``-inf`` marking empty cells.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .chains import decompose
from .spectra import EmptyLevelSetError, binary_entropy

try:  # GMP multiplication is much faster on the packed integers
    import gmpy2

    _BIGINT = gmpy2.mpz
except ImportError:  # pragma: no cover
    _BIGINT = int

EXACT = "exact"
LOG = "log"

# cells * bits-per-cell allowed for an exact table (~256 MiB)
EXACT_BIT_BUDGET = 2**31
BRUTE_FORCE_MAX_N = 22


class ExactOverflowError(OverflowError):
    """Exact table too large for memory; use log mode instead."""


@lru_cache(maxsize=None)
def fib(k: int) -> int:
    """Fibonacci numbers with fib(1) == fib(2) == 1."""
    if k < 0:
        raise ValueError("fib index must be nonnegative")
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


# ---------------------------------------------------------------------------
# single chains


@dataclass(frozen=True)
class ChainProfile:
    """Counts of length-L strings by (#ones, #adjacent 11).

    ``coefficients[o, p]`` is an exact integer; shape is (L+1, L).
    """

    length: int
    coefficients: np.ndarray

    def __getitem__(self, key):
        o, p = key
        if 0 <= o < self.coefficients.shape[0] and 0 <= p < self.coefficients.shape[1]:
            return int(self.coefficients[o, p])
        return 0

    def total(self) -> int:
        return int(sum(int(v) for v in self.coefficients.flat))

    def nonzero(self) -> list[tuple[int, int, int]]:
        cells = []
        for (o, p), v in np.ndenumerate(self.coefficients):
            if v:
                cells.append((o, p, int(v)))
        return cells


@lru_cache(maxsize=128)
def chain_profile(L: int) -> ChainProfile:
    """Transfer-matrix DP over a chain of ``L`` positions, state = last bit."""
    if L < 1:
        raise ValueError(f"chain length must be positive, got {L}")
    shape = (L + 1, L)
    end0 = np.zeros(shape, dtype=object)
    end1 = np.zeros(shape, dtype=object)
    end0[0, 0] = 1
    end1[1, 0] = 1
    for _ in range(1, L):
        new0 = end0 + end1
        new1 = np.zeros(shape, dtype=object)
        new1[1:, :] += end0[:-1, :]
        new1[1:, 1:] += end1[:-1, :-1]
        end0, end1 = new0, new1
    coeffs = end0 + end1
    coeffs.flags.writeable = False
    return ChainProfile(length=L, coefficients=coeffs)


# ---------------------------------------------------------------------------
# constrained sets


def count_A(n: int) -> int:
    """Words of length n with w_k * w_2k == 0 for every in-range k.

    Each chain of length l contributes the number of 11-free strings of
    length l, which is fib(l + 2).
    """
    total = 1
    for length, mult in decompose(n).histogram.items():
        total *= fib(length + 2) ** mult
    return total


def count_B(n: int) -> int:
    """Words of length n with w_k == w_2k for every in-range k."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return 2 ** ((n + 1) // 2)


def counting_growth_rate(n: int) -> float:
    """(1/n) log count_A(n), from the chain histogram alone."""
    hist = decompose(n).histogram
    return math.fsum(mult * math.log(fib(length + 2)) for length, mult in hist.items()) / n


def growth_rate_series(terms: int = 60) -> float:
    """Limit of ``counting_growth_rate`` as a truncated series."""
    return math.fsum(2.0 ** -(l + 1) * math.log(fib(l + 2)) for l in range(1, terms + 1))


# ---------------------------------------------------------------------------
# profile matrix


@dataclass
class ProfileMatrix:
    """Word counts indexed by (ones, pairs).

    ``table`` has shape (n+1, n//2+1) unless it was truncated with caps,
    in which case cells beyond the caps are simply absent. Exact tables hold
    Python ints (object dtype); log tables hold float64 log-counts.
    """

    n: int
    mode: str
    table: np.ndarray

    @property
    def truncated(self) -> bool:
        return self.table.shape != (self.n + 1, self.n // 2 + 1)

    def __getitem__(self, key):
        o, p = key
        rows, cols = self.table.shape
        if 0 <= o < rows and 0 <= p < cols:
            v = self.table[o, p]
            return int(v) if self.mode == EXACT else float(v)
        if o < 0 or p < 0 or o > self.n or p > self.n // 2:
            return 0 if self.mode == EXACT else -math.inf
        raise IndexError(f"cell ({o}, {p}) lies beyond the truncation caps")

    def total(self):
        """Sum of all cells: an int in exact mode, a log-count in log mode."""
        if self.mode == EXACT:
            return sum(int(v) for v in self.table.flat)
        return logsumexp(self.table)

    def window_sum(self, ones: tuple[int, int], pairs: tuple[int, int]):
        a, b = max(ones[0], 0), min(ones[1], self.table.shape[0] - 1)
        c, d = max(pairs[0], 0), min(pairs[1], self.table.shape[1] - 1)
        if a > b or c > d:
            return 0 if self.mode == EXACT else -math.inf
        block = self.table[a : b + 1, c : d + 1]
        if self.mode == EXACT:
            return sum(int(v) for v in block.flat)
        return logsumexp(block)

    def cells(self):
        """Nonzero cells as (ones, pairs, value) in row-major order."""
        for (o, p), v in np.ndenumerate(self.table):
            if self.mode == EXACT:
                if v:
                    yield o, p, int(v)
            elif v > -math.inf:
                yield o, p, float(v)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("ones,pairs,count\n" if self.mode == EXACT else "ones,pairs,log_count\n")
        for o, p, v in self.cells():
            buf.write(f"{o},{p},{v if self.mode == EXACT else repr(v)}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        value_name = "count" if self.mode == EXACT else "log_count"
        rows = [[o, p, str(v) if self.mode == EXACT else v] for o, p, v in self.cells()]
        doc = {
            "n": self.n,
            "mode": self.mode,
            "shape": list(self.table.shape),
            "columns": ["ones", "pairs", value_name],
            "rows": rows,
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "ProfileMatrix":
        doc = json.loads(text)
        shape = tuple(doc["shape"])
        if doc["mode"] == EXACT:
            table = np.zeros(shape, dtype=object)
            for o, p, v in doc["rows"]:
                table[o, p] = int(v)
        else:
            table = np.full(shape, -np.inf)
            for o, p, v in doc["rows"]:
                table[o, p] = float(v)
        return cls(n=doc["n"], mode=doc["mode"], table=table)


def logsumexp(a) -> float:
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return -math.inf
    top = a.max()
    if top == -math.inf:
        return -math.inf
    return float(top + math.log(np.exp(a - top).sum()))


def _check_mode(mode: str):
    if mode not in (EXACT, LOG):
        raise ValueError(f"mode must be 'exact' or 'log', got {mode!r}")


def _caps(n: int, max_ones, max_pairs) -> tuple[int, int]:
    rows = n if max_ones is None else max(0, min(n, max_ones))
    cols = n // 2 if max_pairs is None else max(0, min(n // 2, max_pairs))
    return rows, cols


def _pack(a: np.ndarray, stride: int, width: int):
    buf = bytearray(a.shape[0] * stride * width)
    for (o, p), v in np.ndenumerate(a):
        if v:
            off = (o * stride + p) * width
            buf[off : off + width] = int(v).to_bytes(width, "little")
    return _BIGINT(int.from_bytes(bytes(buf), "little"))


def poly_mul_exact(a: np.ndarray, b: np.ndarray, max_rows=None, max_cols=None) -> np.ndarray:
    """Exact product of two bivariate polynomials with nonnegative coefficients.

    Coefficient arrays are indexed [x-degree, y-degree]. The product is
    computed by Kronecker substitution: both operands are packed into one
    big integer with fixed-width slots, multiplied once, and unpacked.
    Optional caps drop every cell of degree above them.
    """
    rows = a.shape[0] + b.shape[0] - 1
    cols = a.shape[1] + b.shape[1] - 1
    sa = sum(int(v) for v in a.flat)
    sb = sum(int(v) for v in b.flat)
    if sa == 0 or sb == 0:
        out_rows = rows if max_rows is None else min(rows, max_rows + 1)
        out_cols = cols if max_cols is None else min(cols, max_cols + 1)
        return np.zeros((out_rows, out_cols), dtype=object)
    # every product coefficient is at most sa * sb
    width = ((sa * sb).bit_length() + 8) // 8
    product = _pack(a, cols, width) * _pack(b, cols, width)
    raw = int(product).to_bytes(rows * cols * width, "little")
    out_rows = rows if max_rows is None else min(rows, max_rows + 1)
    out_cols = cols if max_cols is None else min(cols, max_cols + 1)
    out = np.zeros((out_rows, out_cols), dtype=object)
    from_bytes = int.from_bytes
    for o in range(out_rows):
        base = o * cols * width
        for p in range(out_cols):
            off = base + p * width
            out[o, p] = from_bytes(raw[off : off + width], "little")
    return out


def _truncate(a: np.ndarray, max_rows: int, max_cols: int) -> np.ndarray:
    return a[: max_rows + 1, : max_cols + 1]


def poly_pow_exact(base: np.ndarray, exponent: int, max_rows=None, max_cols=None) -> np.ndarray:
    """``base ** exponent`` by repeated squaring, optionally truncated."""
    result = np.ones((1, 1), dtype=object)
    square = base
    if max_rows is not None:
        square = _truncate(square, max_rows, max_cols)
    while exponent:
        if exponent & 1:
            result = poly_mul_exact(result, square, max_rows, max_cols)
        exponent >>= 1
        if exponent:
            square = poly_mul_exact(square, square, max_rows, max_cols)
    return result


def _estimate_exact_bits(n: int, rows: int, cols: int) -> int:
    return (rows + 1) * (cols + 1) * (n + 1)


def _exact_profile(n: int, rows: int, cols: int) -> np.ndarray:
    if _estimate_exact_bits(n, rows, cols) > EXACT_BIT_BUDGET:
        raise ExactOverflowError(
            f"exact profile for n={n} needs ~{_estimate_exact_bits(n, rows, cols) // 8} bytes; "
            "switch to log mode"
        )
    acc = np.ones((1, 1), dtype=object)
    for length, mult in sorted(decompose(n).histogram.items()):
        group = poly_pow_exact(chain_profile(length).coefficients, mult, rows, cols)
        acc = poly_mul_exact(acc, group, rows, cols)
    out = np.zeros((rows + 1, cols + 1), dtype=object)
    r, c = acc.shape
    out[:r, :c] = acc
    return out


def _log_profile(n: int, rows: int, cols: int) -> np.ndarray:
    # chain by chain: multiply the running log-table by one small chain
    # polynomial at a time; the kernel cells are visited in a fixed order
    acc = np.full((rows + 1, cols + 1), -np.inf)
    acc[0, 0] = 0.0
    cur_r = cur_c = 0
    for length, mult in sorted(decompose(n).histogram.items()):
        kernel = [(o, p, math.log(v)) for o, p, v in chain_profile(length).nonzero()]
        for _ in range(mult):
            new_r = min(cur_r + length, rows)
            new_c = min(cur_c + length - 1, cols)
            out = np.full((new_r + 1, new_c + 1), -np.inf)
            for o, p, lv in kernel:
                if o > new_r or p > new_c:
                    continue
                h = min(cur_r, new_r - o) + 1
                w = min(cur_c, new_c - p) + 1
                dst = out[o : o + h, p : p + w]
                np.logaddexp(dst, acc[:h, :w] + lv, out=dst)
            acc[: new_r + 1, : new_c + 1] = out
            cur_r, cur_c = new_r, new_c
    return acc


def profile_matrix(n: int, mode: str = EXACT, max_ones=None, max_pairs=None) -> ProfileMatrix:
    """Joint tally of all 2**n words by (ones, pairs).

    Chains of equal length are grouped. In exact mode each group power is
    formed by repeated squaring; in log mode the chains are folded in one at
    a time with log-add-exp. ``max_ones``/``max_pairs`` truncate the table;
    cells at or below the caps are unaffected since both statistics only
    grow under multiplication.

    Raises ExactOverflowError when an exact table would not fit in memory.
    """
    _check_mode(mode)
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    rows, cols = _caps(n, max_ones, max_pairs)
    if mode == EXACT:
        table = _exact_profile(n, rows, cols)
    else:
        table = _log_profile(n, rows, cols)
    return ProfileMatrix(n=n, mode=mode, table=table)


def level_set_count(n: int, ones_window, pairs_window, mode: str = EXACT):
    """Number of words with ones and pairs inside the given closed windows.

    Returns an int in exact mode and a natural-log count in log mode
    (``-inf`` for an empty window).
    """
    _check_mode(mode)
    a, b = ones_window
    c, d = pairs_window
    a, b = max(a, 0), min(b, n)
    c, d = max(c, 0), min(d, n // 2)
    if a > b or c > d:
        return 0 if mode == EXACT else -math.inf
    pm = profile_matrix(n, mode, max_ones=b, max_pairs=d)
    return pm.window_sum((a, b), (c, d))


def word_statistics(bits) -> tuple[int, int]:
    """(ones, in-range 11 pairs) of a single 0/1 word."""
    w = np.asarray(bits, dtype=np.uint8)
    half = len(w) // 2
    pairs = int(np.count_nonzero(w[:half] & w[1 : 2 * half : 2]))
    return int(w.sum()), pairs


def brute_force_profile(n: int) -> ProfileMatrix:
    """Tally every word of length n directly (test oracle)."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    words = np.arange(2**n, dtype=np.uint32)
    ones = np.bitwise_count(words).astype(np.int64)
    pairs = np.zeros(words.shape, dtype=np.int64)
    for k in range(1, n // 2 + 1):
        # bit k-1 holds w_k
        pairs += (words >> (k - 1)) & (words >> (2 * k - 1)) & 1
    cols = n // 2 + 1
    counts = np.bincount(ones * cols + pairs, minlength=(n + 1) * cols)
    table = np.empty((n + 1, cols), dtype=object)
    for (o, p), v in np.ndenumerate(counts.reshape(n + 1, cols)):
        table[o, p] = int(v)
    return ProfileMatrix(n=n, mode=EXACT, table=table)


# ---------------------------------------------------------------------------
# analytic bounds


def log_binomial(n: int, k: int) -> float:
    """Natural log of C(n, k)."""
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


COVER_C1 = 8.0
COVER_C2 = 2.0


def cover_bound(N: int, m: int, eps: float, alpha: float, c1: float = COVER_C1, c2: float = COVER_C2) -> float:
    """Upper envelope for the log number of length-2**N cylinders covering
    the normal-and-pair-frequency-alpha words at scale (N, m, eps).

        2**(N-1) log 2 + 2**(N-1) H(2 alpha) + 2**N (c1 eps + c2 2**-m)

    The slack constants are deliberately generous and not sharp.
    """
    if not (N > m >= 1):
        raise ValueError(f"need N > m >= 1, got N={N}, m={m}")
    if not (0.0 < eps < 0.5):
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    if alpha < 0.0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    if alpha > 0.5:
        raise EmptyLevelSetError(f"no normal word has pair frequency {alpha} > 1/2")
    half = 2.0 ** (N - 1)
    return half * math.log(2.0) + half * binary_entropy(2.0 * alpha) + 2.0**N * (c1 * eps + c2 * 2.0**-m)
