"""Telescopic product measures on binary sequences.

Odd positions are i.i.d. with P(w_k = 1) = p1. An even position 2k copies
information from k through a 2x2 transition matrix: P(w_2k = 1 | w_k = i)
= p_i1. Positions in different dyadic chains are independent, so along a
chain h, 2h, 4h, ... the bits form a Markov chain started from (p0, p1).

Words are numpy uint8 arrays; index ``i`` holds the bit at position i+1.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import asdict, dataclass

import numpy as np

from .spectra import EmptyLevelSetError, binary_entropy

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class MeasureParams:
    p0: float
    p1: float
    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self):
        for name, v in asdict(self).items():
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} = {v} is not a probability")
        for a, b in ((self.p0, self.p1), (self.p00, self.p01), (self.p10, self.p11)):
            if abs(a + b - 1.0) > _PROB_TOL:
                raise ValueError(f"probabilities {a} and {b} do not sum to 1")
        if abs(self.p01 - self.p11) == 2.0:
            raise ValueError("degenerate transition matrix: |p01 - p11| == 2")

    def transition(self, i: int, j: int) -> float:
        return (self.p00, self.p01, self.p10, self.p11)[2 * i + j]

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "MeasureParams":
        return cls(**json.loads(text))

    @classmethod
    def from_marginal(cls, p1: float, p01: float, p11: float) -> "MeasureParams":
        return cls(1.0 - p1, p1, 1.0 - p01, p01, 1.0 - p11, p11)


def uniform() -> MeasureParams:
    """Fair coin flips everywhere."""
    return MeasureParams(0.5, 0.5, 0.5, 0.5, 0.5, 0.5)


def from_alpha(alpha: float) -> MeasureParams:
    """Measure with fair odd positions and P(w_2k = w_k) = 2 alpha.

    Every position is a fair coin, the digit frequency is 1/2 and the
    (k, 2k) pattern-11 frequency is alpha.
    """
    if alpha < 0.0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    if alpha > 0.5:
        raise EmptyLevelSetError(f"no normal sequence has pair frequency {alpha} > 1/2")
    s = 2.0 * alpha
    return MeasureParams(0.5, 0.5, s, 1.0 - s, 1.0 - s, s)


def from_theta_alpha(theta: float, alpha: float) -> MeasureParams:
    """Measure with digit frequency theta and pair frequency alpha.

    Uses p = (2 theta - alpha)/(2 - theta) for both P(w_odd = 1) and
    P(w_2k = 1 | w_k = 0), and q = alpha/theta for P(w_2k = 1 | w_k = 1).
    (theta, alpha) = (0, 0) gives the point mass on the all-zeros sequence.
    """
    if alpha < 0.0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    if theta == 0.0 and alpha == 0.0:
        return MeasureParams.from_marginal(0.0, 0.0, 0.0)
    lo, hi = alpha, (2.0 + alpha) / 3.0
    if theta <= 0.0 or theta < lo - _PROB_TOL or theta > hi + _PROB_TOL:
        raise EmptyLevelSetError(
            f"empty level set: theta = {theta} outside [{lo}, {hi}] for alpha = {alpha}"
        )
    p = min(max((2.0 * theta - alpha) / (2.0 - theta), 0.0), 1.0)
    q = min(max(alpha / theta, 0.0), 1.0)
    return MeasureParams.from_marginal(p, p, q)


def xi(params: MeasureParams) -> float:
    """Almost-sure frequency of the digit 1."""
    return (params.p1 + params.p01) / (2.0 - params.p11 + params.p01)


def expected_pair_freq(params: MeasureParams) -> float:
    """Almost-sure frequency of w_k = w_2k = 1."""
    return xi(params) * params.p11


def _xlogx(x: float) -> float:
    return x * math.log(x) if x > 0.0 else 0.0


def local_entropy(params: MeasureParams) -> float:
    """Almost-sure exponential decay rate of cylinder masses (nats)."""
    x = xi(params)
    s = (
        _xlogx(params.p0)
        + _xlogx(params.p1)
        + (1.0 - x) * (_xlogx(params.p00) + _xlogx(params.p01))
        + x * (_xlogx(params.p10) + _xlogx(params.p11))
    )
    return -0.5 * s


# ---------------------------------------------------------------------------
# cylinders


def as_word(word) -> np.ndarray:
    """Coerce a '0'/'1' string or a 0/1 sequence into a uint8 array."""
    if isinstance(word, str):
        arr = np.frombuffer(word.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(word, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("a word is one-dimensional")
    if arr.size and arr.max() > 1:
        raise ValueError("a word contains only 0 and 1")
    return arr


def cylinder_counts(word) -> tuple[np.ndarray, np.ndarray]:
    """Tallies behind the cylinder mass.

    Returns ``(odd, pair)``: ``odd[i]`` counts odd positions holding i, and
    ``pair[i, j]`` counts k with 2k <= n, w_k = i, w_2k = j.
    """
    w = as_word(word)
    n = len(w)
    odd_bits = w[0::2]
    ones = int(odd_bits.sum())
    odd = np.array([len(odd_bits) - ones, ones])
    half = n // 2
    codes = 2 * w[:half].astype(np.int64) + w[1 : 2 * half : 2]
    pair = np.bincount(codes, minlength=4).reshape(2, 2)
    return odd, pair


def _log_probs(params: MeasureParams):
    with np.errstate(divide="ignore"):
        lp = np.log([params.p0, params.p1])
        lt = np.log([[params.p00, params.p01], [params.p10, params.p11]])
    return lp, lt


def log_cylinder_prob(params: MeasureParams, word) -> float:
    """log mu(C_n(word)); ``-inf`` when the cylinder has mass zero."""
    w = as_word(word)
    if len(w) == 0:
        raise ValueError("empty word")
    odd, pair = cylinder_counts(w)
    lp, lt = _log_probs(params)
    total = 0.0
    for count, lv in zip(np.concatenate([odd, pair.ravel()]), np.concatenate([lp, lt.ravel()])):
        if count:
            if lv == -math.inf:
                return -math.inf
            total += count * lv
    return float(total)


def cylinder_prob(params: MeasureParams, word) -> float:
    """mu(C_n(word)): product of ceil(n/2) odd factors and floor(n/2) pair factors."""
    return math.exp(log_cylinder_prob(params, word))


def empirical_local_entropy(params: MeasureParams, word) -> float:
    """-log mu(C_n(word)) / n; ``math.inf`` for a null cylinder."""
    lp = log_cylinder_prob(params, word)
    if lp == -math.inf:
        return math.inf
    return -lp / len(as_word(word))


def h_n_increment(params: MeasureParams, word) -> float:
    """log mu(C_2n) - log mu(C_n) for a word of even length 2n."""
    w = as_word(word)
    if len(w) == 0 or len(w) % 2:
        raise ValueError("h_n_increment needs a word of positive even length")
    return log_cylinder_prob(params, w) - log_cylinder_prob(params, w[: len(w) // 2])


def marginals(params: MeasureParams, n: int) -> np.ndarray:
    """P(w_k = 1) for k = 1..n, propagated down the chains."""
    out = np.empty(n)
    out[0::2] = params.p1
    for k in range(2, n + 1, 2):
        m = out[k // 2 - 1]
        out[k - 1] = m * params.p11 + (1.0 - m) * params.p01
    return out


# ---------------------------------------------------------------------------
# sampling


def _fill(params: MeasureParams, u: np.ndarray) -> np.ndarray:
    # u[..., k-1] is the uniform driving position k; positions are filled
    # one dyadic level at a time so every parent precedes its child
    n = u.shape[-1]
    w = np.empty(u.shape, dtype=np.uint8)
    w[..., 0::2] = u[..., 0::2] < params.p1
    step = 2
    while step <= n:
        idx = np.arange(step, n + 1, 2 * step)  # positions with 2-adic valuation log2(step)
        parent = w[..., idx // 2 - 1]
        threshold = np.where(parent == 1, params.p11, params.p01)
        w[..., idx - 1] = u[..., idx - 1] < threshold
        step *= 2
    return w


def sample(params: MeasureParams, n: int, seed: int) -> np.ndarray:
    """Draw a length-n word from the measure.

    The uniform that drives position k is the k-th draw of the seeded
    stream, so ``sample(params, n, seed)`` is a prefix of
    ``sample(params, 2n, seed)``.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if seed is None:
        raise ValueError("an explicit seed is required")
    u = np.random.default_rng(seed).random(n)
    return _fill(params, u)


def sample_batch(params: MeasureParams, n: int, size: int, seed: int) -> np.ndarray:
    """``size`` independent words of length n, shape (size, n)."""
    if seed is None:
        raise ValueError("an explicit seed is required")
    u = np.random.default_rng(seed).random((size, n))
    return _fill(params, u)


# ---------------------------------------------------------------------------
# word serialisation


def word_to_str(word) -> str:
    return (as_word(word) + ord("0")).tobytes().decode("ascii")


def pack_word(word) -> bytes:
    """8-byte little-endian length followed by the bits, MSB first."""
    w = as_word(word)
    return struct.pack("<Q", len(w)) + np.packbits(w).tobytes()


def unpack_word(data: bytes) -> np.ndarray:
    (n,) = struct.unpack_from("<Q", data)
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8, offset=8))
    if len(bits) < n:
        raise ValueError("truncated packed word")
    return bits[:n].copy()


def read_word(path) -> np.ndarray:
    """Load a word from an ASCII bit-string file or a packed binary file."""
    with open(path, "rb") as fh:
        data = fh.read()
    stripped = data.strip()
    if stripped and set(stripped) <= {ord("0"), ord("1")}:
        return as_word(stripped.decode("ascii"))
    return unpack_word(data)


def write_word(path, word, binary: bool = False):
    with open(path, "wb") as fh:
        if binary:
            fh.write(pack_word(word))
        else:
            fh.write(word_to_str(word).encode("ascii") + b"\n")
