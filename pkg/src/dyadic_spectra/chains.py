"""Dyadic chains {h, 2h, 4h, ...} with odd head h.

The positions 1..n split into disjoint chains, one per odd head h <= n.
The pair constraint between k and 2k only ever links neighbours of the
same chain, so every counting and sampling routine in this package works
chain by chain.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def chain_head(k: int) -> tuple[int, int]:
    """Split ``k`` as ``head * 2**level`` with an odd head."""
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    level = (k & -k).bit_length() - 1
    return k >> level, level


def chain_positions(head: int, n: int) -> list[int]:
    """Positions ``head, 2*head, 4*head, ...`` not exceeding ``n``."""
    if head < 1 or head % 2 == 0:
        raise ValueError(f"chain head must be odd and positive, got {head}")
    if head > n:
        raise ValueError(f"chain head {head} exceeds word length {n}")
    out = []
    pos = head
    while pos <= n:
        out.append(pos)
        pos <<= 1
    return out


def _odd_upto(x: int) -> int:
    # number of odd integers in [1, x]
    return (x + 1) // 2 if x > 0 else 0


@dataclass(frozen=True)
class ChainDecomposition:
    n: int
    histogram: dict[int, int] = field(default_factory=dict)

    @property
    def num_chains(self) -> int:
        return sum(self.histogram.values())

    def lengths(self) -> list[int]:
        return sorted(self.histogram)

    def total_length(self) -> int:
        return sum(length * mult for length, mult in self.histogram.items())


def decompose(n: int) -> ChainDecomposition:
    """Histogram of chain lengths for the positions 1..n.

    The chain with odd head j has length floor(log2(n/j)) + 1, so the
    multiplicity of length l is the number of odd j in (n/2**l, n/2**(l-1)].
    Pure interval arithmetic; works for n far beyond anything enumerable.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    hist = {}
    length = 1
    while (n >> (length - 1)) > 0:
        mult = _odd_upto(n >> (length - 1)) - _odd_upto(n >> length)
        if mult:
            hist[length] = mult
        length += 1
    return ChainDecomposition(n=n, histogram=hist)


def decompose_by_enumeration(n: int) -> ChainDecomposition:
    """Reference histogram built by walking every chain (slow)."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    hist: dict[int, int] = {}
    for head in range(1, n + 1, 2):
        length = len(chain_positions(head, n))
        hist[length] = hist.get(length, 0) + 1
    return ChainDecomposition(n=n, histogram=hist)
