import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import binom

from dyadic_spectra.diagnostics import (
    PARTS,
    arithmetic_subsequence,
    block_frequencies,
    max_block_deviation,
    membership_A,
    membership_N,
    nnorm_gap,
    pair_frequency,
    r_set,
    x_table,
)
from dyadic_spectra.measure import from_alpha, sample, sample_batch, uniform


def r_oracle(N, i):
    return {2**i * (2 * k - 1) for k in range(1, 2 ** (N - i - 1) + 1)}


def x_oracle(word, m):
    # literal tally straight from the definitions
    N = len(word).bit_length() - 1
    parts = {
        "I": lambda j: r_oracle(N - 2, j),
        "II": lambda j: r_oracle(N - 1, j) - r_oracle(N - 2, j),
        "III": lambda j: r_oracle(N, j) - r_oracle(N - 1, j),
    }
    pair, single = {}, {}
    for i in range(1, m + 1):
        pair[i] = {}
        for k1 in "01":
            for k2 in "01":
                pair[i][k1 + k2] = {
                    p: sum(1 for n in parts[p](i - 1) if word[n - 1] == int(k1) and word[2 * n - 1] == int(k2))
                    for p in ("I", "II")
                }
    for i in range(m + 1):
        single[i] = {k: {p: sum(1 for n in parts[p](i) if word[n - 1] == int(k)) for p in PARTS} for k in "01"}
    return pair, single


def test_r_set_examples():
    assert r_set(4, 0).tolist() == [1, 3, 5, 7, 9, 11, 13, 15]
    assert r_set(4, 0, "III").tolist() == [9, 11, 13, 15]
    for N in range(1, 12):
        for i in range(N):
            assert len(r_set(N, i)) == 2 ** (N - i - 1)
    with pytest.raises(ValueError):
        r_set(5, 5)
    with pytest.raises(ValueError):
        r_set(5, 3, "I")


@pytest.mark.parametrize("N", range(4, 17))
def test_r_set_identities(N):
    for i in range(N - 3):
        s = {p: set(r_set(N, i, p).tolist()) for p in PARTS}
        assert s["I"] | s["II"] | s["III"] == r_oracle(N, i)
        assert not (s["I"] & s["II"]) and not (s["II"] & s["III"])
        if i <= N - 4:
            nxt = {p: set(r_set(N, i + 1, p).tolist()) for p in PARTS}
            assert {2 * x for x in s["I"]} == nxt["I"] | nxt["II"]
            assert {2 * x for x in s["II"]} == nxt["III"]
            assert not ({2 * x for x in s["III"]} & r_oracle(N, i + 1))


@pytest.mark.parametrize("N, m", [(4, 1), (7, 3), (10, 5)])
def test_x_table_constant_words(N, m):
    for bit in (0, 1):
        t = x_table(np.full(2**N, bit, dtype=np.uint8), m)
        code = f"{bit}{bit}"
        for i in range(1, m + 1):
            for p in ("I", "II"):
                size = len(r_set(N, i - 1, p))
                for c in ("00", "01", "10", "11"):
                    assert t.X(i, c, p) == (size if c == code else 0)
        assert t.relations_hold()


def test_x_table_against_literal_tally():
    rng = np.random.default_rng(0)
    for N, m in [(5, 2), (8, 4), (10, 5)]:
        w = rng.integers(0, 2, 2**N).astype(np.uint8)
        t = x_table(w, m)
        pair, single = x_oracle(w, m)
        assert t.pair == pair
        assert t.single == single


@given(st.integers(4, 11).flatmap(lambda N: st.tuples(st.just(N), st.integers(1, N - 3), st.integers(0, 2**32 - 1))))
@settings(max_examples=60, deadline=None)
def test_x_table_relations_property(args):
    N, m, seed = args
    w = np.random.default_rng(seed).integers(0, 2, 2**N).astype(np.uint8)
    t = x_table(w, m)
    assert t.relations_hold()
    assert len(t.relations()) == 8 * m


def test_x_table_rejects_bad_input():
    with pytest.raises(ValueError):
        x_table(np.zeros(1000, dtype=np.uint8), 2)
    with pytest.raises(ValueError):
        x_table(np.zeros(64, dtype=np.uint8), 4)


def test_nnorm_gap_all_zeros():
    report = nnorm_gap(x_table(np.zeros(2**10, dtype=np.uint8), 5), 0.1)
    assert report.min_eps == 0.5 and report.min_eps_I == 0.5 and report.min_eps_II == 0.5
    assert not report.holds
    for i, g1, g2, scale in report.gaps:
        assert g1 == len(r_set(10, i - 1, "I")) and g2 == len(r_set(10, i - 1, "II"))


def test_nnorm_gap_balanced_word():
    # w_2k = 1 - w_k with fair odd bits never produces 00 or 11 pairs
    N = 10
    w = np.zeros(2**N, dtype=np.uint8)
    w[0::2] = np.random.default_rng(1).integers(0, 2, 2 ** (N - 1))
    for k in range(1, 2 ** (N - 1) + 1):
        w[2 * k - 1] = 1 - w[k - 1]
    report = nnorm_gap(x_table(w, 5), 0.0)
    assert report.min_eps_I == 0.0 and report.holds


def test_nnorm_gap_follows_membership():
    eps = 0.05
    checked = 0
    for seed in range(40):
        w = sample(uniform(), 2**14, seed)
        if membership_N(w, 14, 4, eps).member:
            checked += 1
            assert nnorm_gap(x_table(w, 4), 4 * eps).holds
    assert checked >= 5


def test_membership_N_examples():
    periodic = np.tile(np.array([0, 1], dtype=np.uint8), 2**9)
    assert not membership_N(periodic, 6, 2, 0.1).member
    zeros = np.zeros(2**10, dtype=np.uint8)
    for eps in (0.1, 0.3, 0.49):
        report = membership_N(zeros, 6, 2, eps)
        assert not report.member and report.violations
    report = membership_N(zeros, 6, 2, 0.1)
    assert report.levels_checked == [6, 7, 8, 9, 10] and report.truncated_at == 10
    with pytest.raises(ValueError):
        membership_N(zeros, 11, 2, 0.1)


def pass_probability(N, m, eps):
    # disjoint blocks of fair bits: product of central binomial masses
    prob = 1.0
    for i in range(m + 1):
        for part in PARTS:
            s = len(r_set(N, i, part))
            k = np.arange(s + 1)
            ok = np.abs(2 * k - s) <= 2 * eps * s
            prob *= binom.pmf(k[ok], s, 0.5).sum()
    return prob


def test_membership_N_uniform_matches_binomial_oracle():
    N, m, eps, seeds = 14, 4, 0.05, 300
    p = pass_probability(N, m, eps)
    batch = sample_batch(uniform(), 2**N, seeds, seed=123)
    passes = sum(membership_N(w, N, m, eps).member for w in batch)
    sd = math.sqrt(seeds * p * (1 - p))
    assert abs(passes - seeds * p) <= 4 * sd


def test_membership_A_examples():
    zeros = np.zeros(2**10, dtype=np.uint8)
    ones = np.ones(2**10, dtype=np.uint8)
    for eps in (0.01, 0.5):
        assert membership_A(zeros, 0.0, 5, eps).member
        assert membership_A(ones, 1.0, 5, eps).member
    assert not membership_A(ones, 0.0, 5, 0.99).member
    w = sample(from_alpha(0.2), 2**18, seed=2)
    assert membership_A(w, 0.2, 16, 0.02).member


def test_alpha_samples_pass_both_checks():
    alpha, N, eps = 0.2, 16, 0.05
    batch = sample_batch(from_alpha(alpha), 2**N, 100, seed=77)
    ok = sum(membership_N(w, N, 2, eps).member and membership_A(w, alpha, N, eps).member for w in batch)
    assert ok >= 95


def test_block_frequencies_periodic():
    w = np.tile(np.array([0, 1], dtype=np.uint8), 500)
    f1 = block_frequencies(w, 1)
    assert f1["0"] == (0.5, 0.0) and f1["1"] == (0.5, 0.0)
    f2 = block_frequencies(w, 2)
    assert f2["00"][0] == 0.0 and f2["11"][0] == 0.0
    assert f2["01"][0] == pytest.approx(0.5, abs=1e-3) and f2["10"][0] == pytest.approx(0.5, abs=1e-3)
    assert max_block_deviation(w, 2) == pytest.approx(0.25, abs=1e-3)
    assert sum(v for v, _ in block_frequencies(w, 3, overlapping=False).values()) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        block_frequencies(w, 17)


def test_block_frequencies_uniform():
    w = sample(uniform(), 2**20, seed=10)
    assert max_block_deviation(w, 3) < 0.01


def test_arithmetic_subsequence():
    w = np.arange(10) % 2
    assert np.array_equal(arithmetic_subsequence(w, 0, 1), w)
    assert len(arithmetic_subsequence(w, 1, 2)) == 4
    u = sample(uniform(), 2**20, seed=12)
    assert max_block_deviation(arithmetic_subsequence(u, 0, 3), 2) < 0.02
    with pytest.raises(ValueError):
        arithmetic_subsequence(w, 0, 0)


def test_arithmetic_subsequence_positions():
    word = np.zeros(10, dtype=np.uint8)
    word[[2, 4, 6, 8]] = 1  # positions 3, 5, 7, 9
    assert arithmetic_subsequence(word, 1, 2).tolist() == [1, 1, 1, 1]


def test_block_deviation_shrinks():
    params = from_alpha(0.2)
    small = np.mean([max_block_deviation(sample(params, 2**16, s), 4) for s in range(4)])
    large = np.mean([max_block_deviation(sample(params, 2**22, s), 4) for s in range(4)])
    assert large < small


def test_pair_frequency_normalisation():
    assert pair_frequency(np.ones(9, dtype=np.uint8)) == 1.0
    assert pair_frequency([1]) == 0.0
