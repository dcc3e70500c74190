import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import brentq, minimize_scalar

from dyadic_spectra.spectra import (
    BOUNDARY,
    EMPTY,
    binary_entropy,
    corollary_residual,
    freq_derivative,
    freq_domain,
    grid,
    h_A_alpha,
    h_freq,
    h_normal_alpha,
    kps_residual,
    scan_to_csv,
    scan_to_json,
    solve_corollary_theta,
    solve_kps,
    solve_ps,
    spectrum_scan,
    theta_star_closed_form,
)

LOG2 = math.log(2)


def test_binary_entropy_examples():
    assert binary_entropy(0.5) == pytest.approx(0.693147, abs=1e-6)
    assert binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0
    assert binary_entropy(2 / 3) == pytest.approx(0.636514, abs=1e-6)
    with pytest.raises(ValueError):
        binary_entropy(1.5)


@given(st.integers(0, 2**20))
def test_binary_entropy_symmetry_exact(k):
    t = k / 2**20  # dyadic, so 1 - t is exact
    assert binary_entropy(t) == binary_entropy(1 - t)
    assert 0.0 <= binary_entropy(t) <= LOG2


def test_kps():
    p = solve_kps()
    assert abs(kps_residual(p)) <= 1e-12
    assert p == pytest.approx(0.4302, abs=1e-4)
    assert -math.log(1 - p) == pytest.approx(0.562399, abs=1e-5)
    assert p == pytest.approx(brentq(lambda x: x * x - (1 - x) ** 3, 0, 1, xtol=1e-15), abs=1e-14)


def test_ps_at_zero_is_kps():
    roots = solve_ps(0.0)
    assert roots.q == 0.0
    assert roots.p == solve_kps()
    assert h_A_alpha(0.0).entropy == pytest.approx(0.562399, abs=1e-5)


@pytest.mark.parametrize("alpha", [0.01, 0.3, 0.5, 0.75, 0.95])
def test_ps_residuals(alpha):
    roots = solve_ps(alpha)
    assert max(roots.residuals(alpha)) <= 1e-10
    assert 0 <= roots.p <= 1 and 0 <= roots.q <= 1


def test_ps_rejects_alpha_one():
    with pytest.raises(ValueError):
        solve_ps(1.0)
    pt = h_A_alpha(1.0)
    assert pt.regime == BOUNDARY and pt.entropy == 0.0


def test_full_entropy_at_quarter():
    assert h_A_alpha(0.25).entropy == pytest.approx(LOG2, abs=1e-8)
    assert h_normal_alpha(0.25).entropy == pytest.approx(LOG2, abs=1e-15)


def test_normal_values():
    assert h_normal_alpha(0.0).entropy == pytest.approx(0.346574, abs=1e-6)
    assert h_normal_alpha(0.5).entropy == pytest.approx(0.5 * LOG2, abs=1e-15)
    assert h_normal_alpha(0.6).regime == EMPTY


def test_freq_values():
    assert h_freq(0.5, 0.0).entropy == pytest.approx(0.75 * binary_entropy(2 / 3), abs=1e-15)
    assert h_freq(0.5, 0.0).entropy == pytest.approx(0.477386, abs=1e-6)
    assert h_freq(0.7, 0.0).regime == EMPTY
    assert h_freq(0.05, 0.1).regime == EMPTY
    theta = 0.3
    assert h_freq(theta, theta).entropy == pytest.approx((1 - theta / 2) * binary_entropy(theta / (2 - theta)))
    for theta in (0.1, 0.4, 0.6):
        assert h_freq(theta, 0.0).entropy == pytest.approx((2 - theta) / 2 * binary_entropy(2 * theta / (2 - theta)))


def test_corollary_alpha_zero():
    theta = solve_corollary_theta(0.0)
    assert theta == pytest.approx(0.354, abs=1e-3)
    assert abs(4 * theta**2 * (2 - theta) - (2 - 3 * theta) ** 3) <= 1e-10
    assert theta_star_closed_form() == pytest.approx(theta, abs=1e-10)
    assert abs(corollary_residual(theta_star_closed_form(), 0.0)) <= 1e-10


@pytest.mark.parametrize("alpha", np.round(np.arange(0.0, 0.5001, 0.05), 10))
def test_corollary_equality(alpha):
    theta = solve_corollary_theta(alpha)
    assert h_freq(theta, alpha).entropy == pytest.approx(h_A_alpha(alpha).entropy, abs=1e-6)
    # the maximiser matches an independent bounded optimiser
    lo, hi = freq_domain(alpha)
    res = minimize_scalar(lambda t: -h_freq(t, alpha).entropy, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    assert -res.fun == pytest.approx(h_A_alpha(alpha).entropy, abs=1e-9)


@pytest.mark.parametrize("alpha", [0.0, 0.1, 0.3, 0.6, 0.9])
def test_derivative_matches_finite_differences(alpha):
    lo, hi = freq_domain(alpha)
    for t in np.linspace(lo, hi, 9)[1:-1]:
        h = 1e-6
        fd = (h_freq(t + h, alpha).entropy - h_freq(t - h, alpha).entropy) / (2 * h)
        assert freq_derivative(t, alpha) == pytest.approx(fd, rel=1e-5, abs=1e-7)


@pytest.mark.parametrize("alpha", [0.0, 0.2, 0.45, 0.8])
def test_single_sign_change(alpha):
    lo, hi = freq_domain(alpha)
    ts = np.linspace(lo, hi, 2001)[1:-1]
    signs = np.sign([freq_derivative(t, alpha) for t in ts])
    assert np.count_nonzero(np.diff(signs)) == 1
    theta = solve_corollary_theta(alpha)
    assert freq_derivative(theta - 1e-6, alpha) > 0 > freq_derivative(theta + 1e-6, alpha)


def test_subset_ordering():
    for alpha in np.linspace(0, 0.5, 101):
        a = h_normal_alpha(alpha).entropy
        b = h_freq(0.5, alpha).entropy
        c = h_A_alpha(alpha).entropy
        assert b - a >= -1e-9
        assert c - b >= -1e-9


@pytest.mark.parametrize("alpha", [0.0, 0.1, 0.25, 0.5, 0.8])
def test_concavity_in_theta(alpha):
    lo, hi = freq_domain(alpha)
    ts = np.linspace(lo, hi, 401)
    vals = np.array([h_freq(t, alpha).entropy for t in ts])
    assert np.all(np.diff(vals, 2) <= 1e-8)


def test_determinism():
    assert solve_kps() == solve_kps()
    assert solve_ps(0.37) == solve_ps(0.37)
    assert solve_corollary_theta(0.21) == solve_corollary_theta(0.21)


def test_grid_inclusive():
    assert grid(0, 0.5, 0.05)[-1] == 0.5
    assert len(grid(0, 0.5, 0.05)) == 11
    assert grid(0.3, 0.1, 0.1) == []


def test_scan_examples():
    pts = spectrum_scan([0, 0.25, 0.5], family="normal")
    assert [round(p.entropy, 4) for p in pts] == [0.3466, 0.6931, 0.3466]
    assert spectrum_scan([], family="A") == []
    pts = spectrum_scan([0.4, 0.6, 0.7], family="normal")
    assert [p.regime for p in pts][1:] == [EMPTY, EMPTY]


def test_scan_freq_and_workers():
    alphas, thetas = grid(0, 0.4, 0.1), grid(0, 1, 0.05)
    seq = spectrum_scan(alphas, thetas, family="freq")
    par = spectrum_scan(alphas, thetas, family="freq", workers=4)
    assert seq == par
    assert len(seq) == len(alphas) * len(thetas)
    with pytest.raises(ValueError):
        spectrum_scan(alphas, None, family="freq")


def test_scan_serialisation():
    pts = spectrum_scan([0.0, 0.1], family="A")
    lines = scan_to_csv(pts).splitlines()
    assert lines[0] == "alpha,theta,entropy_nats,entropy_bits,regime,residual"
    assert len(lines) == 3
    import json

    rows = json.loads(scan_to_json(pts))
    assert rows[0]["entropy_bits"] == pytest.approx(rows[0]["entropy_nats"] / LOG2)
