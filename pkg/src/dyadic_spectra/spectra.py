"""Entropy spectra of the (k, 2k) level sets and their root solvers.

All entropies are in nats. Values for the level set of sequences whose
average of w_k * w_2k tends to alpha:

  * ``h_A_alpha``      -- no further restriction,
  * ``h_normal_alpha`` -- restricted to normal sequences,
  * ``h_freq``         -- restricted to digit frequency theta.

The solvers are plain bisection on brackets that are guaranteed by
monotonicity; they run to full double precision and then check the
requested residual tolerance.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

LOG2 = math.log(2.0)
DEFAULT_TOL = 1e-12

INTERIOR = "interior"
BOUNDARY = "boundary"
EMPTY = "empty-set"


class EmptyLevelSetError(ValueError):
    """The requested level set is empty."""


class RootFindingError(ArithmeticError):
    pass


def binary_entropy(t: float) -> float:
    """H(t) = -t log t - (1-t) log(1-t), with H(0) = H(1) = 0."""
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"binary entropy needs t in [0, 1], got {t}")
    a, b = sorted((t, 1.0 - t))
    return -(_xlogx(a) + _xlogx(b))


def _xlogx(x: float) -> float:
    return x * math.log(x) if x > 0.0 else 0.0


def _bisect(f, lo: float, hi: float, max_iter: int = 200) -> float:
    """Root of ``f`` on [lo, hi] given f(lo) < 0 < f(hi), to full precision."""
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        v = f(mid)
        if v == 0.0:
            return mid
        if v < 0.0:
            lo = mid
        else:
            hi = mid
    return lo if abs(f(lo)) <= abs(f(hi)) else hi


def _sign_changes(f, lo: float, hi: float, samples: int = 257) -> int:
    changes = 0
    prev = None
    for i in range(samples):
        x = lo + (hi - lo) * i / (samples - 1)
        v = f(x)
        s = int(v > 0) - int(v < 0)
        if s == 0:
            continue
        if prev is not None and s != prev:
            changes += 1
        prev = s
    return changes


# ---------------------------------------------------------------------------
# closed-form spectra


def kps_residual(p: float) -> float:
    return p * p - (1.0 - p) ** 3


def solve_kps(tol: float = DEFAULT_TOL) -> float:
    """Unique root in [0, 1] of p**2 = (1 - p)**3.

    f(p) = p**2 - (1-p)**3 is strictly increasing with f(0) = -1 and
    f(1) = 1. The entropy of the 11-free set is ``-log(1 - p)``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = _bisect(kps_residual, 0.0, 1.0)
    if abs(kps_residual(p)) > tol:
        raise RootFindingError(f"residual {kps_residual(p):.3e} above tol {tol:.1e}")
    return p


def kps_entropy(tol: float = DEFAULT_TOL) -> float:
    return -math.log1p(-solve_kps(tol))


@dataclass(frozen=True)
class PSRoots:
    p: float
    q: float

    def residuals(self, alpha: float) -> tuple[float, float]:
        p, q = self.p, self.q
        return (
            abs(p * p * (1.0 - q) - (1.0 - p) ** 3),
            abs(2.0 * p * q - alpha * (2.0 + p - q)),
        )


def _ps_q(p: float, alpha: float) -> float:
    # from 2pq = alpha (2 + p - q)
    if alpha == 0.0:
        return 0.0
    return alpha * (2.0 + p) / (2.0 * p + alpha)


def solve_ps(alpha: float, tol: float = DEFAULT_TOL) -> PSRoots:
    """Solve p**2 (1-q) = (1-p)**3, 2pq = alpha (2 + p - q) for (p, q) in [0,1]**2.

    q is eliminated through the second equation; the remaining equation in p
    is bracketed on [alpha/(2-alpha), 1], where q runs from 1 down to
    3 alpha/(2 + alpha).
    """
    if not (0.0 <= alpha < 1.0):
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    if tol <= 0:
        raise ValueError("tol must be positive")

    def g(p):
        return p * p * (1.0 - _ps_q(p, alpha)) - (1.0 - p) ** 3

    lo = alpha / (2.0 - alpha)
    hi = 1.0
    if _sign_changes(g, lo, hi) != 1:
        raise RootFindingError(f"expected a single sign change on the bracket at alpha={alpha}")
    p = _bisect(g, lo, hi)
    roots = PSRoots(p=p, q=_ps_q(p, alpha))
    worst = max(roots.residuals(alpha))
    if worst > tol:
        raise RootFindingError(f"residual {worst:.3e} above tol {tol:.1e} at alpha={alpha}")
    return roots


@dataclass(frozen=True)
class SpectrumPoint:
    alpha: float
    theta: float | None
    entropy: float
    residual: float = 0.0
    regime: str = INTERIOR
    family: str = ""

    @property
    def entropy_bits(self) -> float:
        return self.entropy / LOG2


def h_A_alpha(alpha: float, tol: float = DEFAULT_TOL) -> SpectrumPoint:
    """Entropy of the sequences whose (k, 2k) pattern-11 average tends to alpha."""
    if alpha < 0.0 or alpha > 1.0:
        return SpectrumPoint(alpha, None, 0.0, 0.0, EMPTY, "A")
    if alpha == 1.0:
        # p = q = 1: the formula is 0 * inf; the set is the all-ones limit
        return SpectrumPoint(alpha, None, 0.0, 0.0, BOUNDARY, "A")
    roots = solve_ps(alpha, tol)
    p, q = roots.p, roots.q
    value = -math.log1p(-p)
    if alpha > 0.0:
        value -= 0.5 * alpha * math.log(q * (1.0 - p) / (p * (1.0 - q)))
    regime = BOUNDARY if alpha == 0.0 else INTERIOR
    return SpectrumPoint(alpha, None, value, max(roots.residuals(alpha)), regime, "A")


def h_normal_alpha(alpha: float) -> SpectrumPoint:
    """Entropy of the normal sequences in the alpha level set (empty above 1/2)."""
    if alpha < 0.0 or alpha > 0.5:
        return SpectrumPoint(alpha, None, 0.0, 0.0, EMPTY, "normal")
    value = 0.5 * LOG2 + 0.5 * binary_entropy(2.0 * alpha)
    regime = BOUNDARY if alpha in (0.0, 0.5) else INTERIOR
    return SpectrumPoint(alpha, None, value, 0.0, regime, "normal")


def freq_domain(alpha: float) -> tuple[float, float]:
    """Admissible digit frequencies [alpha, (2 + alpha)/3]."""
    return alpha, (2.0 + alpha) / 3.0


_EDGE = 1e-12


def h_freq(theta: float, alpha: float) -> SpectrumPoint:
    """Entropy of the sequences with digit frequency theta in the alpha level set.

    (1 - theta/2) H((2 theta - alpha)/(2 - theta)) + (theta/2) H((theta - alpha)/theta)
    on alpha <= theta <= (2 + alpha)/3, empty elsewhere.
    """
    lo, hi = freq_domain(alpha)
    if alpha < 0.0 or alpha > 1.0 or theta < lo - _EDGE or theta > hi + _EDGE:
        return SpectrumPoint(alpha, theta, 0.0, 0.0, EMPTY, "freq")
    theta = min(max(theta, lo), hi)
    if theta == 0.0:
        return SpectrumPoint(alpha, theta, 0.0, 0.0, BOUNDARY, "freq")
    p = min(max((2.0 * theta - alpha) / (2.0 - theta), 0.0), 1.0)
    r = min(max((theta - alpha) / theta, 0.0), 1.0)
    value = (1.0 - 0.5 * theta) * binary_entropy(p) + 0.5 * theta * binary_entropy(r)
    on_edge = abs(theta - lo) <= _EDGE or abs(theta - hi) <= _EDGE or alpha == 0.0
    return SpectrumPoint(alpha, theta, value, 0.0, BOUNDARY if on_edge else INTERIOR, "freq")


def freq_derivative(theta: float, alpha: float) -> float:
    """d h_freq / d theta, valid strictly inside the admissible interval."""
    num = math.log(theta) + 3.0 * math.log(2.0 - 3.0 * theta + alpha)
    den = 2.0 * math.log(2.0 * theta - alpha) + math.log(theta - alpha) + math.log(2.0 - theta)
    return 0.5 * (num - den)


def corollary_residual(theta: float, alpha: float) -> float:
    """(2t-a)^2 (t-a)(2-t) - t (2-3t+a)^3, divided by t when alpha == 0."""
    if alpha == 0.0:
        return 4.0 * theta**2 * (2.0 - theta) - (2.0 - 3.0 * theta) ** 3
    return (2.0 * theta - alpha) ** 2 * (theta - alpha) * (2.0 - theta) - theta * (
        2.0 - 3.0 * theta + alpha
    ) ** 3


def solve_corollary_theta(alpha: float, tol: float = DEFAULT_TOL) -> float:
    """The digit frequency maximising ``h_freq(., alpha)``.

    The derivative tends to +inf at theta = alpha and to -inf at
    (2 + alpha)/3 and is decreasing in between, so bisection on its sign
    finds the unique stationary point.
    """
    if not (0.0 <= alpha < 1.0):
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    lo, hi = freq_domain(alpha)
    theta = _bisect(lambda t: -freq_derivative(t, alpha), lo, hi)
    res = abs(corollary_residual(theta, alpha))
    if res > tol:
        raise RootFindingError(f"corollary residual {res:.3e} above tol {tol:.1e} at alpha={alpha}")
    return theta


def theta_star_closed_form() -> float:
    """Closed-form real root of 4 t^2 (2 - t) = (2 - 3t)^3."""
    c = (2.0 / 23.0) ** (2.0 / 3.0)
    s = 3.0 * math.sqrt(69.0)  # both cube-root arguments are positive
    return (2.0 / 3.0) * (1.0 + c * (s - 23.0) ** (1.0 / 3.0) - c * (s + 23.0) ** (1.0 / 3.0))


# ---------------------------------------------------------------------------
# scans


def grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic grid; ``stop`` is kept if within 1e-9 of a grid point."""
    if step <= 0:
        raise ValueError("step must be positive")
    if stop < start - 1e-9:
        return []
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


FAMILIES = ("A", "normal", "freq")


def _point(family: str, alpha: float, theta):
    if family == "A":
        return h_A_alpha(alpha)
    if family == "normal":
        return h_normal_alpha(alpha)
    return h_freq(theta, alpha)


def spectrum_scan(alphas, thetas=None, family: str = "normal", workers: int = 1) -> list[SpectrumPoint]:
    """Tabulate one spectrum family over a grid.

    ``family`` is ``"A"``, ``"normal"`` or ``"freq"``; the last needs
    ``thetas`` and scans the product grid (alpha outer, theta inner).
    Rows come back in grid order whatever the number of workers.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
    if family == "freq":
        if thetas is None:
            raise ValueError("the freq family needs a theta grid")
        jobs = [(a, t) for a in alphas for t in thetas]
    else:
        jobs = [(a, None) for a in alphas]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda job: _point(family, *job), jobs))
    return [_point(family, a, t) for a, t in jobs]


SCAN_COLUMNS = ["alpha", "theta", "entropy_nats", "entropy_bits", "regime", "residual"]


def _row(pt: SpectrumPoint) -> dict:
    return {
        "alpha": pt.alpha,
        "theta": pt.theta,
        "entropy_nats": pt.entropy,
        "entropy_bits": pt.entropy_bits,
        "regime": pt.regime,
        "residual": pt.residual,
    }


def scan_to_csv(points, header_lines=()) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCAN_COLUMNS)
    for pt in points:
        row = _row(pt)
        writer.writerow(["" if row[c] is None else (repr(row[c]) if isinstance(row[c], float) else row[c]) for c in SCAN_COLUMNS])
    return buf.getvalue()


def scan_to_json(points) -> str:
    return json.dumps([_row(pt) for pt in points])


def point_as_dict(pt: SpectrumPoint) -> dict:
    return asdict(pt)
