"""Closed-form epidemic thresholds and the four-region severity classifier.

For the pair-level model on a network of mean degree ``k`` the early-time
behavior of an outbreak seeded with a vanishing infected count is governed
by three closed-form quantities:

* the basic reproduction number ``R0 = beta * k / gamma`` (infected count
  initially grows iff ``R0 > 1``, i.e. ``beta > beta* = gamma / k``);
* ``p1* = beta * (k/2 - 3/2) - gamma``, the deactivation rate at which the
  initial growth rate of the S-I edge count (equivalently the acceleration
  of S) changes sign;
* ``p2* = p1* - gamma + gamma^2 / (beta * k)``, where the initial
  acceleration of the infected count changes sign.

Severity regions, from mildest to worst: I (``R0 <= 1``, immediate
die-off), III (``p >= p1*``), II (``p2* <= p < p1*``), IV (``p < p2*``,
accelerating outbreak).  Ties go to the less severe region.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from types import SimpleNamespace
from typing import Sequence

import numpy as np

from . import meanfield

__all__ = [
    "Region",
    "ThresholdReport",
    "basic_reproduction_number",
    "beta_star",
    "p1_star",
    "p2_star",
    "si_initial_rate",
    "classify_region",
    "threshold_report",
    "LimitSample",
    "LimitReport",
    "verify_limits_numerically",
]


class Region(str, Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


def basic_reproduction_number(beta: float, gamma: float, k: float) -> float:
    """``beta * k / gamma``."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return beta * k / gamma


def beta_star(gamma: float, k: float) -> float:
    """Infection rate at which R0 = 1: ``gamma / k``."""
    return gamma / k


def p1_star(beta: float, gamma: float, k: float) -> float:
    """``beta * (k/2 - 3/2) - gamma``; may be negative (a nonpositive value
    means the S-I edge count shrinks initially for every p >= 0)."""
    return beta * (k / 2.0 - 1.5) - gamma


def p2_star(beta: float, gamma: float, k: float) -> float:
    """``p1* - gamma + gamma^2 / (beta * k)``."""
    if beta * k == 0:
        raise ValueError("p2* is undefined for beta * k = 0")
    return p1_star(beta, gamma, k) - gamma + gamma**2 / (beta * k)


def si_initial_rate(beta: float, gamma: float, p: float, k: float) -> float:
    """Initial growth rate of the S-I edge count per seed infected, in the
    vanishing-seed limit: ``beta * (k^2/2 - 3k/2) - (gamma + p) * k``.

    Equals ``k * (p1* - p)``, so it vanishes exactly at ``p = p1*``.
    """
    return beta * (k**2 / 2.0 - 1.5 * k) - (gamma + p) * k


def classify_region(beta: float, gamma: float, p: float, k: float) -> Region:
    """Severity region of the parameter point.

    Region I if ``R0 <= 1``; otherwise IV if ``p < p2*``, II if
    ``p2* <= p < p1*``, III if ``p >= p1*``.  Nonpositive thresholds
    collapse regions naturally: with ``p1* <= 0`` every ``p >= 0`` is
    Region III, and with only ``p2* <= 0`` the axis splits between II
    and III.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if p < 0:
        raise ValueError("p must be nonnegative")
    if basic_reproduction_number(beta, gamma, k) <= 1.0:
        return Region.I
    if p < p2_star(beta, gamma, k):
        return Region.IV
    if p < p1_star(beta, gamma, k):
        return Region.II
    return Region.III


@dataclass(frozen=True)
class ThresholdReport:
    """The thresholds at one (beta, gamma, k), optionally classified at a
    deactivation rate p.  ``p2_star`` is NaN when beta = 0.
    ``collapsed`` flags nonpositive thresholds (regions II and/or IV are
    then empty on the p >= 0 axis)."""

    r0: float
    beta_star: float
    p1_star: float
    p2_star: float
    region: Region | None = None
    collapsed: bool = False

    def to_record(self) -> str:
        """Flat ``key=value`` text record, one pair per line."""
        lines = [
            f"r0={self.r0}",
            f"beta_star={self.beta_star}",
            f"p1_star={self.p1_star}",
            f"p2_star={self.p2_star}",
        ]
        if self.region is not None:
            lines.append(f"region={self.region.value}")
        if self.collapsed:
            lines.append("note=thresholds nonpositive; regions collapse for p >= 0")
        return "\n".join(lines)


def threshold_report(beta: float, gamma: float, k: float,
                     p: float | None = None) -> ThresholdReport:
    r0 = basic_reproduction_number(beta, gamma, k)
    p1 = p1_star(beta, gamma, k)
    p2 = p2_star(beta, gamma, k) if beta * k > 0 else float("nan")
    region = classify_region(beta, gamma, p, k) if p is not None else None
    collapsed = r0 > 1.0 and (p1 <= 0 or (not np.isnan(p2) and p2 <= 0))
    return ThresholdReport(
        r0=r0, beta_star=beta_star(gamma, k), p1_star=p1, p2_star=p2,
        region=region, collapsed=collapsed,
    )


@dataclass(frozen=True)
class LimitSample:
    """Initial rates per seed infected at one finite seed size ``i0``."""

    i0: float
    i_rate: float
    si_rate: float
    i_accel: float


@dataclass(frozen=True)
class LimitReport:
    """Numerically evaluated vanishing-seed limits against the closed forms.

    ``samples`` holds the finite-``i0`` evaluations in sequence order;
    ``i_rate_limit``, ``si_rate_limit`` and ``i_accel_limit`` are the
    closed-form targets.  ``converged`` requires every rate at the smallest
    seed to match its closed form to ``tolerance`` relative error, and
    ``region_consistent`` requires the numeric signs at the smallest seed to
    reproduce the region classifier (thresholds themselves sit on a sign
    boundary and are excluded from the sign check).
    """

    samples: tuple[LimitSample, ...]
    i_rate_limit: float
    si_rate_limit: float
    i_accel_limit: float
    tolerance: float
    region: Region
    converged: bool
    region_consistent: bool


def _rates_per_seed(beta, gamma, p, k, i0, n, nbar):
    # only the rates enter the ODE right-hand side; no time step is involved
    params = SimpleNamespace(beta=beta, gamma=gamma, p=p, r=0.0)
    state = meanfield.analytic_initial(n, i0, k, nbar)
    deriv = meanfield.rhs(state, params, k)
    i_rate = deriv[1] / i0
    si_rate = deriv[4] / i0
    i_accel = beta * deriv[4] / i0 - gamma * i_rate
    return LimitSample(i0=i0, i_rate=float(i_rate), si_rate=float(si_rate),
                       i_accel=float(i_accel))


def verify_limits_numerically(
    beta: float, gamma: float, p: float, k: float,
    i0_sequence: Sequence[float], node_count: float = 100.0,
    tolerance: float = 1e-6,
) -> LimitReport:
    """Evaluate the initial per-seed rates of I, of the S-I edge count, and
    the acceleration of I from the model right-hand side along a decreasing
    sequence of seed sizes, and compare them against the closed forms.

    The acceleration is obtained as ``beta * [SI]'(0) - gamma * I'(0)``.
    The reactivation rate plays no role because the seed state has no
    deactivated edges.
    """
    i0s = list(i0_sequence)
    if not i0s or any(x <= 0 for x in i0s) or any(
        a <= b for a, b in zip(i0s, i0s[1:])
    ):
        raise ValueError("i0_sequence must be positive and strictly decreasing")
    nbar = k * node_count / 2.0
    samples = tuple(
        _rates_per_seed(beta, gamma, p, k, i0, node_count, nbar) for i0 in i0s
    )

    i_rate_limit = beta * k - gamma
    si_rate_limit = si_initial_rate(beta, gamma, p, k)
    i_accel_limit = beta * si_rate_limit - gamma * i_rate_limit

    def rel_err(value, target):
        return abs(value - target) / max(abs(target), 1e-300)

    last = samples[-1]
    converged = (
        rel_err(last.i_rate, i_rate_limit) < tolerance
        and rel_err(last.si_rate, si_rate_limit) < tolerance
        and rel_err(last.i_accel, i_accel_limit) < tolerance
    )

    region = classify_region(beta, gamma, p, k)
    p1 = p1_star(beta, gamma, k)
    p2 = p2_star(beta, gamma, k) if beta * k > 0 else float("nan")
    expectations = []
    if basic_reproduction_number(beta, gamma, k) != 1.0:
        expectations.append((last.i_rate > 0) == (region is not Region.I))
    if region is not Region.I:
        if p != p1:
            expectations.append((last.si_rate > 0) == (p < p1))
        if not np.isnan(p2) and p != p2:
            expectations.append((last.i_accel > 0) == (p < p2))
    region_consistent = all(expectations)

    return LimitReport(
        samples=samples,
        i_rate_limit=i_rate_limit,
        si_rate_limit=si_rate_limit,
        i_accel_limit=i_accel_limit,
        tolerance=tolerance,
        region=region,
        converged=converged,
        region_consistent=region_consistent,
    )
