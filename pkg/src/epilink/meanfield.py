"""Pair-level mean-field ODE model of the adaptive SIR dynamics.

The state has 14 compartments in the field order of
:class:`~epilink.compartments.CompartmentVector`: expected counts of the
3 node types, the 6 active edge types and the 5 deactivated edge types.
Infection moves probability between edge classes through triple links (paths
A-B-C through a shared center node); triples are closed in terms of pairs
with the homogeneous moment closure

    [ABC] ~= ((k - 1) / k) * [AB] * [BC] / B,

where ``k`` is the mean degree.  All triples that occur here are centered at
a susceptible node, so the closure divides by S; to keep the flow stable as
S -> 0 every closure term is set to 0 once S falls below a small cutoff
(``s_guard``, an absolute node count).

Both the node total and the edge total are conserved exactly by the flow;
an integrated trajectory preserves them to integration tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rk45
from .compartments import FIELDS, CompartmentVector, TimeSeries

__all__ = [
    "MeanFieldState",
    "IntegratorConfig",
    "Trajectory",
    "triple_closure",
    "rhs",
    "analytic_initial",
    "empirical_initial",
    "random_mixing_initial",
    "integrate",
    "final_recovered",
    "DEFAULT_S_GUARD",
]

# A mean-field state is a length-14 float array in FIELDS order.
MeanFieldState = np.ndarray

DEFAULT_S_GUARD = 0.001


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and stopping rules for :func:`integrate`.

    ``i_extinction`` is the infected count below which (with the infected
    compartment shrinking) the run is considered over; ``None`` means
    ``1e-8`` times the node total of the initial state.  ``s_guard`` is the
    absolute susceptible count below which the moment-closure terms are
    switched off.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    t_max: float = 500.0
    s_guard: float = DEFAULT_S_GUARD
    i_extinction: float | None = None

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")
        if self.s_guard < 0:
            raise ValueError("s_guard must be nonnegative")


def triple_closure(ab: float, bc: float, b: float, k: float) -> float:
    """Expected number of A-B-C triples given the pair counts ``ab`` and
    ``bc`` and the center-node count ``b``, for mean degree ``k``:
    ``((k - 1) / k) * ab * bc / b``.

    The caller is responsible for guarding the ``b -> 0`` singularity;
    ``b <= 0`` is rejected here.
    """
    if b <= 0:
        raise ValueError("center-node count must be positive")
    if k <= 1:
        raise ValueError("mean degree must exceed 1")
    return (k - 1.0) / k * ab * bc / b


def rhs(state, params, k, s_guard: float = DEFAULT_S_GUARD):
    """Time derivative of the 14 compartments.

    ``params`` provides the rates ``beta``, ``gamma``, ``p`` and ``r``.  The
    five triples [SSI], [ISI], [ISR] and the deactivated-arm triples I-S-dI
    and I-S-dR (all centered at the shared S node) are closed via
    :func:`triple_closure`; when ``S < s_guard`` all five closure terms are
    zero.  The standalone ``-beta*[SI]`` loss in the [SI] equation is
    within-edge infection: the infected endpoint infecting the susceptible
    endpoint of that same edge, which turns the edge into I-I.

    Works element-wise on anything supporting scalar arithmetic, so symbolic
    states can be pushed through for exactness checks.
    """
    (S, I, R, SS, SI, SR, II, IR, RR, dSI, dSR, dII, dIR, dRR) = state
    beta, gamma, p, r = params.beta, params.gamma, params.p, params.r

    if S < s_guard:
        ssi = isi = isr = i_dsi = i_dsr = 0.0
    else:
        prefactor = (k - 1.0) / k / S
        ssi = prefactor * SS * SI
        isi = prefactor * SI * SI
        isr = prefactor * SI * SR
        i_dsi = prefactor * SI * dSI
        i_dsr = prefactor * SI * dSR

    return np.array([
        -beta * SI,                                          # S
        beta * SI - gamma * I,                               # I
        gamma * I,                                           # R
        -beta * ssi,                                         # SS
        beta * ssi - beta * (SI + isi) - gamma * SI - p * SI,  # SI
        -beta * isr + gamma * SI + r * dSR,                  # SR
        beta * (SI + isi) - 2 * gamma * II,                  # II
        2 * gamma * II - gamma * IR + beta * isr,            # IR
        gamma * IR + r * dRR,                                # RR
        p * SI - gamma * dSI - beta * i_dsi,                 # dSI
        gamma * dSI - r * dSR - beta * i_dsr,                # dSR
        beta * i_dsi - 2 * gamma * dII,                      # dII
        2 * gamma * dII + beta * i_dsr - gamma * dIR,        # dIR
        gamma * dIR - r * dRR,                               # dRR
    ])


def analytic_initial(n: float, i0: float, k: float, nbar: float) -> MeanFieldState:
    """Initial state for threshold analysis: ``i0`` infected whose edges all
    lead to susceptibles, so ``[SI] = k * i0`` and ``[SS] = nbar - k * i0``;
    everything else susceptible and active.

    Intended for small ``i0`` (the initially infected are assumed not to be
    adjacent to each other).
    """
    if not 0 < i0 < n:
        raise ValueError("need 0 < i0 < n")
    if k * i0 > nbar:
        raise ValueError("k * i0 exceeds the total edge count")
    state = np.zeros(len(FIELDS))
    state[0] = n - i0
    state[1] = i0
    state[3] = nbar - k * i0
    state[4] = k * i0
    return state


def empirical_initial() -> MeanFieldState:
    """The 100-node reference initial condition: S=90, I=10, [SS]=485,
    [SI]=110, [II]=5, everything else 0.

    These are ensemble-mean edge counts over network initializations with
    10 randomly infected nodes on the standard 100-node, 600-edge graph.
    """
    state = np.zeros(len(FIELDS))
    state[0] = 90.0
    state[1] = 10.0
    state[3] = 485.0
    state[4] = 110.0
    state[6] = 5.0
    return state


def random_mixing_initial(n: float, infected: float, k: float, nbar: float) -> MeanFieldState:
    """Expected compartments when ``infected`` of ``n`` nodes are infected
    uniformly at random: hypergeometric edge-type expectations
    ``[SS] = nbar * s(s-1)/(n(n-1))`` and so on.

    Generalizes :func:`empirical_initial` to arbitrary sizes.
    """
    if not 0 <= infected <= n:
        raise ValueError("infected out of range")
    if n < 2:
        raise ValueError("need at least 2 nodes")
    s = n - infected
    pairs = n * (n - 1.0)
    state = np.zeros(len(FIELDS))
    state[0] = s
    state[1] = infected
    state[3] = nbar * s * (s - 1.0) / pairs
    state[4] = nbar * 2.0 * s * infected / pairs
    state[6] = nbar * infected * (infected - 1.0) / pairs
    return state


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Adaptively stepped solution: accepted times and the states there."""

    t: np.ndarray
    states: np.ndarray

    @property
    def final_time(self) -> float:
        return float(self.t[-1])

    @property
    def final_state(self) -> MeanFieldState:
        return self.states[-1]

    def final_compartments(self) -> CompartmentVector:
        return CompartmentVector(*self.final_state)

    def interpolate(self, times) -> np.ndarray:
        """States at arbitrary query times, linear between accepted steps."""
        times = np.asarray(times, dtype=float)
        out = np.empty((times.size, self.states.shape[1]))
        for col in range(self.states.shape[1]):
            out[:, col] = np.interp(times, self.t, self.states[:, col])
        return out

    def resample(self, dt: float) -> TimeSeries:
        """Project onto the uniform grid ``t = k * dt`` for CSV export and
        comparison against network ensembles."""
        if dt <= 0:
            raise ValueError("dt must be positive")
        grid = np.arange(int(np.floor(self.final_time / dt + 1e-12)) + 1) * dt
        return TimeSeries(dt=dt, data=self.interpolate(grid))


def integrate(initial: MeanFieldState, params, k: float,
              config: IntegratorConfig | None = None) -> Trajectory:
    """Solve the compartment ODEs from ``initial``.

    Runs until ``t_max`` or until the infected count has dropped below the
    extinction floor while shrinking.  Step-size underflow surfaces as
    :class:`~epilink.rk45.IntegrationError`.
    """
    config = config or IntegratorConfig()
    initial = np.asarray(initial, dtype=float)
    i_floor = config.i_extinction
    if i_floor is None:
        i_floor = 1e-8 * float(initial[:3].sum())

    def f(t, y):
        return rhs(y, params, k, s_guard=config.s_guard)

    def stop(t, y):
        return y[1] < i_floor and params.beta * y[4] - params.gamma * y[1] < 0

    t, states = rk45.solve(
        f, initial, 0.0, config.t_max,
        rel_tol=config.rel_tol, abs_tol=config.abs_tol,
        stop_condition=stop,
    )
    return Trajectory(t=t, states=states)


def final_recovered(trajectory: Trajectory) -> float:
    """Recovered count at the final time as a proportion of the node total
    (the cumulative infected fraction of the run)."""
    final = trajectory.final_state
    return float(final[2] / final[:3].sum())
