"""Discrete-time stochastic SIR dynamics with temporary link deactivation.

Nodes progress S -> I -> R on a fixed :class:`~epilink.graph.ContactNetwork`.
Per time step of length ``dt``:

* a susceptible node becomes infected with probability ``beta * dt`` times
  its number of *active* edges to infected nodes;
* an infected node recovers with probability ``gamma * dt``;
* an active S-I edge is temporarily deactivated with probability ``p * dt``;
* a deactivated edge whose endpoints are R-S or R-R is reactivated with
  probability ``r * dt`` (one draw per unordered edge).

The update is synchronous: every transition probability is evaluated against
the state at step k and all transitions are applied together to produce step
k+1.  All event draws are independent, so e.g. an S-I edge can be deactivated
in the same step its susceptible endpoint is infected (yielding a deactivated
I-I edge).  Recovered is absorbing and the adjacency itself never changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .compartments import CompartmentVector, TimeSeries, average_time_series
from .graph import ContactNetwork

__all__ = [
    "NodeStatus",
    "ModelParams",
    "SimState",
    "init_sim",
    "step",
    "compartment_counts",
    "run_simulation",
    "monte_carlo_mean",
    "replicate_rng",
    "deactivated_pairs",
]


class NodeStatus(IntEnum):
    SUSCEPTIBLE = 0
    INFECTED = 1
    RECOVERED = 2


_S, _I, _R = NodeStatus.SUSCEPTIBLE, NodeStatus.INFECTED, NodeStatus.RECOVERED

# unordered endpoint-status pair -> column among (SS, SI, SR, II, IR, RR),
# keyed by min(status)*3 + max(status)
_PAIR_CODE_TO_COLUMN = np.full(9, -1, dtype=np.int64)
for _code, _col in ((0, 0), (1, 1), (2, 2), (4, 3), (5, 4), (8, 5)):
    _PAIR_CODE_TO_COLUMN[_code] = _col


@dataclass(frozen=True)
class ModelParams:
    """Rates of the network model plus the time step.

    ``beta``  infection rate per active S-I contact,
    ``gamma`` recovery rate,
    ``p``     deactivation rate per active S-I edge,
    ``r``     reactivation rate per eligible deactivated edge,
    ``dt``    time step.

    Per-step probabilities must be valid: ``gamma*dt``, ``p*dt`` and ``r*dt``
    may not exceed 1, and ``beta*dt*max_degree`` may not exceed 1 on the
    network the parameters are used with (checked by :meth:`validate_for`).
    """

    beta: float
    gamma: float
    p: float
    r: float
    dt: float

    def __post_init__(self):
        for name in ("beta", "gamma", "p", "r"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        for name in ("gamma", "p", "r"):
            if getattr(self, name) * self.dt > 1.0:
                raise ValueError(f"{name}*dt exceeds 1; decrease dt")

    def validate_for(self, net: ContactNetwork) -> None:
        """Reject time steps for which some node's per-step infection
        probability could exceed 1.  This is a hard error rather than a
        clamp: clamping would silently change the model."""
        if self.beta * self.dt * net.max_degree > 1.0:
            raise ValueError(
                f"beta*dt*max_degree = {self.beta * self.dt * net.max_degree:g} "
                "exceeds 1; decrease dt"
            )


@dataclass
class SimState:
    """Microscopic state at one time step.

    ``statuses`` holds a :class:`NodeStatus` per node; ``deactivated`` is a
    boolean mask over the rows of ``net.edges`` (an entry is True while that
    edge is temporarily deactivated, so the deactivated set is a subset of
    the network's edges by construction).  A state belongs to one replicate
    and is never shared across concurrent writers.
    """

    statuses: np.ndarray
    deactivated: np.ndarray
    step_index: int = 0


def deactivated_pairs(state: SimState, net: ContactNetwork) -> set[tuple[int, int]]:
    """Deactivated edges as a set of unordered node pairs ``(i, j)``, i < j."""
    return {(int(i), int(j)) for i, j in net.edges[state.deactivated]}


def init_sim(net: ContactNetwork, infected_count: int, seed) -> SimState:
    """Initial state with ``infected_count`` infected nodes chosen uniformly
    without replacement, everyone else susceptible and no deactivated edges.

    ``seed`` may be an int, a ``SeedSequence`` or an existing ``Generator``;
    the choice is deterministic given the seed.
    """
    if not 0 <= infected_count <= net.node_count:
        raise ValueError("infected_count out of range")
    rng = np.random.default_rng(seed)
    statuses = np.full(net.node_count, _S, dtype=np.int8)
    chosen = rng.choice(net.node_count, size=infected_count, replace=False)
    statuses[chosen] = _I
    return SimState(
        statuses=statuses,
        deactivated=np.zeros(net.edge_count, dtype=bool),
        step_index=0,
    )


def step(state: SimState, net: ContactNetwork, params: ModelParams,
         rng: np.random.Generator) -> SimState:
    """Advance one synchronous step.

    Draw order is fixed for reproducibility: one uniform per node, then one
    uniform per edge.  A node's draw decides infection (if susceptible) or
    recovery (if infected); an edge's draw decides deactivation (if an
    active S-I edge) or reactivation (if a deactivated R-S or R-R edge).
    """
    params.validate_for(net)
    statuses = state.statuses
    deact = state.deactivated
    u = net.edges[:, 0]
    v = net.edges[:, 1]
    su = statuses[u]
    sv = statuses[v]
    active = ~deact

    # active infectious contacts per susceptible node
    s_i = active & (su == _S) & (sv == _I)
    i_s = active & (su == _I) & (sv == _S)
    contacts = (
        np.bincount(u[s_i], minlength=net.node_count)
        + np.bincount(v[i_s], minlength=net.node_count)
    )

    node_draws = rng.random(net.node_count)
    edge_draws = rng.random(net.edge_count)

    infect = (statuses == _S) & (node_draws < params.beta * params.dt * contacts)
    recover = (statuses == _I) & (node_draws < params.gamma * params.dt)

    mixed = s_i | i_s
    deactivate = mixed & (edge_draws < params.p * params.dt)

    eligible = (
        ((su == _R) & (sv == _S)) | ((su == _S) & (sv == _R))
        | ((su == _R) & (sv == _R))
    )
    reactivate = deact & eligible & (edge_draws < params.r * params.dt)

    new_statuses = statuses.copy()
    new_statuses[infect] = _I
    new_statuses[recover] = _R
    new_deact = deact.copy()
    new_deact[deactivate] = True
    new_deact[reactivate] = False

    return SimState(
        statuses=new_statuses,
        deactivated=new_deact,
        step_index=state.step_index + 1,
    )


def compartment_counts(state: SimState, net: ContactNetwork) -> CompartmentVector:
    """Project a microscopic state onto the 14 compartments.

    Edges are counted unordered (an I-I edge counts once) and classified by
    endpoint statuses and active/deactivated membership.
    """
    node = np.bincount(state.statuses, minlength=3)
    su = state.statuses[net.edges[:, 0]]
    sv = state.statuses[net.edges[:, 1]]
    code = np.minimum(su, sv).astype(np.int64) * 3 + np.maximum(su, sv)
    column = _PAIR_CODE_TO_COLUMN[code]
    active_counts = np.bincount(column[~state.deactivated], minlength=6)
    deact_counts = np.bincount(column[state.deactivated], minlength=6)
    if deact_counts[0]:
        raise ValueError("invalid state: deactivated S-S edge")
    return CompartmentVector(
        S=int(node[_S]), I=int(node[_I]), R=int(node[_R]),
        SS=int(active_counts[0]), SI=int(active_counts[1]), SR=int(active_counts[2]),
        II=int(active_counts[3]), IR=int(active_counts[4]), RR=int(active_counts[5]),
        dSI=int(deact_counts[1]), dSR=int(deact_counts[2]), dII=int(deact_counts[3]),
        dIR=int(deact_counts[4]), dRR=int(deact_counts[5]),
    )


def _finished(state: SimState) -> bool:
    # Absorbing state: no infected nodes left and every temporarily
    # deactivated edge has reactivated, so nothing can change any more.
    return not (state.statuses == _I).any() and not state.deactivated.any()


def run_simulation(net: ContactNetwork, params: ModelParams, init: SimState,
                   max_steps: int, rng) -> TimeSeries:
    """Iterate :func:`step` from ``init``, recording compartment counts at
    every step (row 0 is the initial condition).

    Stops early once the state is absorbing -- no infected nodes remain and
    the deactivated set has drained -- otherwise runs ``max_steps`` steps.
    ``rng`` may be an int seed, a ``SeedSequence`` or a ``Generator``.
    """
    params.validate_for(net)
    rng = np.random.default_rng(rng)
    rows = [compartment_counts(init, net)]
    state = init
    while state.step_index - init.step_index < max_steps and not _finished(state):
        state = step(state, net, params, rng)
        rows.append(compartment_counts(state, net))
    return TimeSeries(dt=params.dt, data=np.array(rows, dtype=float))


def replicate_rng(master_seed, index: int) -> np.random.Generator:
    """Independent stream for replicate ``index``, derived by hashing
    ``(master_seed, index)`` through ``numpy.random.SeedSequence``."""
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(index,))
    )


def monte_carlo_mean(net: ContactNetwork, params: ModelParams,
                     infected_count: int, replicates: int, master_seed,
                     max_steps: int) -> TimeSeries:
    """Per-step arithmetic mean of compartment counts over independent
    replicates.

    Replicate ``j`` draws its initial infected set and its whole trajectory
    from the stream ``replicate_rng(master_seed, j)``, so results do not
    depend on scheduling and any replicate can be reproduced in isolation.
    Replicates that reach absorption early are right-padded with their
    terminal state before averaging.
    """
    if replicates < 1:
        raise ValueError("need at least one replicate")
    runs = []
    for j in range(replicates):
        rng = replicate_rng(master_seed, j)
        init = init_sim(net, infected_count, rng)
        runs.append(run_simulation(net, params, init, max_steps, rng))
    return average_time_series(runs)
