"""Monte-Carlo and continuum-limit convergence diagnostics.

Two relative L2 errors over infected time series quantify how well an
ensemble mean has converged:

* ``E`` compares two disjoint same-size ensembles on the same network
  (estimates the Monte-Carlo variance of the ensemble mean);
* ``F`` compares ensembles on networks of different sizes, using infected
  *proportions* so the two scales are comparable.

Series of different lengths are right-padded with their terminal values
before taking norms.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .compartments import pad_to_common_length
from .graph import ContactNetwork, mean_degree
from .netsim import ModelParams, monte_carlo_mean

__all__ = [
    "ErrorReport",
    "l2_relative_error",
    "mc_self_error",
    "cross_size_error",
    "append_error_log",
    "ERROR_LOG_HEADER",
]

ERROR_LOG_HEADER = "metric,M,N1,N2,dt,p,value"


@dataclass(frozen=True)
class ErrorReport:
    """One computed diagnostic with the configuration that produced it."""

    metric: str  # "E" or "F"
    value: float
    m: int
    n1: int
    n2: int
    dt: float
    p: float

    def csv_row(self) -> str:
        return f"{self.metric},{self.m},{self.n1},{self.n2},{self.dt},{self.p},{self.value}"


def l2_relative_error(reference, candidate) -> float:
    """``||reference - candidate||_2 / ||reference||_2``.

    The series must have equal lengths (resample or pad first) and the
    reference may not be identically zero.
    """
    reference = np.asarray(reference, dtype=float)
    candidate = np.asarray(candidate, dtype=float)
    if reference.shape != candidate.shape:
        raise ValueError("series lengths differ; align them first")
    norm = np.linalg.norm(reference)
    if norm == 0:
        raise ValueError("reference series is identically zero")
    return float(np.linalg.norm(reference - candidate) / norm)


def mc_self_error(net: ContactNetwork, params: ModelParams, infected_count: int,
                  m: int, seed_a, seed_b, max_steps: int) -> ErrorReport:
    """E: relative L2 distance between the infected-count series of two
    disjoint ``m``-replicate ensemble means on the same network."""
    if seed_a == seed_b:
        raise ValueError("the two ensembles need distinct master seeds")
    ens_a = monte_carlo_mean(net, params, infected_count, m, seed_a, max_steps)
    ens_b = monte_carlo_mean(net, params, infected_count, m, seed_b, max_steps)
    ens_a, ens_b = pad_to_common_length(ens_a, ens_b)
    value = l2_relative_error(ens_a.column("I"), ens_b.column("I"))
    return ErrorReport(metric="E", value=value, m=m, n1=net.node_count,
                       n2=net.node_count, dt=params.dt, p=params.p)


def cross_size_error(net_small: ContactNetwork, net_large: ContactNetwork,
                     params: ModelParams, infected_fraction: float, m: int,
                     seed_small, seed_large, max_steps: int) -> ErrorReport:
    """F: relative L2 distance between the infected-proportion series of
    ensemble means on two networks of different sizes.

    Both networks must share their mean degree and the initially infected
    fraction must be a whole number of nodes on each.
    """
    if mean_degree(net_small) != mean_degree(net_large):
        raise ValueError("networks must share the same mean degree")
    counts = []
    for net in (net_small, net_large):
        exact = infected_fraction * net.node_count
        count = round(exact)
        if abs(exact - count) > 1e-9:
            raise ValueError(
                f"infected fraction {infected_fraction} is not a whole number "
                f"of nodes for n={net.node_count}"
            )
        counts.append(count)

    ens_small = monte_carlo_mean(net_small, params, counts[0], m, seed_small, max_steps)
    ens_large = monte_carlo_mean(net_large, params, counts[1], m, seed_large, max_steps)
    ens_small, ens_large = pad_to_common_length(ens_small, ens_large)
    value = l2_relative_error(
        ens_small.column("I") / net_small.node_count,
        ens_large.column("I") / net_large.node_count,
    )
    return ErrorReport(metric="F", value=value, m=m, n1=net_small.node_count,
                       n2=net_large.node_count, dt=params.dt, p=params.p)


def append_error_log(report: ErrorReport, path: str | Path) -> None:
    """Append one report to a CSV log, writing the header on first use."""
    path = Path(path)
    new_file = not path.exists()
    with path.open("a") as fh:
        if new_file:
            fh.write(ERROR_LOG_HEADER + "\n")
        fh.write(report.csv_row() + "\n")
