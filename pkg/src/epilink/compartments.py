"""Compartment bookkeeping shared by the network simulator and the ODE model.

Both models describe the same 14 quantities: 3 node counts, 6 active-edge
counts and 5 deactivated-edge counts (there is no deactivated S-S
compartment, since only S-I edges ever deactivate and no endpoint can return
to susceptible).  A uniformly sampled history of these quantities is a
:class:`TimeSeries`, the common currency for comparing the two models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

__all__ = [
    "CompartmentVector",
    "FIELDS",
    "CSV_HEADER",
    "TimeSeries",
    "average_time_series",
    "pad_to_common_length",
]


class CompartmentVector(NamedTuple):
    """Node, active-edge and deactivated-edge counts at one time point.

    Values are integers when read off a single simulation state and reals
    for ensemble means or ODE states.
    """

    S: float
    I: float
    R: float
    SS: float
    SI: float
    SR: float
    II: float
    IR: float
    RR: float
    dSI: float
    dSR: float
    dII: float
    dIR: float
    dRR: float

    @property
    def node_total(self) -> float:
        return self.S + self.I + self.R

    @property
    def edge_total(self) -> float:
        return math.fsum(self[3:])

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


FIELDS: tuple[str, ...] = CompartmentVector._fields
CSV_HEADER = "t," + ",".join(FIELDS)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Compartment counts sampled on the uniform grid ``t = k * dt``.

    ``data`` has one row per sample and one column per field of
    :class:`CompartmentVector`, in that order.  Row 0 is the initial
    condition.
    """

    dt: float
    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(np.asarray(self.data, dtype=float))
        if data.ndim != 2 or data.shape[1] != len(FIELDS):
            raise ValueError(f"data must be a (rows, {len(FIELDS)}) array")
        if data.shape[0] == 0:
            raise ValueError("a time series needs at least one row")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self)) * self.dt

    def row(self, k: int) -> CompartmentVector:
        return CompartmentVector(*self.data[k])

    def column(self, name: str) -> np.ndarray:
        return self.data[:, FIELDS.index(name)]

    def padded_to(self, rows: int) -> "TimeSeries":
        """Right-pad with copies of the terminal row up to ``rows`` rows."""
        if rows <= len(self):
            return self
        tail = np.tile(self.data[-1], (rows - len(self), 1))
        return TimeSeries(self.dt, np.vstack([self.data, tail]))

    def to_csv_text(self) -> str:
        """The CSV payload: ``t`` plus the 14 compartment columns, full
        float precision."""
        lines = [CSV_HEADER]
        for k in range(len(self)):
            values = ",".join(str(v) for v in self.data[k])
            lines.append(f"{k * self.dt},{values}")
        return "\n".join(lines) + "\n"

    def to_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv_text())

    @classmethod
    def from_csv(cls, path: str | Path) -> "TimeSeries":
        lines = Path(path).read_text().splitlines()
        if not lines or lines[0] != CSV_HEADER:
            raise ValueError(f"{path}: missing or unexpected header")
        rows = [[float(v) for v in ln.split(",")] for ln in lines[1:] if ln]
        arr = np.array(rows, dtype=float)
        if arr.shape[0] < 1:
            raise ValueError(f"{path}: no data rows")
        dt = arr[1, 0] - arr[0, 0] if arr.shape[0] > 1 else 1.0
        return cls(dt=dt, data=arr[:, 1:])


def pad_to_common_length(a: TimeSeries, b: TimeSeries) -> tuple[TimeSeries, TimeSeries]:
    """Pad the shorter of two series to the longer length by repeating its
    terminal row."""
    rows = max(len(a), len(b))
    return a.padded_to(rows), b.padded_to(rows)


def average_time_series(series: Iterable[TimeSeries]) -> TimeSeries:
    """Row-wise arithmetic mean.  Shorter members are right-padded with
    their terminal state before averaging."""
    members = list(series)
    if not members:
        raise ValueError("nothing to average")
    dt = members[0].dt
    if any(ts.dt != dt for ts in members):
        raise ValueError("all series must share the same dt")
    rows = max(len(ts) for ts in members)
    stacked = np.stack([ts.padded_to(rows).data for ts in members])
    return TimeSeries(dt, stacked.mean(axis=0))
