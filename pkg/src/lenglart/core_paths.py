"""Time grids, sampled path pairs, running suprema and stopping indices.

Every generator in the package produces :class:`PathPair` objects (or the
reduced :class:`SupSample` statistic) and every checker consumes them, so the
invariants enforced here are the safety net for the whole toolkit: ``x`` and
``g`` are non-negative, ``g`` is non-decreasing, and both live on the same
uniform grid.

Predictability of ``g`` has no finite runtime witness; it is carried as the
``g_predictable_shift`` flag meaning "g at index k was computed from
randomness revealed strictly before step k".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "TimeGrid",
    "PathPair",
    "SupSample",
    "StoppingIndex",
    "INFINITE_INDEX",
    "running_sup",
    "p_moment_of_sup",
    "evaluate_at_stopping",
]


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_k = k * step, k = 0 .. floor(horizon/step)."""

    step: float
    horizon: float

    def __post_init__(self) -> None:
        if not (self.step > 0):
            raise ValueError("step must be positive")
        if self.horizon < self.step:
            raise ValueError("horizon must be at least one step")

    @property
    def n_points(self) -> int:
        return int(math.floor(self.horizon / self.step + 1e-12)) + 1

    def times(self) -> np.ndarray:
        return np.arange(self.n_points) * self.step

    @classmethod
    def dyadic(cls, horizon: float, level: int) -> "TimeGrid":
        """Grid with step 2**-level."""
        return cls(step=2.0 ** (-level), horizon=horizon)


@dataclass(frozen=True)
class PathPair:
    """Aligned trajectories of a dominated process x and its dominating g."""

    x: np.ndarray
    g: np.ndarray
    grid: TimeGrid
    g_predictable_shift: bool = True

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        g = np.asarray(self.g, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "g", g)
        n = self.grid.n_points
        if x.shape != (n,) or g.shape != (n,):
            raise ValueError(
                f"x and g must both have {n} entries, got {x.shape} and {g.shape}"
            )
        if np.any(x < 0) or np.any(g < 0):
            raise ValueError("path values must be non-negative")
        if np.any(np.diff(g) < -1e-12 * (1.0 + np.abs(g[:-1]))):
            raise ValueError("g must be non-decreasing")
        x.flags.writeable = False
        g.flags.writeable = False

    @property
    def last_index(self) -> int:
        return self.grid.n_points - 1

    def sup_sample(self) -> "SupSample":
        return SupSample(sup_x=float(self.x.max()), sup_g=float(self.g.max()))

    def to_csv_rows(self) -> Iterable[tuple[float, float, float]]:
        for t, xv, gv in zip(self.grid.times(), self.x, self.g):
            yield (float(t), float(xv), float(gv))


@dataclass(frozen=True)
class SupSample:
    """The pair (sup x, sup g) of one realization."""

    sup_x: float
    sup_g: float

    def __post_init__(self) -> None:
        for v in (self.sup_x, self.sup_g):
            if not math.isfinite(v) or v < 0:
                raise ValueError("suprema must be finite and non-negative")


INFINITE_INDEX = math.inf


@dataclass(frozen=True)
class StoppingIndex:
    """Grid-index valued stopping rule outcome; k = INFINITE_INDEX means
    'never stopped', evaluated at the final grid point by convention."""

    k: float

    def __post_init__(self) -> None:
        if self.k == INFINITE_INDEX:
            return
        if self.k != int(self.k) or self.k < 0:
            raise ValueError("finite stopping index must be a non-negative integer")

    @property
    def is_infinite(self) -> bool:
        return self.k == INFINITE_INDEX


def running_sup(path: Sequence[float] | np.ndarray) -> np.ndarray:
    """Prefix maximum: output[k] = max(path[0..k])."""
    arr = np.asarray(path, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("empty path")
    return np.maximum.accumulate(arr)


def p_moment_of_sup(samples, p, side="X", method=None):
    """Monte Carlo estimate of E[(sup)^p] over the chosen side of the pair.

    ``samples`` is a non-empty collection of SupSample. Returns an Estimate;
    the default method is heavy-tail aware (median of means for p >= 0.45).
    """
    from .montecarlo import default_method, estimate_from_values

    samples = list(samples)
    if not samples:
        raise ValueError("empty sample set")
    if not (0.0 < p < 1.0):
        raise ValueError("p must lie in (0,1)")
    if side not in ("X", "G"):
        raise ValueError("side must be 'X' or 'G'")
    vals = np.array(
        [s.sup_x if side == "X" else s.sup_g for s in samples], dtype=float
    )
    if method is None:
        method = default_method(p)
    return estimate_from_values(vals**p, method)


def evaluate_at_stopping(pair: PathPair, tau: StoppingIndex) -> tuple[float, float]:
    """(x, g) at the stopping index; infinite tau evaluates at the horizon."""
    k = pair.last_index if tau.is_infinite else int(tau.k)
    if k > pair.last_index:
        raise ValueError(f"stopping index {k} beyond grid end {pair.last_index}")
    return float(pair.x[k]), float(pair.g[k])
