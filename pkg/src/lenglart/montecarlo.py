"""Seeded, reproducible, heavy-tail-aware Monte Carlo estimation.

Sample streams are counter-based: the sample index range is cut into fixed
chunks and chunk j of a run with seed s draws from Philox(key = s * 2^64 + j),
so the result is bit-identical no matter how many workers process the chunks.

The supremum statistics of the extremal family have Pareto tails with index
1/p, hence infinite variance for p >= 1/sqrt(2); the median-of-means
estimator is the default in that regime.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .extremal import (
    ExtremalParams,
    discrete_sup_sampler,
    monotone_sup_sampler,
    sharpness_sup_sampler,
)

__all__ = [
    "CHUNK",
    "EstimatorMethod",
    "PLAIN",
    "median_of_means",
    "default_method",
    "Estimate",
    "RatioEstimate",
    "sample_values",
    "estimate_from_values",
    "estimate",
    "estimate_pair",
    "ratio_from_estimates",
    "ratio_experiment",
    "monotone_ratio_experiment",
    "discrete_ratio_experiment",
]

CHUNK = 1 << 15

# stderr of the median of B approximately normal block means is
# sqrt(pi/2) * sd / sqrt(B)
_MEDIAN_INFLATION = math.sqrt(math.pi / 2.0)


@dataclass(frozen=True)
class EstimatorMethod:
    name: str  # "plain" or "median_of_means"
    blocks: int = 1

    def __post_init__(self) -> None:
        if self.name == "plain":
            if self.blocks != 1:
                raise ValueError("plain estimator takes no block structure")
        elif self.name == "median_of_means":
            if self.blocks < 3 or self.blocks % 2 == 0:
                raise ValueError("median of means needs an odd block count >= 3")
        else:
            raise ValueError(f"unknown estimator method {self.name!r}")

    def to_json(self) -> dict:
        return {"name": self.name, "blocks": self.blocks}

    @classmethod
    def from_json(cls, d: dict) -> "EstimatorMethod":
        return cls(name=d["name"], blocks=int(d.get("blocks", 1)))


PLAIN = EstimatorMethod("plain")


def median_of_means(blocks: int = 31) -> EstimatorMethod:
    return EstimatorMethod("median_of_means", blocks)


def default_method(p: float) -> EstimatorMethod:
    """Median of means once the target's variance is no longer trusted;
    the tail index 1/p of the extremal supremum makes the variance infinite
    for p >= 1/sqrt(2), and 0.45 adds safety margin."""
    return median_of_means(31) if p >= 0.45 else PLAIN


@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo value with uncertainty: stderr for the plain mean,
    a median-dispersion half-width for median of means."""

    value: float
    halfwidth: float
    n_samples: int
    method: EstimatorMethod

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise ValueError("need at least one sample")
        if not math.isfinite(self.halfwidth) or self.halfwidth < 0:
            raise ValueError("halfwidth must be finite and non-negative")

    def to_json(self, seed: int | None = None) -> dict:
        d = {
            "value": self.value,
            "halfwidth": self.halfwidth,
            "n": self.n_samples,
            "method": self.method.to_json(),
        }
        if seed is not None:
            d["seed"] = seed
        return d


@dataclass(frozen=True)
class RatioEstimate:
    numerator: Estimate
    denominator: Estimate
    ratio: float
    ci_low: float
    ci_high: float

    def __post_init__(self) -> None:
        if self.denominator.value <= 0:
            raise ValueError("degenerate denominator")
        if not (self.ci_low <= self.ratio <= self.ci_high):
            raise ValueError("ratio must lie inside its confidence interval")

    def to_json(self, seed: int | None = None) -> dict:
        return {
            "numerator": self.numerator.to_json(),
            "denominator": self.denominator.to_json(),
            "ratio": self.ratio,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            **({"seed": seed} if seed is not None else {}),
        }


def chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    """Counter-based stream for one chunk of the sample index range."""
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) + chunk_index))


def sample_values(sampler, n_samples: int, seed: int, threads: int = 1):
    """Draw n_samples values (or tuples of parallel arrays) chunk by chunk.

    The concatenation order is the chunk order, so the output is independent
    of the worker count.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    sizes = [CHUNK] * (n_samples // CHUNK)
    if n_samples % CHUNK:
        sizes.append(n_samples % CHUNK)

    def run(job):
        j, m = job
        return sampler(chunk_rng(seed, j), m)

    jobs = list(enumerate(sizes))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(job) for job in jobs]
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate([p[i] for p in parts]) for i in range(len(parts[0])))
    return np.concatenate(parts)


def estimate_from_values(values: np.ndarray, method: EstimatorMethod) -> Estimate:
    values = np.asarray(values, dtype=float)
    n = values.size
    if n == 0:
        raise ValueError("empty sample set")
    if method.name == "plain":
        value = float(values.mean())
        stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return Estimate(value=value, halfwidth=stderr, n_samples=n, method=method)
    b = method.blocks
    m = n // b
    if m < 1:
        raise ValueError(f"{n} samples cannot fill {b} blocks")
    block_means = values[: b * m].reshape(b, m).mean(axis=1)
    value = float(np.median(block_means))
    spread = float(block_means.std(ddof=1)) if b > 1 else 0.0
    halfwidth = _MEDIAN_INFLATION * spread / math.sqrt(b)
    return Estimate(value=value, halfwidth=halfwidth, n_samples=n, method=method)


def estimate(sampler, n_samples: int, method: EstimatorMethod, seed: int,
             threads: int = 1) -> Estimate:
    """Estimate E[sampler] with the chosen method; deterministic in
    (seed, n_samples, method) regardless of thread count."""
    if method.name == "median_of_means" and n_samples < method.blocks:
        raise ValueError("n_samples must cover at least one sample per block")
    values = sample_values(sampler, n_samples, seed, threads)
    return estimate_from_values(values, method)


def estimate_pair(paired_sampler, n_samples: int, method: EstimatorMethod,
                  seed: int, threads: int = 1) -> tuple[Estimate, Estimate]:
    """Two estimates from one stream of draws (common random numbers)."""
    num_vals, den_vals = sample_values(paired_sampler, n_samples, seed, threads)
    return estimate_from_values(num_vals, method), estimate_from_values(den_vals, method)


def ratio_from_estimates(num: Estimate, den: Estimate) -> RatioEstimate:
    """Conservative interval-arithmetic CI for num/den; the delta method is
    not trusted for heavy-tailed numerators."""
    if den.value <= 0:
        raise ValueError("degenerate denominator")
    ratio = num.value / den.value
    lo_den = den.value + den.halfwidth
    hi_den = max(den.value - den.halfwidth, 1e-300)
    ci_low = max(num.value - num.halfwidth, 0.0) / lo_den
    ci_high = (num.value + num.halfwidth) / hi_den
    return RatioEstimate(numerator=num, denominator=den, ratio=ratio,
                         ci_low=min(ci_low, ratio), ci_high=max(ci_high, ratio))


def _resolve_method(method, p):
    return default_method(p) if method is None else method


def ratio_experiment(params: ExtremalParams, n_samples: int = 10**6,
                     method: EstimatorMethod | None = None,
                     seed: int | None = None, threads: int = 1) -> RatioEstimate:
    """Moment ratio of the full extremal pair (Brownian tail by exact law),
    targeting p^-p/(1-p) as n grows."""
    method = _resolve_method(method, params.p)
    seed = params.seed if seed is None else seed
    num, den = estimate_pair(sharpness_sup_sampler(params), n_samples, method,
                             seed, threads)
    return ratio_from_estimates(num, den)


def monotone_ratio_experiment(p: float, n: int, n_samples: int = 10**6,
                              method: EstimatorMethod | None = None,
                              seed: int = 0, threads: int = 1) -> RatioEstimate:
    """Moment ratio of the monotone pair (no tail), targeting p^-p."""
    params = ExtremalParams(p=p, n=n, seed=seed)
    method = _resolve_method(method, p)
    num, den = estimate_pair(monotone_sup_sampler(params), n_samples, method,
                             seed, threads)
    return ratio_from_estimates(num, den)


def discrete_ratio_experiment(params: ExtremalParams, level_N: int,
                              n_samples: int = 10**6,
                              method: EstimatorMethod | None = None,
                              seed: int | None = None,
                              threads: int = 1) -> RatioEstimate:
    """Moment ratio of the dyadic discretization; shares the draw layout of
    ratio_experiment so the discretization effect isolates cleanly."""
    method = _resolve_method(method, params.p)
    seed = params.seed if seed is None else seed
    num, den = estimate_pair(discrete_sup_sampler(params, level_N), n_samples,
                             method, seed, threads)
    return ratio_from_estimates(num, den)
