"""Monte Carlo estimates of the walk maximum, used as a model-free check.

Each path runs ``horizon`` steps of ``N(-beta, 1)`` increments and records
``max(0, S_1, ..., S_horizon)``. Paths are split into fixed chunks of
:data:`CHUNK_PATHS`; chunk ``i`` draws from its own PCG64 stream seeded by
``SeedSequence(seed, spawn_key=(i,))`` and normals come from numpy's ziggurat
sampler (``Generator.standard_normal``). Chunk results are combined in chunk
order, so the estimate is the same for any number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, HorizonTooSmall
from .gauss_walk import Drift

__all__ = ["McConfig", "McEstimate", "simulate_max", "auto_horizon", "truncation_bound",
           "CHUNK_PATHS", "HORIZON_CONSTANT", "TRUNCATION_TARGET"]

CHUNK_PATHS = 8192
# steps simulated per block inside a chunk; keeps memory flat for long horizons
_BLOCK_ELEMENTS = 1 << 21
HORIZON_CONSTANT = 60.0
#: absolute accuracy the horizon must support; the truncation bound must sit
#: four orders of magnitude below it
TRUNCATION_TARGET = 1e-6


@dataclass(frozen=True)
class McConfig:
    drift: Drift
    paths: int
    seed: int = 0
    horizon: Union[int, str] = "auto"
    workers: int = 1

    def __post_init__(self):
        if not isinstance(self.drift, Drift):
            object.__setattr__(self, "drift", Drift(self.drift))
        if isinstance(self.paths, bool) or not isinstance(self.paths, (int, np.integer)) \
                or self.paths < 1:
            raise DomainError("paths must be a positive integer")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) \
                or not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        if self.horizon != "auto":
            h = self.horizon
            if isinstance(h, bool) or not isinstance(h, (int, np.integer)) or h < 1:
                raise DomainError("horizon must be a positive integer or 'auto'")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")


@dataclass(frozen=True)
class McEstimate:
    p_zero_hat: float
    mean_hat: float
    var_hat: float
    se_mean: float
    se_var: float
    se_pzero: float
    horizon_used: int
    truncation_note: str
    paths: int


def truncation_bound(beta: float, horizon: int) -> float:
    """Upper bound on ``sum_{n > horizon} P(S_n > 0)``.

    This bounds the probability that the walk is ever positive after the
    horizon, hence the chance that a later step could raise the maximum.
    ``P(S_n > 0) = Q(beta sqrt n) <= exp(-beta^2 n/2) / (beta sqrt(2 pi n))``,
    and the sum of that envelope is geometric.
    """
    n1 = horizon + 1
    x = 0.5 * beta * beta
    return math.exp(-x * n1) / (beta * math.sqrt(2.0 * math.pi * n1) * -math.expm1(-x))


def auto_horizon(beta: float) -> int:
    """``ceil(60 / beta^2)``, checked against :data:`TRUNCATION_TARGET`."""
    n = math.ceil(HORIZON_CONSTANT / (beta * beta))
    bound = truncation_bound(beta, n)
    if bound > 1e-4 * TRUNCATION_TARGET:
        raise HorizonTooSmall(f"horizon {n} at beta={beta} leaves truncation bound "
                              f"{bound:.3g} above {1e-4 * TRUNCATION_TARGET:.3g}")
    return n


def _chunk_maxima(beta: float, horizon: int, seed: int, index: int, size: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))
    level = np.zeros(size)
    best = np.zeros(size)
    step = max(1, _BLOCK_ELEMENTS // size)
    done = 0
    while done < horizon:
        width = min(step, horizon - done)
        walk = rng.standard_normal((size, width))
        walk -= beta
        np.cumsum(walk, axis=1, out=walk)
        walk += level[:, None]
        np.maximum(best, walk.max(axis=1), out=best)
        level = walk[:, -1].copy()
        done += width
    return best


def simulate_max(cfg: McConfig) -> McEstimate:
    """Simulate ``cfg.paths`` walks and estimate ``P(M=0)``, ``E M`` and ``Var M``."""
    beta = float(cfg.drift.beta)
    if cfg.horizon == "auto":
        horizon = auto_horizon(beta)
    else:
        horizon = int(cfg.horizon)
    bound = truncation_bound(beta, horizon)
    note = f"P(S_n > 0 for some n > {horizon}) <= {bound:.3e}"

    sizes = [CHUNK_PATHS] * (cfg.paths // CHUNK_PATHS)
    if cfg.paths % CHUNK_PATHS:
        sizes.append(cfg.paths % CHUNK_PATHS)
    jobs = [(beta, horizon, int(cfg.seed), i, size) for i, size in enumerate(sizes)]
    if cfg.workers == 1:
        chunks = [_chunk_maxima(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(lambda job: _chunk_maxima(*job), jobs))
    m = np.concatenate(chunks)

    n = m.size
    mean = math.fsum(m) / n
    centred = m - mean
    c2 = centred * centred
    mu2 = math.fsum(c2) / n
    mu4 = math.fsum(c2 * c2) / n
    var = mu2 * n / (n - 1) if n > 1 else 0.0
    p0 = np.count_nonzero(m == 0.0) / n
    return McEstimate(
        p_zero_hat=p0,
        mean_hat=mean,
        var_hat=var,
        se_mean=math.sqrt(var / n),
        se_var=math.sqrt(max(mu4 - mu2 * mu2, 0.0) / n),
        se_pzero=math.sqrt(p0 * (1.0 - p0) / n),
        horizon_used=horizon,
        truncation_note=note,
        paths=n,
    )
