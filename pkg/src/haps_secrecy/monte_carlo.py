"""Monte Carlo estimates of SOP and PPSC from the physical channel samplers.

Stream splitting: the sample range is cut into batches of ``batch_size``
(the last one possibly shorter). Batch ``i`` draws from
``default_rng(SeedSequence(seed).spawn(n_batches)[i])`` in the fixed order
FSO hop, main RF hop, eavesdropper RF hop. The estimate therefore depends only
on ``(seed, n_samples, batch_size)``, not on how batches are scheduled.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .channels import sample_gg, sample_sr
from .secrecy import SecrecySystem

MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class MCConfig:
    n_samples: int = 1_000_000
    seed: int = 20240601
    batch_size: int = 1_000_000
    definition: Literal["exact", "approximate"] = "approximate"

    def __post_init__(self):
        if self.n_samples < MIN_SAMPLES:
            raise ValueError(f"n_samples must be >= {MIN_SAMPLES}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.definition not in ("exact", "approximate"):
            raise ValueError("definition must be 'exact' or 'approximate'")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def batch_sizes(self) -> list[int]:
        full, rest = divmod(self.n_samples, self.batch_size)
        return [self.batch_size] * full + ([rest] if rest else [])


@dataclass(frozen=True)
class MCEstimate:
    value: float
    std_error: float
    n: int
    seed: int

    @classmethod
    def from_count(cls, count: int, n: int, seed: int) -> "MCEstimate":
        p = count / n
        return cls(p, math.sqrt(p * (1.0 - p) / n), n, seed)


def draw_snrs(sys: SecrecySystem, rng: np.random.Generator, n: int):
    """One batch of ``(gamma_0, gamma_E)``."""
    g_sr = sample_gg(sys.fso, rng, n)
    g_rd = sample_sr(sys.main_rf, rng, n)
    g_re = sample_sr(sys.eve_rf, rng, n)
    return np.minimum(g_sr, g_rd), g_re


def _outage_count(g0, ge, gamma_th: float, definition: str) -> int:
    if definition == "exact":
        # (1 + g0) < gth (1 + gE), arranged so gth == 1 reduces to g0 < gE exactly
        hit = g0 < gamma_th * ge + (gamma_th - 1.0)
    else:
        hit = g0 < gamma_th * ge
    return int(np.count_nonzero(hit))


def _run(sys: SecrecySystem, cfg: MCConfig, counter, workers: int) -> tuple[int, ...]:
    """Apply ``counter(g0, gE) -> tuple of counts`` to every batch and sum."""
    sizes = cfg.batch_sizes
    children = np.random.SeedSequence(cfg.seed).spawn(len(sizes))

    def one(i: int):
        g0, ge = draw_snrs(sys, np.random.default_rng(children[i]), sizes[i])
        return counter(g0, ge)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(one, range(len(sizes))))
    else:
        counts = [one(i) for i in range(len(sizes))]
    return tuple(int(sum(col)) for col in zip(*counts))


def sop_mc(sys: SecrecySystem, cfg: MCConfig, *, workers: int = 1) -> MCEstimate:
    """Fraction of draws with ``C_s < R_s``; ties count as non-outage."""
    gth = sys.gamma_th
    (count,) = _run(sys, cfg, lambda g0, ge: (_outage_count(g0, ge, gth, cfg.definition),), workers)
    return MCEstimate.from_count(count, cfg.n_samples, cfg.seed)


def ppsc_mc(sys: SecrecySystem, cfg: MCConfig, *, workers: int = 1) -> MCEstimate:
    """Fraction of draws with ``gamma_0 > gamma_E``."""
    (count,) = _run(sys, cfg, lambda g0, ge: (int(np.count_nonzero(g0 > ge)),), workers)
    return MCEstimate.from_count(count, cfg.n_samples, cfg.seed)


def secrecy_mc(
    sys: SecrecySystem, cfg: MCConfig, *, workers: int = 1
) -> tuple[MCEstimate, MCEstimate]:
    """SOP and PPSC counted on one shared sample stream."""
    gth = sys.gamma_th

    def both(g0, ge):
        return _outage_count(g0, ge, gth, cfg.definition), int(np.count_nonzero(g0 > ge))

    sop_count, ppsc_count = _run(sys, cfg, both, workers)
    n, seed = cfg.n_samples, cfg.seed
    return MCEstimate.from_count(sop_count, n, seed), MCEstimate.from_count(ppsc_count, n, seed)
