"""Seeded Monte Carlo drivers for the three growth models and the comparison models."""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from ..errors import DomainError
from . import kernels
from .config import KIND_CODES, Model, ModelKind, SimConfig, SimSummary
from .tables import offspring_table, survivor_table

logger = logging.getLogger(__name__)

THREADS_ENV = "CATLAB_THREADS"


def stream(seed: int, index: int) -> np.random.Generator:
    """The random stream of replicate ``index`` under ``seed``.

    Philox is counter based; keying it with ``(index, seed)`` gives every
    replicate its own stream regardless of which thread runs it or when.
    """
    if not 0 <= seed < 2 ** 64 or index < 0:
        raise DomainError("seed must be a 64-bit unsigned integer and index >= 0")
    return np.random.Generator(np.random.Philox(key=(int(index) << 64) | int(seed)))


def resolve_threads(threads: Optional[int]) -> int:
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            threads = int(raw)
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if threads < 0:
        raise DomainError("thread count must be >= 0")
    return threads or (os.cpu_count() or 1)


def _runner(cfg: SimConfig):
    """Return ``run(generator) -> (status, time)`` for the configured model."""
    model = cfg.model
    lam, horizon, cap = cfg.lam, float(cfg.horizon), int(cfg.colony_cap)
    if model.kind is ModelKind.NO_DISPERSION:
        return lambda g: kernels.run_no_dispersion(g, lam, horizon, cap)

    kind = KIND_CODES[model.kind]
    d = model.d or 0
    p = model.p or 0.0
    if model.kind in (ModelKind.FREE, ModelKind.TREE):
        cum = np.cumsum(survivor_table(lam))
    else:
        cum = np.ones(1)
    leap_pmf = offspring_table(model, lam) if cfg.leap_threshold > 0 else np.ones(1)
    leap, individual = int(cfg.leap_threshold), bool(cfg.individual)
    return lambda g: kernels.run_branching(g, kind, lam, d, p, cum, leap_pmf,
                                           horizon, cap, leap, individual)


def run_replicates(cfg: SimConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-replicate outcome codes and end times, in replicate order."""
    run = _runner(cfg)
    n = int(cfg.replicates)
    status = np.empty(n, dtype=np.int8)
    times = np.empty(n)

    def work(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            status[i], times[i] = run(stream(cfg.seed, i))

    threads = min(resolve_threads(cfg.threads), n)
    if threads <= 1:
        work(0, n)
    else:
        bounds = np.linspace(0, n, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for fut in [pool.submit(work, lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]:
                fut.result()
    return status, times


def _require(cfg: SimConfig, *kinds: ModelKind) -> None:
    if cfg.model.kind not in kinds:
        raise DomainError(f"model {cfg.model.label()} not handled here; expected {[k.value for k in kinds]}")


def simulate_no_dispersion(cfg: SimConfig) -> SimSummary:
    """Single colony, survivors stay together; births at rate lam, catastrophes at rate 1."""
    _require(cfg, ModelKind.NO_DISPERSION)
    return SimSummary.from_outcomes(*run_replicates(cfg))


def simulate_tree(cfg: SimConfig) -> SimSummary:
    """Dispersal on the rooted d-ary tree, at most one new colony per child site."""
    _require(cfg, ModelKind.TREE)
    return SimSummary.from_outcomes(*run_replicates(cfg))


def simulate_free(cfg: SimConfig) -> SimSummary:
    """Unrestricted dispersal: each survivor founds a colony."""
    _require(cfg, ModelKind.FREE, ModelKind.FREE_GEOMETRIC, ModelKind.FREE_BINOMIAL)
    return SimSummary.from_outcomes(*run_replicates(cfg))


_DISPATCH = {
    ModelKind.NO_DISPERSION: simulate_no_dispersion,
    ModelKind.TREE: simulate_tree,
    ModelKind.FREE: simulate_free,
    ModelKind.FREE_GEOMETRIC: simulate_free,
    ModelKind.FREE_BINOMIAL: simulate_free,
}


def estimate(cfg: SimConfig) -> SimSummary:
    """Run ``cfg`` and return its summary with confidence information attached."""
    summary = _DISPATCH[cfg.model.kind](cfg)
    logger.info("%s lam=%g seed=%d: %d/%d extinct (censored %d, capped %d)",
                cfg.model.label(), cfg.lam, cfg.seed, summary.extinct_count,
                summary.replicates, summary.censored_count, summary.cap_count)
    return summary


# -- direct samplers used by the consistency checks ---------------------------

def sample_survivors(lam: float, n: int, seed: int, individual: bool = False) -> np.ndarray:
    """``n`` survivor counts, from the tabulated law or by explicit growth."""
    cum = np.cumsum(survivor_table(lam))
    return kernels.sample_survivors_many(stream(seed, 0), int(n), float(lam), cum, bool(individual))


def sample_offspring(model: Model, lam: float, n: int, seed: int, individual: bool = False) -> np.ndarray:
    """``n`` per-catastrophe colony offspring counts drawn event by event."""
    if model.kind is ModelKind.NO_DISPERSION:
        raise DomainError("the no-dispersion model has no colony offspring")
    cum = np.cumsum(survivor_table(lam)) if model.kind in (ModelKind.FREE, ModelKind.TREE) else np.ones(1)
    return kernels.sample_offspring_many(stream(seed, 0), int(n), KIND_CODES[model.kind], float(lam),
                                         model.d or 0, model.p or 0.0, cum, bool(individual))


def sample_aggregate(model: Model, lam: float, m: int, n: int, seed: int) -> np.ndarray:
    """``n`` draws of the summed offspring of ``m`` catastrophes, as taken in batched steps."""
    pmf = offspring_table(model, lam)
    return kernels.sample_aggregate_many(stream(seed, 0), int(n), int(m), pmf)


def sample_jumps(lam: float, state: int, n: int, seed: int) -> np.ndarray:
    """``n`` independent one-step moves of the no-dispersion jump chain from ``state``."""
    if state < 1:
        raise DomainError("jump chain state must be >= 1")
    return kernels.sample_jumps_many(stream(seed, 0), int(n), int(state), float(lam))
