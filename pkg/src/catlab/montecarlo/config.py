from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Optional

import numpy as np

from ..config import check_degree, check_rate
from ..errors import DomainError


class ModelKind(str, Enum):
    NO_DISPERSION = "no_dispersion"
    TREE = "tree"
    FREE = "free"
    FREE_GEOMETRIC = "geom"
    FREE_BINOMIAL = "binom"


# integer codes understood by the compiled kernels
KIND_CODES = {
    ModelKind.NO_DISPERSION: 0,
    ModelKind.TREE: 1,
    ModelKind.FREE: 2,
    ModelKind.FREE_GEOMETRIC: 3,
    ModelKind.FREE_BINOMIAL: 4,
}


@dataclass(frozen=True)
class Model:
    """Which growth model to simulate, with its extra parameter if any."""

    kind: ModelKind
    d: Optional[int] = None
    p: Optional[float] = None

    def __post_init__(self) -> None:
        kind = ModelKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is ModelKind.TREE:
            object.__setattr__(self, "d", check_degree(self.d if self.d is not None else 0))
        elif self.d is not None:
            raise DomainError(f"d only applies to the tree model, got d={self.d}")
        if kind in (ModelKind.FREE_GEOMETRIC, ModelKind.FREE_BINOMIAL):
            if self.p is None or not 0.0 < float(self.p) < 1.0:
                raise DomainError(f"{kind.value} model needs p in (0, 1), got {self.p!r}")
            object.__setattr__(self, "p", float(self.p))
        elif self.p is not None:
            raise DomainError(f"p only applies to geometric/binomial catastrophes, got p={self.p}")

    @classmethod
    def no_dispersion(cls) -> "Model":
        return cls(ModelKind.NO_DISPERSION)

    @classmethod
    def tree(cls, d: int) -> "Model":
        return cls(ModelKind.TREE, d=d)

    @classmethod
    def free(cls) -> "Model":
        return cls(ModelKind.FREE)

    @classmethod
    def geometric(cls, p: float) -> "Model":
        return cls(ModelKind.FREE_GEOMETRIC, p=p)

    @classmethod
    def binomial(cls, p: float) -> "Model":
        return cls(ModelKind.FREE_BINOMIAL, p=p)

    def label(self) -> str:
        if self.kind is ModelKind.TREE:
            return f"tree(d={self.d})"
        if self.p is not None:
            return f"{self.kind.value}(p={self.p})"
        return self.kind.value


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo run description.

    ``colony_cap`` bounds the colony count (the population size for the
    no-dispersion model); replicates exceeding it are counted as survived.
    ``leap_threshold`` is the colony count above which catastrophes are
    processed in aggregated batches (0 disables batching).  ``individual``
    switches the survivor draw from the tabulated law to explicit
    growth-then-catastrophe sampling.  ``threads=None`` defers to the
    ``CATLAB_THREADS`` environment variable.
    """

    model: Model
    lam: float
    seed: int = 0
    replicates: int = 1000
    horizon: float = 1e3
    colony_cap: int = 100_000
    individual: bool = False
    leap_threshold: int = 1000
    threads: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "lam", check_rate(self.lam))
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if int(self.replicates) < 1:
            raise DomainError(f"replicates must be >= 1, got {self.replicates!r}")
        if not self.horizon > 0:
            raise DomainError(f"horizon must be > 0, got {self.horizon!r}")
        if int(self.colony_cap) < 1:
            raise DomainError(f"colony_cap must be >= 1, got {self.colony_cap!r}")
        if int(self.leap_threshold) < 0:
            raise DomainError("leap_threshold must be >= 0")
        if self.threads is not None and int(self.threads) < 0:
            raise DomainError("threads must be >= 0")


@dataclass
class SimSummary:
    """Aggregate of a Monte Carlo run.

    ``survived_count`` = ``censored_count`` (alive at the horizon) +
    ``cap_count`` (colony count exceeded the cap).  Mean and standard error
    of the extinction time are over extinct replicates only and are ``None``
    when fewer than one (respectively two) replicates went extinct.
    """

    replicates: int
    extinct_count: int
    survived_count: int
    censored_count: int
    cap_count: int
    extinction_times: np.ndarray = field(repr=False)
    mean_extinction_time: Optional[float]
    se_extinction_time: Optional[float]
    extinction_frequency: float
    ci_halfwidth_95: float
    ci_degenerate: bool

    @classmethod
    def from_outcomes(cls, status: np.ndarray, times: np.ndarray) -> "SimSummary":
        replicates = int(status.size)
        extinct = status == 0
        ext_times = times[extinct].copy()
        n_ext = int(extinct.sum())
        mean = float(ext_times.mean()) if n_ext else None
        se = float(ext_times.std(ddof=1) / math.sqrt(n_ext)) if n_ext >= 2 else None
        freq = n_ext / replicates
        half = 1.96 * math.sqrt(freq * (1.0 - freq) / replicates)
        return cls(
            replicates=replicates,
            extinct_count=n_ext,
            survived_count=replicates - n_ext,
            censored_count=int((status == 1).sum()),
            cap_count=int((status == 2).sum()),
            extinction_times=ext_times,
            mean_extinction_time=mean,
            se_extinction_time=se,
            extinction_frequency=freq,
            ci_halfwidth_95=half,
            ci_degenerate=replicates < 2 or n_ext in (0, replicates),
        )

    def to_dict(self, include_times: bool = False) -> dict[str, Any]:
        out = asdict(self)
        times = out.pop("extinction_times")
        if include_times:
            out["extinction_times"] = [float(t) for t in times]
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimSummary):
            return NotImplemented
        a, b = self.to_dict(), other.to_dict()
        return a == b and np.array_equal(self.extinction_times, other.extinction_times)
