"""Monte Carlo for k-th upper order statistics under random sample sizes.

The k largest of ``N`` uniforms are generated top-down,

    U_(N) = V_1 ** (1/N),   U_(N-j) = U_(N-j+1) * V_{j+1} ** (1/(N-j)),

so one draw costs O(k) however large ``N`` is. Everything runs in
``log U`` and the survival scale ``1 - U`` is handed to the base's ``isf``.

Replicates are split into fixed-size blocks; block ``b`` at sample-size index
``n`` always uses the stream ``(seed, n, b)``. Results therefore do not depend
on how many workers process the blocks.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .distributions import BaseDistribution
from .laws import MaxStableLaw, limit_kth_cdf
from .norming import base_norming
from .transforms import TauSpec, limit_law_cdf

__all__ = [
    "BLOCK",
    "ConvergenceRow",
    "DiscreteUniform",
    "Fixed",
    "RngState",
    "SampleSizeLaw",
    "ShiftedBinomial",
    "ShiftedGeometric",
    "ShiftedLogarithmic",
    "ShiftedNegBinomial",
    "ShiftedPoisson",
    "SIZE_LAWS",
    "TauMixture",
    "convergence_study",
    "coupled_law",
    "kth_upper_order_stat",
    "ks_distance",
    "predicted_limit",
    "sample_size",
]

BLOCK = 1 << 14


@dataclass(frozen=True)
class RngState:
    """A reproducible stream: identical ``(seed, stream)`` gives identical draws."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))


def _gen(rng) -> np.random.Generator:
    if isinstance(rng, RngState):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


# ---------------------------------------------------------------------------
# Sample-size laws
# ---------------------------------------------------------------------------


class SampleSizeLaw:
    """Law of the random sample size ``N``; ``minimum`` is the smallest atom."""

    minimum: int = 1

    def draw(self, gen: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError


def _int(name: str, v, lo: int) -> int:
    if not (isinstance(v, (int, np.integer)) and v >= lo):
        raise ValueError(f"{name} must be an integer >= {lo}, got {v!r}")
    return int(v)


def _prob(name: str, v, closed_right: bool = False) -> float:
    ok = 0 < v <= 1 if closed_right else 0 < v < 1
    if not ok:
        raise ValueError(f"{name} out of range: {v!r}")
    return float(v)


@dataclass(frozen=True)
class Fixed(SampleSizeLaw):
    n: int

    def __post_init__(self) -> None:
        _int("n", self.n, 1)

    @property
    def minimum(self) -> int:
        return self.n

    def draw(self, gen, size):
        return np.full(size, self.n, dtype=np.int64)


@dataclass(frozen=True)
class DiscreteUniform(SampleSizeLaw):
    """Uniform on ``m+1, ..., m+n``."""

    m: int
    n: int

    def __post_init__(self) -> None:
        _int("m", self.m, 0)
        _int("n", self.n, 1)

    @property
    def minimum(self) -> int:
        return self.m + 1

    def draw(self, gen, size):
        return self.m + gen.integers(1, self.n + 1, size=size, dtype=np.int64)


@dataclass(frozen=True)
class ShiftedBinomial(SampleSizeLaw):
    """``m + Binomial(n, p)``."""

    m: int
    n: int
    p: float

    def __post_init__(self) -> None:
        _int("m", self.m, 0)
        _int("n", self.n, 1)
        _prob("p", self.p, closed_right=True)

    @property
    def minimum(self) -> int:
        return self.m

    def draw(self, gen, size):
        return self.m + gen.binomial(self.n, self.p, size=size).astype(np.int64)


@dataclass(frozen=True)
class ShiftedPoisson(SampleSizeLaw):
    """``m + Poisson(lam)``."""

    m: int
    lam: float

    def __post_init__(self) -> None:
        _int("m", self.m, 0)
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"lam must be positive, got {self.lam!r}")

    @property
    def minimum(self) -> int:
        return self.m

    def draw(self, gen, size):
        return self.m + gen.poisson(self.lam, size=size).astype(np.int64)


@dataclass(frozen=True)
class ShiftedLogarithmic(SampleSizeLaw):
    """``n + L`` with ``P(L = j) = theta**j / (-j log(1 - theta))``, ``j >= 1``."""

    n: int
    theta: float

    def __post_init__(self) -> None:
        _int("n", self.n, 0)
        _prob("theta", self.theta)

    @property
    def minimum(self) -> int:
        return self.n + 1

    def draw(self, gen, size):
        return self.n + gen.logseries(self.theta, size=size).astype(np.int64)


@dataclass(frozen=True)
class ShiftedGeometric(SampleSizeLaw):
    """``P(N = m + j) = p q**j``, ``j >= 0``."""

    m: int
    p: float

    def __post_init__(self) -> None:
        _int("m", self.m, 0)
        _prob("p", self.p, closed_right=True)

    @property
    def minimum(self) -> int:
        return self.m

    def draw(self, gen, size):
        return self.m - 1 + gen.geometric(self.p, size=size).astype(np.int64)


@dataclass(frozen=True)
class ShiftedNegBinomial(SampleSizeLaw):
    """``m`` plus the number of failures before the ``r``-th success."""

    m: int
    r: int
    p: float

    def __post_init__(self) -> None:
        _int("m", self.m, 0)
        _int("r", self.r, 1)
        _prob("p", self.p, closed_right=True)

    @property
    def minimum(self) -> int:
        return self.m

    def draw(self, gen, size):
        return self.m + gen.negative_binomial(self.r, self.p, size=size).astype(np.int64)


@dataclass(frozen=True)
class TauMixture(SampleSizeLaw):
    """``round(tau * n)`` with ``tau`` drawn from a finite-support law."""

    n: int
    tau: TauSpec

    def __post_init__(self) -> None:
        _int("n", self.n, 1)

    @property
    def sizes(self) -> np.ndarray:
        return np.maximum(np.rint(np.asarray(self.tau.values) * self.n), 1).astype(np.int64)

    @property
    def minimum(self) -> int:
        return int(self.sizes.min())

    def draw(self, gen, size):
        idx = gen.choice(len(self.tau.values), size=size, p=np.asarray(self.tau.probs))
        return self.sizes[idx]


SIZE_LAWS = (
    "fixed",
    "uniform",
    "binomial",
    "poisson",
    "logarithmic",
    "geometric",
    "negbinomial",
    "tau",
)


def coupled_law(
    name: str, n: int, m: int = 1, r: int = 1, tau: TauSpec | None = None
) -> SampleSizeLaw:
    """The sample-size law ``name`` at index ``n`` with its standard coupling.

    geometric and negbinomial use ``p = 1/n``; poisson ``lam = n``; binomial
    ``p = 1 - n**-0.5`` over ``n`` trials; logarithmic ``theta = 1 - 1/n``.
    """
    n = _int("n", n, 2)
    if name == "fixed":
        return Fixed(n)
    if name == "uniform":
        return DiscreteUniform(m, n)
    if name == "binomial":
        return ShiftedBinomial(m, n, 1.0 - n**-0.5)
    if name == "poisson":
        return ShiftedPoisson(m, float(n))
    if name == "logarithmic":
        return ShiftedLogarithmic(n, 1.0 - 1.0 / n)
    if name == "geometric":
        return ShiftedGeometric(m, 1.0 / n)
    if name == "negbinomial":
        return ShiftedNegBinomial(m, r, 1.0 / n)
    if name == "tau":
        return TauMixture(n, tau if tau is not None else TauSpec.degenerate())
    raise ValueError(f"unknown sample-size law {name!r}; choose from {', '.join(SIZE_LAWS)}")


def sample_size(law: SampleSizeLaw, rng, size: int | None = None):
    """One draw of ``N`` (or ``size`` draws as an array)."""
    out = law.draw(_gen(rng), 1 if size is None else size)
    return int(out[0]) if size is None else out


# ---------------------------------------------------------------------------
# Order statistics
# ---------------------------------------------------------------------------


def _top_k_survival(N: np.ndarray, k: int, gen: np.random.Generator) -> np.ndarray:
    """``1 - U_(N-k+1)`` for each entry of ``N``."""
    N = np.asarray(N, dtype=np.float64)
    E = gen.standard_exponential((k, N.size))
    log_u = np.zeros(N.size)
    for j in range(k):
        log_u -= E[j] / (N - j)
    q = -np.expm1(log_u)
    return np.clip(q, np.finfo(float).tiny, np.nextafter(1.0, 0.0))


def kth_upper_order_stat(base: BaseDistribution, N, k: int, rng, size: int | None = None):
    """Draw ``X_{N-k+1:N}`` for ``N`` iid draws from ``base``.

    ``N`` may be a scalar or an array of sample sizes (one draw per entry);
    ``size`` repeats a scalar ``N``.
    """
    k = _int("k", k, 1)
    arr = np.atleast_1d(np.asarray(N, dtype=np.int64))
    if size is not None:
        arr = np.broadcast_to(arr, (size,)) if arr.size == 1 else arr
    if np.any(arr < k):
        raise ValueError(f"k={k} exceeds the sample size")
    x = np.asarray(base.isf(_top_k_survival(arr, k, _gen(rng))), dtype=float)
    return float(x[0]) if (np.ndim(N) == 0 and size is None) else x


# ---------------------------------------------------------------------------
# Limits and distances
# ---------------------------------------------------------------------------


def predicted_limit(
    law: SampleSizeLaw, G: MaxStableLaw, k: int, tau: TauSpec | None = None
) -> Callable:
    """cdf of the limit of the normalized k-th upper order statistic under ``law``."""
    if isinstance(law, (Fixed, ShiftedBinomial, ShiftedPoisson, ShiftedLogarithmic)):
        return lambda x: limit_kth_cdf(G, k, x)
    if isinstance(law, DiscreteUniform):
        return lambda x: limit_law_cdf("jk", G, k, x)
    if isinstance(law, ShiftedGeometric):
        return lambda x: limit_law_cdf("lk", G, k, x)
    if isinstance(law, ShiftedNegBinomial):
        return lambda x: limit_law_cdf("sk", G, k, x, r=law.r)
    if isinstance(law, TauMixture):
        return lambda x: limit_law_cdf("bn", G, k, x, tau=tau or law.tau)
    raise ValueError(f"no limit law known for {law!r}")


def ks_distance(sample, cdf: Callable) -> float:
    """Exact ``sup |F_M - cdf|`` for the empirical df of ``sample``."""
    x = np.sort(np.asarray(sample, dtype=float))
    M = x.size
    if M == 0:
        raise ValueError("ks_distance needs a nonempty sample")
    c = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, M + 1)
    return float(max(np.max(i / M - c), np.max(c - (i - 1) / M)))


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    M: int
    ks: float
    seed: int
    wall_time: float


def _block(base, law, k, seed, n, b, size, a_n, b_n):
    gen = RngState(seed, (n << 24) | b).generator()
    N = law.draw(gen, size)
    x = np.asarray(base.isf(_top_k_survival(N, k, gen)), dtype=float)
    return (x - b_n) / a_n


def convergence_study(
    base: BaseDistribution,
    size_law: str | Callable[[int], SampleSizeLaw],
    k: int,
    n_grid: Sequence[int],
    M: int,
    seed: int,
    workers: int = 1,
    tau: TauSpec | None = None,
    norming: Callable[[int], tuple[float, float]] | None = None,
    **law_kw,
) -> list[ConvergenceRow]:
    """KS distance between normalized simulated order statistics and their limit.

    ``size_law`` is a name accepted by :func:`coupled_law` (extra keywords
    ``m``, ``r`` are passed on; ``m`` defaults to ``k``) or any
    ``n -> SampleSizeLaw`` callable.
    """
    k = _int("k", k, 1)
    M = _int("M", M, 1000)
    workers = _int("workers", workers, 1)
    if base.mda is None:
        raise ValueError(f"{base!r} has no known domain of attraction")
    if isinstance(size_law, str):
        name = size_law
        if name in ("uniform", "binomial", "poisson", "geometric", "negbinomial"):
            law_kw.setdefault("m", k)

        def make(n):
            return coupled_law(name, n, tau=tau, **law_kw)
    else:
        make = size_law
    norm = norming or (lambda n: base_norming(base, n))
    rows = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for n in n_grid:
            t0 = time.perf_counter()
            law = make(n)
            if law.minimum < k:
                raise ValueError(f"sample size can be {law.minimum} < k={k}")
            a_n, b_n = norm(n)
            sizes = [min(BLOCK, M - s) for s in range(0, M, BLOCK)]
            jobs = [
                pool.submit(_block, base, law, k, seed, n, b, sz, a_n, b_n)
                for b, sz in enumerate(sizes)
            ]
            sample = np.concatenate([j.result() for j in jobs])
            ks = ks_distance(sample, predicted_limit(law, base.mda, k, tau))
            rows.append(ConvergenceRow(int(n), M, ks, int(seed), time.perf_counter() - t0))
    return rows
