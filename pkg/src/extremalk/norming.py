"""Norming constants for base distributions and for the derived families.

Two recipes are offered for a derived df ``V_k``:

* ``"quantile"`` (default) reads both constants off quantiles of ``V_k``
  itself, which works the same way for every family;
* ``"closed-form"`` uses the tail constant ``eta`` of the family and base
  quantiles, ``F^-(1 - (1 / (n eta))**(1/k))``, with ``v(b_n) / k`` as the
  Gumbel-domain scale.

Both lead to the same limit type; :func:`verify_norming` measures how close
``n (1 - V_k(a_n x + b_n))`` is to ``-log G(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .distributions import BaseDistribution, auxiliary_function
from .laws import FRECHET, GUMBEL, WEIBULL, MaxStableLaw
from .transforms import (
    TailTransform,
    tail_equivalence_constant,
    transform_isf,
    transform_sf,
)

__all__ = [
    "CLOSED_FORM",
    "QUANTILE",
    "EtaConstant",
    "NormingSequence",
    "base_norming",
    "eta_constant",
    "target_law",
    "transform_norming",
    "verify_norming",
]

CLOSED_FORM = "closed-form"
QUANTILE = "quantile"
_MODES = (CLOSED_FORM, QUANTILE)


class EtaConstant(NamedTuple):
    family: str
    value: float


def eta_constant(t: TailTransform) -> float:
    """Tail constant of ``t`` relative to ``(1 - F)**k``."""
    return tail_equivalence_constant(t)


def _mda(base: BaseDistribution) -> MaxStableLaw:
    if base.mda is None:
        raise ValueError(f"{base!r} has no known domain of attraction")
    return base.mda


def _check_n(n: int) -> int:
    if not (isinstance(n, (int, np.integer)) and n >= 2):
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    return int(n)


def base_norming(dist: BaseDistribution, n: int) -> tuple[float, float]:
    """Classical ``(a_n, b_n)`` for maxima of ``n`` draws from ``dist``."""
    n = _check_n(n)
    G = _mda(dist)
    u = float(dist.isf(1.0 / n))
    if G.kind == FRECHET:
        return u, 0.0
    if G.kind == WEIBULL:
        return dist.right - u, dist.right
    return auxiliary_function(dist, u), u


def _closed_form(t: TailTransform, base: BaseDistribution, n: int) -> tuple[float, float]:
    G = _mda(base)
    k = t.k
    if G.kind == GUMBEL:
        b = float(transform_isf(t, base, 1.0 / n))
        return auxiliary_function(base, b) / k, b
    q = (1.0 / (n * eta_constant(t))) ** (1.0 / k)
    if not q < 1:
        raise ValueError(f"n={n} too small for the closed-form norming of {t}")
    u = float(base.isf(q))
    if G.kind == FRECHET:
        return u, 0.0
    return base.right - u, base.right


def _quantile_based(t: TailTransform, base: BaseDistribution, n: int) -> tuple[float, float]:
    G = _mda(base)
    u = float(transform_isf(t, base, 1.0 / n))
    if G.kind == FRECHET:
        return u, 0.0
    if G.kind == WEIBULL:
        return base.right - u, base.right
    return float(transform_isf(t, base, 1.0 / (n * math.e))) - u, u


def transform_norming(
    t: TailTransform, base: BaseDistribution, n: int, mode: str = QUANTILE
) -> tuple[float, float]:
    """``(a_n, b_n)`` for the derived df ``t`` on ``base``."""
    n = _check_n(n)
    if mode == CLOSED_FORM:
        return _closed_form(t, base, n)
    if mode == QUANTILE:
        return _quantile_based(t, base, n)
    raise ValueError(f"unknown norming mode {mode!r}; choose from {', '.join(_MODES)}")


@dataclass(frozen=True)
class NormingSequence:
    """Lazily evaluated ``n -> (a_n, b_n)``.

    ``transform=None`` gives the classical norming of the base itself.
    """

    base: BaseDistribution
    transform: TailTransform | None = None
    source: str = QUANTILE

    def __post_init__(self) -> None:
        if self.source not in _MODES:
            raise ValueError(f"unknown norming mode {self.source!r}")

    def __call__(self, n: int) -> tuple[float, float]:
        if self.transform is None:
            return base_norming(self.base, n)
        return transform_norming(self.transform, self.base, n, self.source)

    def a(self, n: int) -> float:
        return self(n)[0]

    def b(self, n: int) -> float:
        return self(n)[1]


def target_law(t: TailTransform | None, base: BaseDistribution) -> MaxStableLaw:
    """Limit law of the maximum under ``V_k``: the base law with exponent ``k alpha``."""
    G = _mda(base)
    return G if t is None else G.scaled(t.k)


def verify_norming(
    t: TailTransform | None,
    base: BaseDistribution,
    norming: NormingSequence | None,
    n_grid: Iterable[int],
    x_grid: Iterable[float] | None = None,
) -> float:
    """Worst ``|n (1 - V(a_n x + b_n)) + log G(x)|`` over the grids.

    ``x_grid`` defaults to the 0.1, 0.5 and 0.9 quantiles of the target law.
    """
    G = target_law(t, base)
    if norming is None:
        norming = NormingSequence(base, t)
    xs = np.asarray(
        G.quantile([0.1, 0.5, 0.9]) if x_grid is None else list(x_grid), dtype=float
    )
    target = np.asarray(G.neglogcdf(xs), dtype=float)
    worst = 0.0
    for n in n_grid:
        a, b = norming(n)
        if not a > 0:
            raise ValueError(f"norming produced a_n={a!r} <= 0 at n={n}")
        pts = a * xs + b
        sf = base.sf(pts) if t is None else transform_sf(t, base, pts)
        dev = np.abs(n * np.asarray(sf, dtype=float) - target)
        worst = max(worst, float(np.max(dev)))
    return worst
