"""Max-stable laws, their stability normings and the k-th extreme limit G_k.

All evaluations work on the negative log-cdf ``-log G(x)`` computed from the
closed forms, so ``G`` close to one keeps full relative accuracy in the
``(-log G)**i`` terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "FRECHET",
    "GUMBEL",
    "WEIBULL",
    "MaxStableLaw",
    "StabilityNorming",
    "frechet",
    "gumbel",
    "limit_kth_cdf",
    "max_stable_cdf",
    "max_stable_quantile",
    "stability_norming",
    "weibull",
]

FRECHET = "frechet"
WEIBULL = "weibull"
GUMBEL = "gumbel"
_KINDS = (FRECHET, WEIBULL, GUMBEL)


@dataclass(frozen=True)
class MaxStableLaw:
    """One of the three extreme value types.

    ``alpha`` is the shape for Fréchet and Weibull and must be ``None`` for
    Gumbel.
    """

    kind: str
    alpha: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown max-stable kind {self.kind!r}")
        if self.kind == GUMBEL:
            if self.alpha is not None:
                raise ValueError("the Gumbel law takes no shape parameter")
        else:
            if self.alpha is None or not self.alpha > 0 or not math.isfinite(self.alpha):
                raise ValueError(f"{self.kind} law needs alpha > 0, got {self.alpha!r}")
            object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == FRECHET:
            return 0.0, math.inf
        if self.kind == WEIBULL:
            return -math.inf, 0.0
        return -math.inf, math.inf

    def neglogcdf(self, x):
        """``-log G(x)``; ``inf`` left of the support and 0 right of it."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if self.kind == FRECHET:
                out = np.where(x > 0, np.abs(x) ** -self.alpha, np.inf)
            elif self.kind == WEIBULL:
                out = np.where(x < 0, np.abs(x) ** self.alpha, 0.0)
            else:
                out = np.exp(-x)
        out = np.where(np.isnan(x), np.nan, out)
        return out[()] if out.ndim == 0 else out

    def cdf(self, x):
        return max_stable_cdf(self, x)

    def quantile(self, p):
        return max_stable_quantile(self, p)

    def scaled(self, k: int) -> MaxStableLaw:
        """The law with exponent ``k * alpha`` (Gumbel is unchanged)."""
        if self.kind == GUMBEL:
            return self
        return MaxStableLaw(self.kind, k * self.alpha)

    def __str__(self) -> str:
        if self.kind == GUMBEL:
            return "Gumbel"
        return f"{self.kind.capitalize()}({self.alpha:g})"


def frechet(alpha: float) -> MaxStableLaw:
    return MaxStableLaw(FRECHET, alpha)


def weibull(alpha: float) -> MaxStableLaw:
    return MaxStableLaw(WEIBULL, alpha)


def gumbel() -> MaxStableLaw:
    return MaxStableLaw(GUMBEL)


class StabilityNorming(NamedTuple):
    A: float
    B: float


def max_stable_cdf(law: MaxStableLaw, x):
    """Evaluate ``G(x)``, exactly 0 or 1 outside the support."""
    return np.exp(-law.neglogcdf(x))


def _closed_form_quantile(law: MaxStableLaw, p: float) -> float:
    e = -math.log(p)
    if law.kind == FRECHET:
        return e ** (-1.0 / law.alpha)
    if law.kind == WEIBULL:
        return -(e ** (1.0 / law.alpha))
    return -math.log(e)


def _bisect_quantile(law: MaxStableLaw, p: float, tol: float = 1e-14) -> float:
    """Quantile by bisection on the cdf, used to cross-check the closed form."""
    x0 = _closed_form_quantile(law, p)
    lo, hi = x0 - max(1.0, abs(x0)), x0 + max(1.0, abs(x0))
    lo_s, hi_s = law.support
    lo, hi = max(lo, lo_s), min(hi, hi_s)
    while max_stable_cdf(law, lo) > p:
        lo = lo - max(1.0, abs(lo)) if lo_s == -math.inf else 0.5 * (lo + lo_s)
    while max_stable_cdf(law, hi) < p:
        hi = hi + max(1.0, abs(hi))
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            break
        if max_stable_cdf(law, mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def max_stable_quantile(law: MaxStableLaw, p, method: str = "closed"):
    """Inverse of :func:`max_stable_cdf` for ``0 < p < 1``.

    ``method="bisect"`` solves the cdf numerically instead of using the
    closed-form inverse.
    """
    arr = np.asarray(p, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise ValueError("quantile needs 0 < p < 1")
    solve = _closed_form_quantile if method == "closed" else _bisect_quantile
    out = np.array([solve(law, float(v)) for v in arr.ravel()]).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def stability_norming(law: MaxStableLaw, n: int) -> StabilityNorming:
    """Constants with ``G**n(A*x + B) == G(x)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if law.kind == FRECHET:
        return StabilityNorming(n ** (1.0 / law.alpha), 0.0)
    if law.kind == WEIBULL:
        return StabilityNorming(n ** (-1.0 / law.alpha), 0.0)
    return StabilityNorming(1.0, math.log(n))


def limit_kth_cdf(law: MaxStableLaw, k: int, x):
    """Limit df of the normalized k-th upper order statistic for fixed n.

    ``G(x) * sum_{i<k} (-log G(x))**i / i!``, zero where ``G(x) == 0``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    xi = np.asarray(law.neglogcdf(x), dtype=float)
    finite = np.isfinite(xi)
    xs = np.where(finite, xi, 0.0)
    term = np.exp(-xs)
    total = term.copy()
    for i in range(1, k):
        term = term * xs / i
        total = total + term
    out = np.where(finite, total, 0.0)
    return out[()] if out.ndim == 0 else out
