"""Pointwise cdf inequalities between the derived families.

Each claim is checked as ``smaller(x) <= larger(x)`` where ``smaller`` and
``larger`` are cdfs, on x-points taken as base quantiles so that heavy tails
are covered. A claim holds when ``max(smaller - larger)`` does not exceed a
rounding tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import BaseDistribution
from .transforms import TailTransform, cdf_sf_from_xi

__all__ = ["CLAIMS", "OrderingCheck", "check_ordering", "ordering_report", "worst_by_claim"]

TOL = 1e-12

CLAIMS = {
    "i": "F <= U_1",
    "ii": "V_k <= V_{k+1} for H, F, R, T",
    "iii": "F <= U_k <= U_{k+1}",
    "iv": "F <= H_k <= R_k",
    "v": "F <= F_k and F**r <= T_k",
    "vi": "T_k <= R_k",
    "vii": "F_k <= U_k",
}


@dataclass(frozen=True)
class OrderingCheck:
    claim_id: str
    base: str
    k: int
    r: int
    grid: np.ndarray
    max_violation: float
    pairs: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.max_violation <= TOL


def _grid(n: int) -> np.ndarray:
    if n < 2:
        raise ValueError("grid_size must be >= 2")
    return np.linspace(1e-4, 1.0 - 1e-4, n)


def _pairs(claim: str, k: int, r: int):
    """``(label, smaller, larger)`` with both sides functions of xi."""

    def V(fam, kk, rr=1):
        t = TailTransform(fam, kk, rr)
        return lambda xi: cdf_sf_from_xi(t, xi)[0]

    def F(xi):
        return np.exp(-xi)

    if claim == "i":
        return [("F<=U1", F, V("uk", 1))]
    if claim == "ii":
        return [
            (f"{f}{k}<={f}{k + 1}", V(f, k, r if f == "tk" else 1), V(f, k + 1, r if f == "tk" else 1))
            for f in ("hk", "fk", "rk", "tk")
        ]
    if claim == "iii":
        return [("F<=U", F, V("uk", k)), (f"U{k}<=U{k + 1}", V("uk", k), V("uk", k + 1))]
    if claim == "iv":
        return [("F<=H", F, V("hk", k)), ("H<=R", V("hk", k), V("rk", k))]
    if claim == "v":
        return [("F<=Fk", F, V("fk", k)), ("F^r<=Tk", lambda xi: np.exp(-r * xi), V("tk", k, r))]
    if claim == "vi":
        return [("T<=R", V("tk", k, r), V("rk", k))]
    if claim == "vii":
        return [("Fk<=Uk", V("fk", k), V("uk", k))]
    raise ValueError(f"unknown claim {claim!r}; choose from {', '.join(CLAIMS)}")


def check_ordering(
    claim_id: str, base: BaseDistribution, k: int, r: int = 1, grid_size: int = 1000
) -> OrderingCheck:
    """Evaluate one claim on a quantile grid ``p in [1e-4, 1 - 1e-4]``."""
    pairs = _pairs(claim_id, k, r)
    p = _grid(grid_size)
    x = np.asarray(base.quantile(p), dtype=float)
    xi = np.asarray(base.neglogcdf(x), dtype=float)
    worst = -np.inf
    for _, lo, hi in pairs:
        worst = max(worst, float(np.max(np.asarray(lo(xi)) - np.asarray(hi(xi)))))
    return OrderingCheck(claim_id, base.name, k, r, p, worst, tuple(lab for lab, _, _ in pairs))


def ordering_report(
    base: BaseDistribution, k_max: int = 4, r_max: int = 3, grid_size: int = 1000
) -> list[OrderingCheck]:
    """All claims for ``k = 1..k_max`` and ``r = 1..r_max``."""
    out = []
    for claim in CLAIMS:
        for k in range(1, k_max + 1):
            for r in range(1, r_max + 1):
                out.append(check_ordering(claim, base, k, r, grid_size))
    return out


def worst_by_claim(report: list[OrderingCheck]) -> dict[str, float]:
    """Largest violation seen for each claim."""
    worst: dict[str, float] = {}
    for c in report:
        worst[c.claim_id] = max(worst.get(c.claim_id, -np.inf), c.max_violation)
    return worst
