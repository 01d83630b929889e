"""Derived df families built from a base df F.

Every family depends on x only through ``xi = -log F(x)``:

==========  =============================================================
``hk``      ``1 - (1 - F)**k``
``fk``      ``F * sum_{i<k} xi**i / i!``
``uk``      ``k (1 - F) / xi - F * sum_{l=1}^{k-1} (k - l) xi**(l-1) / l!``
``rk``      ``1 - (xi / (1 + xi))**k``
``tk``      ``sum_{l<k} C(l+r-1, l) xi**l / (1 + xi)**(l+r)``
``bk``      ``sum_{i<k} xi**i / i! * E[tau**i F**tau]``
==========  =============================================================

Each family has a cdf and a survival function computed separately. Near the
right extremity the survival is summed as a positive series in ``xi``, so
``1 - V(x)`` keeps full relative precision even when it is far below machine
epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import BaseDistribution, _out
from .laws import MaxStableLaw

__all__ = [
    "DerivedDistribution",
    "FAMILIES",
    "LIMIT_FAMILIES",
    "TailTransform",
    "TauSpec",
    "burr_ode_residual",
    "empirical_tail_ratio",
    "limit_law_cdf",
    "recurrence_residual",
    "tail_equivalence_constant",
    "transform_cdf",
    "transform_isf",
    "transform_pdf",
    "transform_quantile",
    "transform_sf",
]

FAMILIES = ("hk", "fk", "uk", "rk", "tk", "bk")
#: limit family -> transform applied to the max-stable law
LIMIT_FAMILIES = {"gk": "fk", "jk": "uk", "lk": "rk", "sk": "tk", "bn": "bk"}
K_MAX = 20
R_MAX = 20

_MAX_TERMS = 4000
_REL = 1e-18


@dataclass(frozen=True)
class TauSpec:
    """Finite-support law of the limit of ``N_n / n``."""

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        v = tuple(float(a) for a in self.values)
        p = tuple(float(a) for a in self.probs)
        if not v or len(v) != len(p):
            raise ValueError("tau needs matching, nonempty values and probabilities")
        if any(not (a > 0 and math.isfinite(a)) for a in v):
            raise ValueError("tau values must be positive")
        if any(a < 0 for a in p) or abs(math.fsum(p) - 1.0) > 1e-12:
            raise ValueError("tau probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "probs", p)

    @classmethod
    def degenerate(cls, value: float = 1.0) -> TauSpec:
        return cls((value,), (1.0,))

    @classmethod
    def parse(cls, text: str) -> TauSpec:
        """Read ``"1:0.5,2:0.5"`` (value:probability pairs)."""
        pairs = [item.split(":") for item in text.split(",") if item.strip()]
        try:
            return cls(tuple(float(a) for a, _ in pairs), tuple(float(b) for _, b in pairs))
        except ValueError as exc:
            if "tau" in str(exc):
                raise
            raise ValueError(f"cannot parse tau spec {text!r}") from None

    def moment(self, i: int) -> float:
        return math.fsum(p * v**i for v, p in zip(self.values, self.probs))

    def __str__(self) -> str:
        return ",".join(f"{v:g}:{p:g}" for v, p in zip(self.values, self.probs))


@dataclass(frozen=True)
class TailTransform:
    """A member of one of the derived families, e.g. ``TailTransform("tk", 2, r=3)``."""

    family: str
    k: int
    r: int = 1
    tau: TauSpec | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if not (isinstance(self.k, (int, np.integer)) and 1 <= self.k <= K_MAX):
            raise ValueError(f"k must be an integer in 1..{K_MAX}, got {self.k!r}")
        if not (isinstance(self.r, (int, np.integer)) and 1 <= self.r <= R_MAX):
            raise ValueError(f"r must be an integer in 1..{R_MAX}, got {self.r!r}")
        if self.family == "bk":
            if self.tau is None:
                object.__setattr__(self, "tau", TauSpec.degenerate())
        elif self.tau is not None:
            raise ValueError("tau only applies to the bk family")
        if self.family != "tk" and self.r != 1:
            raise ValueError("r only applies to the tk family")

    def with_k(self, k: int) -> TailTransform:
        return TailTransform(self.family, k, self.r, self.tau)

    def apply(self, base: BaseDistribution) -> DerivedDistribution:
        return DerivedDistribution(self, base)

    def __str__(self) -> str:
        extra = f",r={self.r}" if self.family == "tk" else ""
        if self.family == "bk":
            extra = f",tau={self.tau}"
        return f"{self.family}(k={self.k}{extra})"


# ---------------------------------------------------------------------------
# Kernels on xi = -log F.  Inputs are float arrays with 0 < xi < inf.
# ---------------------------------------------------------------------------


def _poisson_head(xi, k):
    """``exp(-xi) * sum_{i<k} xi**i / i!``."""
    lx = np.log(xi)
    return sum(np.exp(i * lx - xi - math.lgamma(i + 1)) for i in range(k))


def _poisson_tail_series(xi, k):
    """``exp(-xi) * sum_{i>=k} xi**i / i!`` summed term by term (use for xi <= k)."""
    term = np.exp(k * np.log(xi) - xi - math.lgamma(k + 1))
    total = term.copy()
    i = k
    for _ in range(_MAX_TERMS):
        i += 1
        term = term * xi / i
        total += term
        if np.all(term <= _REL * total):
            break
    return total


def _poisson_split(xi, k):
    """Return ``(head, tail)`` of the Poisson(xi) distribution at ``k``.

    The head is a sum of positive terms and always accurate; the tail is
    summed separately wherever it is the smaller of the two.
    """
    head = _poisson_head(xi, k)
    tail = 1.0 - head
    small = head > 0.5
    if np.any(small):
        tail[small] = _poisson_tail_series(xi[small], k)
    return head, tail


def _fk(xi, k):
    return _poisson_split(xi, k)


def _uk(xi, k):
    cdf = np.empty_like(xi)
    sf = np.empty_like(xi)
    small = xi <= k + 1
    if np.any(small):
        x = xi[small]
        # 1 - U_k = exp(-xi) sum_{j>k} (j - k) xi**(j-1) / j!
        term = np.exp(k * np.log(x) - x - math.lgamma(k + 2))
        total = term.copy()
        j = k + 1
        for _ in range(_MAX_TERMS):
            term = term * x / (j + 1)
            j += 1
            add = (j - k) * term
            total += add
            if np.all(add <= _REL * total):
                break
        sf[small] = total
        cdf[small] = 1.0 - total
    big = ~small
    if np.any(big):
        x = xi[big]
        lx = np.log(x)
        val = k * -np.expm1(-x) / x
        for l in range(1, k):
            val = val - (k - l) * np.exp((l - 1) * lx - x - math.lgamma(l + 1))
        cdf[big] = val
        sf[big] = 1.0 - val
    return cdf, sf


def _rk(xi, k):
    lq = -np.log1p(1.0 / xi)  # log(xi / (1 + xi))
    return -np.expm1(k * lq), np.exp(k * lq)


def _tk_terms_log(l, r):
    return math.lgamma(l + r) - math.lgamma(l + 1) - math.lgamma(r)


def _tk(xi, k, r):
    lp = -np.log1p(xi)
    lq = np.log(xi) + lp
    cdf = sum(np.exp(_tk_terms_log(l, r) + r * lp + l * lq) for l in range(k))
    sf = 1.0 - cdf
    small = cdf > 0.5
    if np.any(small):
        # sf < 1/2 forces a moderate xi, so the tail series converges quickly
        qs = np.exp(lq[small])
        term = np.exp(_tk_terms_log(k, r) + r * lp[small] + k * lq[small])
        total = term.copy()
        l = k
        for _ in range(_MAX_TERMS):
            term = term * qs * (l + r) / (l + 1)
            l += 1
            total += term
            if np.all(term <= _REL * total) and np.all(qs * (l + r) < l + 1):
                break
        sf[small] = total
    return cdf, sf


def _bk(xi, k, tau: TauSpec):
    cdf = np.zeros_like(xi)
    sf = np.zeros_like(xi)
    for v, p in zip(tau.values, tau.probs):
        c, s = _fk(v * xi, k)
        cdf += p * c
        sf += p * s
    return cdf, sf


def _hk(xi, k):
    S = -np.expm1(-xi)
    logS = np.where(xi < math.log(2.0), np.log(S), np.log1p(-np.exp(-xi)))
    return -np.expm1(k * logS), np.exp(k * logS)


def _kernel(t: TailTransform, xi):
    if t.family == "hk":
        return _hk(xi, t.k)
    if t.family == "fk":
        return _fk(xi, t.k)
    if t.family == "uk":
        return _uk(xi, t.k)
    if t.family == "rk":
        return _rk(xi, t.k)
    if t.family == "tk":
        return _tk(xi, t.k, t.r)
    return _bk(xi, t.k, t.tau)


def cdf_sf_from_xi(t: TailTransform, xi):
    """``(V, 1 - V)`` as functions of ``xi = -log F``, for any xi in [0, inf]."""
    xi = np.asarray(xi, dtype=float)
    flat = xi.reshape(-1)
    cdf = np.empty_like(flat)
    sf = np.empty_like(flat)
    zero = flat == 0.0
    inf = flat == np.inf
    nan = np.isnan(flat)
    cdf[zero], sf[zero] = 1.0, 0.0
    cdf[inf], sf[inf] = 0.0, 1.0
    cdf[nan], sf[nan] = np.nan, np.nan
    mid = ~(zero | inf | nan)
    if np.any(mid):
        with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
            c, s = _kernel(t, flat[mid])
        cdf[mid] = np.clip(c, 0.0, 1.0)
        sf[mid] = np.clip(s, 0.0, 1.0)
    return _out(cdf.reshape(xi.shape)), _out(sf.reshape(xi.shape))


def log_density_factor(t: TailTransform, xi):
    """``log(dV/dF)`` so that ``v(x) = f(x) * exp(log_density_factor)``."""
    xi = np.asarray(xi, dtype=float)
    k = t.k
    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        lx = np.log(xi)
        pw = (k - 1) * lx if k > 1 else np.zeros_like(xi)
        if t.family == "hk":
            if k == 1:
                out = np.zeros_like(xi)
            else:
                S = -np.expm1(-xi)
                logS = np.where(xi < math.log(2.0), np.log(S), np.log1p(-np.exp(-xi)))
                out = math.log(k) + (k - 1) * logS
        elif t.family == "fk":
            out = pw - math.lgamma(k)
        elif t.family == "uk":
            flat = xi.reshape(-1)
            tail = np.zeros_like(flat)
            ok = (flat > 0) & np.isfinite(flat)
            if np.any(ok):
                tail[ok] = _poisson_split(flat[ok], k + 1)[1]
            tail = tail.reshape(xi.shape)
            out = math.log(k) + xi + np.log(tail) - 2.0 * lx
        elif t.family == "rk":
            out = math.log(k) + pw + xi - (k + 1) * np.log1p(xi)
        elif t.family == "tk":
            logB = math.lgamma(t.r) + math.lgamma(k) - math.lgamma(t.r + k)
            out = xi + pw - (t.r + k) * np.log1p(xi) - logB
        else:
            mix = sum(p * v**k * np.exp(-(v - 1.0) * xi) for v, p in zip(t.tau.values, t.tau.probs))
            out = pw - math.lgamma(k) + np.log(mix)
    return _out(out)


# ---------------------------------------------------------------------------
# Public operations on (transform, base)
# ---------------------------------------------------------------------------


def transform_cdf(t: TailTransform, base: BaseDistribution, x):
    """``V_k(x)`` for the derived family ``t`` built on ``base``."""
    return cdf_sf_from_xi(t, base.neglogcdf(x))[0]


def transform_sf(t: TailTransform, base: BaseDistribution, x):
    """``1 - V_k(x)`` without cancellation."""
    return cdf_sf_from_xi(t, base.neglogcdf(x))[1]


def transform_pdf(t: TailTransform, base: BaseDistribution, x):
    """Density of ``V_k``; zero where the base density vanishes."""
    xi = base.neglogcdf(x)
    with np.errstate(invalid="ignore", over="ignore"):
        out = np.exp(np.asarray(base.logpdf(x)) + np.asarray(log_density_factor(t, xi)))
    out = np.where(np.isnan(out), 0.0, out)
    return _out(out)


def _solve_xi(t: TailTransform, target: float, which: str) -> float:
    """Find xi with ``sf(xi) == target`` (or ``cdf(xi) == target``) by bisection.

    Works on ``log xi`` so relative precision is kept at both ends.
    """
    lt = math.log(target)
    lo, hi = math.log(1e-300), math.log(1e300)
    idx = 1 if which == "sf" else 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        val = cdf_sf_from_xi(t, math.exp(mid))[idx]
        with np.errstate(divide="ignore"):
            lv = math.log(val) if val > 0 else -math.inf
        # sf increases with xi, cdf decreases
        if (lv < lt) == (which == "sf"):
            lo = mid
        else:
            hi = mid
    return math.exp(0.5 * (lo + hi))


def _base_point(base: BaseDistribution, xi: float) -> float:
    if xi > math.log(2.0):
        F = math.exp(-xi)
        if F == 0.0:
            # the quantile sits below F = 5e-324; with a finite left end that
            # end is the correctly rounded answer
            if math.isfinite(base.left):
                return float(base.left)
            raise ValueError("quantile lies below the representable range of the base df")
        return float(base.quantile(F))
    return float(base.isf(-math.expm1(-xi)))


def transform_quantile(t: TailTransform, base: BaseDistribution, p):
    """``V_k^-(p)`` by monotone bisection in ``xi``."""
    p = np.asarray(p, dtype=float)
    if np.any(~((p > 0) & (p < 1))):
        raise ValueError("quantile needs 0 < p < 1")
    out = [
        _base_point(base, _solve_xi(t, v, "cdf") if v < 0.5 else _solve_xi(t, 1.0 - v, "sf"))
        for v in p.ravel()
    ]
    return _out(np.reshape(out, p.shape))


def transform_isf(t: TailTransform, base: BaseDistribution, q):
    """``V_k^-(1 - q)`` solved on the survival scale."""
    q = np.asarray(q, dtype=float)
    if np.any(~((q > 0) & (q < 1))):
        raise ValueError("isf needs 0 < q < 1")
    out = [
        _base_point(base, _solve_xi(t, v, "sf") if v < 0.5 else _solve_xi(t, 1.0 - v, "cdf"))
        for v in q.ravel()
    ]
    return _out(np.reshape(out, q.shape))


def tail_equivalence_constant(t: TailTransform) -> float:
    """``lim (1 - V_k(x)) / (1 - F(x))**k`` as x tends to the right extremity."""
    k = t.k
    if t.family in ("hk", "rk"):
        return 1.0
    if t.family == "fk":
        return 1.0 / math.factorial(k)
    if t.family == "uk":
        return 1.0 / math.factorial(k + 1)
    if t.family == "tk":
        # 1 / (k B(r, k))
        return float(math.comb(k + t.r - 1, k))
    return t.tau.moment(k) / math.factorial(k)


def empirical_tail_ratio(t: TailTransform, base: BaseDistribution, p: float) -> float:
    """``(1 - V_k(x)) / (1 - p)**k`` at ``x = F^-(p)``, formed in log space."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    q = 1.0 - p
    x = float(base.isf(q))
    if not float(base.sf(x)) > 0:
        raise ValueError("tail too deep: base survival underflows")
    s = float(transform_sf(t, base, x))
    if not s > 0:
        raise ValueError("tail too deep: derived survival underflows")
    return math.exp(math.log(s) - t.k * math.log(q))


def _xi_terms(xi, k):
    return np.exp(-xi) * xi**k / math.factorial(k)


def recurrence_residual(t: TailTransform, base: BaseDistribution, x):
    """``V_{k+1}(x)`` minus the right-hand side of the family's recurrence."""
    if t.family in ("hk", "rk"):
        raise ValueError(f"family {t.family} has no recurrence")
    xi = np.asarray(base.neglogcdf(x), dtype=float)
    F = np.exp(-xi)
    k = t.k
    nxt = cdf_sf_from_xi(t.with_k(k + 1), xi)[0]
    cur = cdf_sf_from_xi(t, xi)[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        if t.family == "fk":
            rhs = cur + F * xi**k / math.factorial(k)
        elif t.family == "uk":
            u1 = cdf_sf_from_xi(TailTransform("uk", 1), xi)[0]
            s = sum(xi ** (l - 1) / math.factorial(l) for l in range(1, k + 1))
            rhs = cur + u1 - F * s
        elif t.family == "tk":
            r = t.r
            rhs = cur + math.comb(k + r - 1, k) * xi**k / (1.0 + xi) ** (k + r)
        else:
            e = sum(p * v**k * F**v for v, p in zip(t.tau.values, t.tau.probs))
            rhs = cur + xi**k / math.factorial(k) * e
        res = nxt - rhs
    # outside the support both sides are exactly 0 or 1
    return _out(np.where(np.isfinite(xi) & (xi > 0), res, 0.0))


def burr_ode_residual(base: BaseDistribution, k: int, x):
    """``r_k(x) - (1 - R_k(x)) h1(x)`` with ``h1 = k f / (F (1 + xi) xi)``."""
    t = TailTransform("rk", k)
    xi = np.asarray(base.neglogcdf(x), dtype=float)
    f = np.asarray(base.pdf(x), dtype=float)
    F = np.exp(-xi)
    with np.errstate(divide="ignore", invalid="ignore"):
        h1 = k * f / (F * (1.0 + xi) * xi)
        res = transform_pdf(t, base, x) - cdf_sf_from_xi(t, xi)[1] * h1
    res = np.where(np.isfinite(res), res, 0.0)
    return _out(res)


def limit_law_cdf(
    family: str,
    G: MaxStableLaw,
    k: int,
    x,
    r: int = 1,
    tau: TauSpec | None = None,
):
    """Limit df of the normalized k-th upper order statistic under a random sample size.

    ``family`` is one of ``gk`` (fixed, binomial, Poisson, logarithmic sizes),
    ``jk`` (discrete uniform), ``lk`` (geometric), ``sk`` (negative binomial)
    or ``bn`` (``N_n / n -> tau``).
    """
    try:
        fam = LIMIT_FAMILIES[family]
    except KeyError:
        raise ValueError(
            f"unknown limit family {family!r}; choose from {', '.join(LIMIT_FAMILIES)}"
        ) from None
    t = TailTransform(fam, k, r if fam == "tk" else 1, tau if fam == "bk" else None)
    return cdf_sf_from_xi(t, G.neglogcdf(x))[0]


class DerivedDistribution(BaseDistribution):
    """``V_k`` built from a base df, usable wherever a base distribution is."""

    def __init__(self, transform: TailTransform, base: BaseDistribution) -> None:
        super().__init__(**base.params)
        self.transform = transform
        self.base = base
        self.name = f"{transform}[{base.name}]"
        self.left, self.right = base.left, base.right
        self.mda = base.mda.scaled(transform.k) if base.mda is not None else None
        if base.auxiliary is not None:
            k = transform.k
            self.auxiliary = lambda t: base.auxiliary(t) / k

    @property
    def right_extremity(self) -> float:
        return self.right

    @property
    def tail_constant(self) -> float:
        return tail_equivalence_constant(self.transform)

    def _cdf(self, x):
        return cdf_sf_from_xi(self.transform, self.base.neglogcdf(x))[0]

    def _sf(self, x):
        return cdf_sf_from_xi(self.transform, self.base.neglogcdf(x))[1]

    def _pdf(self, x):
        return transform_pdf(self.transform, self.base, x)

    def _logpdf(self, x):
        xi = self.base.neglogcdf(x)
        return np.asarray(self.base.logpdf(x)) + np.asarray(log_density_factor(self.transform, xi))

    def _quantile(self, p):
        return transform_quantile(self.transform, self.base, p)

    def _isf(self, q):
        return transform_isf(self.transform, self.base, q)

    def __repr__(self) -> str:
        return f"{self.transform} of {self.base!r}"


def families_for(names: Sequence[str], k: int, r: int = 1, tau: TauSpec | None = None):
    """Convenience list of transforms sharing ``k``."""
    return [
        TailTransform(n, k, r if n == "tk" else 1, tau if n == "bk" else None) for n in names
    ]
