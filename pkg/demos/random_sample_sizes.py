"""Second largest of a Pareto sample: fixed vs geometric vs uniform sample sizes.

Prints the KS distance to each predicted limit as n grows.
"""

import sys

from extremalk import convergence_study, get_distribution

M = int(sys.argv[1]) if len(sys.argv) > 1 else 50_000
base = get_distribution("pareto", alpha=1.0, c=1.0)
grid = [10**2, 10**3, 10**4, 10**5]
for law, kw in (("fixed", {}), ("geometric", {}), ("uniform", {"m": 5}), ("negbinomial", {"r": 3})):
    rows = convergence_study(base, law, 2, grid, M, seed=1, workers=4, **kw)
    print(f"{law:12s}", "  ".join(f"n={r.n:<7d} ks={r.ks:.4f}" for r in rows))
