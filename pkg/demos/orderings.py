"""Worst violation of each ordering claim over several bases (negative means strict)."""

from extremalk import get_distribution
from extremalk.ordering import CLAIMS, ordering_report, worst_by_claim

for name in ("exponential", "uniform", "pareto", "normal", "cauchy"):
    worst = worst_by_claim(ordering_report(get_distribution(name), k_max=4, r_max=3, grid_size=500))
    print(f"{name:12s}", " ".join(f"{c}:{worst[c]:+.1e}" for c in CLAIMS))
