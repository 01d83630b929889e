"""Tail ratios (1 - V_k) / (1 - F)**k approaching their constants."""

from extremalk import TailTransform, TauSpec, empirical_tail_ratio, get_distribution, tail_equivalence_constant

base = get_distribution("pareto", alpha=1.0, c=1.0)
tau = TauSpec.parse("1:0.5,2:0.5")
print(f"{'family':22s} {'constant':>10s}  p=1-1e-3   p=1-1e-6")
for t in (
    TailTransform("fk", 3),
    TailTransform("uk", 3),
    TailTransform("rk", 3),
    TailTransform("tk", 3, r=2),
    TailTransform("bk", 3, tau=tau),
):
    c = tail_equivalence_constant(t)
    r3, r6 = (empirical_tail_ratio(t, base, 1 - 10.0**-j) for j in (3, 6))
    print(f"{str(t):22s} {c:10.6f}  {r3:9.6f}  {r6:9.6f}")
