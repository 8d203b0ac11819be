"""Generalized Pauli channels in d=3 and d=4: which certificates fire.

For d >= 3 only sufficient or necessary conditions are available, so
verdicts are YES / NO / UNKNOWN.
"""
import numpy as np

from divdyn import gpc
from divdyn.mub import build_mubs, max_deviation

for d in (3, 4):
    ortho, unbiased = max_deviation(build_mubs(d))
    print(f"d={d}: {d + 1} mutually unbiased bases, deviations {ortho:.1e} / {unbiased:.1e}")

cases = [
    (3, [-1, 1, 1, 1]),          # one negative rate, boundary of the D certificate
    (3, [-1, -1, 5, 5]),         # two negative rates, P only through the k-negative bound
    (3, [-3, 1, 1, 1]),          # necessary P condition fails
    (4, [-1, 2, 2, 1.4, 1.4]),   # P certified, D left open
    (4, [-1, 2, 2, 1.6, 1.6]),   # both certified
]
for d, g in cases:
    c = gpc.classify_pointwise(g, d)
    print(f"\nd={d} gamma={g}")
    print(f"  CP={c.cp_verdict.value}  P={c.p_verdict.value}  D={c.d_verdict.value}")
    print(f"  fired:  {', '.join(c.fired) or '-'}")
    print(f"  failed: {', '.join(c.failed) or '-'}")

# one rate gamma, the other three gamma~ (d=3): where is D certified?
print("\nD-sufficient region, d=3, rows gamma~ from 2 down to -2, columns gamma from -2 to 2")
axis = np.linspace(-2, 2, 17)
for gt in axis[::-1]:
    print("  " + "".join("#" if gpc.d_sufficient([g, gt, gt, gt], 3) else "." for g in axis))
