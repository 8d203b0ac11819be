"""Qubit Pauli dynamics that is never CP-divisible after t=0 but stays
P- and D-divisible: gamma = (1, 1, -tanh t).

Run:  python demos/eternal_non_markovian.py
"""
import numpy as np

from divdyn import PauliRates, classify_timeline
from divdyn.qubit_pauli import eigenvalues_at, j_from_rates
from divdyn.rates import Constant, Tanh

rates = PauliRates(Constant(1.0), Constant(1.0), Tanh(-1.0, 1.0))

# the map itself: Pauli multipliers lambda_k(t)
for t in (0.0, 1.0, 3.0):
    lam = eigenvalues_at(rates, t)
    print(f"t={t:.1f}  lambda = {np.round(lam, 6)}  j = {j_from_rates(rates.values(t))}")

report = classify_timeline(rates, np.linspace(0, 5, 201))
print("\nsummary:", {k: v.value for k, v in report.summary().items()})
for pt in report.points[::50]:
    print(f"  t={pt.t:4.2f}  CP={pt.cp.value:3s} P={pt.p.value:3s} D={pt.d.value:3s}  {', '.join(pt.fired)}")

adj = [o for o in report.oracles if o.kind == "adjacent"]
print(f"\nmost negative Choi eigenvalue of a step propagator: {min(o.choi_min_eigenvalue for o in adj):.3e}")
print("every step propagator keeps the Bloch ball:", all(o.positive_oracle for o in adj))
print(f"RK4 vs analytic maps: {report.ode_max_error:.1e}; oracle disagreements: {len(report.oracle_disagreements())}")
