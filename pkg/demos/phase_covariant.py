"""Phase-covariant qubit dynamics: absorption g+, emission g-, dephasing g3."""
import numpy as np

from divdyn import PhaseCovRates, classify_timeline
from divdyn.phasecov import beta_from_rates, classify_pointwise, cp_static, params_at, stationary_state
from divdyn.rates import Constant

# amplitude damping towards |0><0|
damp = PhaseCovRates(Constant(1.0), Constant(0.0), Constant(0.0))
for t in (0.5, 2.0, 8.0):
    p = params_at(damp, t)
    print(f"t={t}: l1={p.lambda1:.4f} l3={p.lambda3:.4f} l*={p.lambda_star:.4f}  CP={cp_static(p)}  "
          f"4 l1^2 + l*^2 - (1+l3)^2 = {4 * p.lambda1**2 + p.lambda_star**2 - (1 + p.lambda3)**2:.1e}")
p = params_at(damp, 8.0)
print("stationary state:\n", np.round(stationary_state(p.lambda3, p.lambda_star).real, 4))

print("\nconstant rates (g+, g-, g3) -> verdicts and beta coefficients")
for rates in [(1, 1, 1), (1, 1, -0.5), (1, 0.1, -0.6), (1, 1, -1.5), (1, 1, -2.2), (1, 0, 0)]:
    c = classify_pointwise(rates)
    b = beta_from_rates(*rates).as_array()
    print(f"  {rates}: CP={c.cp_verdict.value:3s} P={c.p_verdict.value:3s} D={c.d_verdict.value:7s} beta={b}")

# the timeline with oracles: sampled Bloch-ball images confirm positivity
rep = classify_timeline(PhaseCovRates(Constant(1.0), Constant(1.0), Constant(-1.5)), np.linspace(0, 2, 41))
print("\n(1, 1, -1.5) timeline:", {k: v.value for k, v in rep.summary().items()},
      "oracles agree:", rep.oracles_agree)
