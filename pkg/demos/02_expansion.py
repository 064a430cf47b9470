"""Taylor expansion of the single-valued Jost parts about one energy.

Four coefficients per function, computed once at E0 = 7, reproduce the
nearby resonance and the s-wave cross section without further integration.
"""
import numpy as np

from jost2d import (BarrierWellPotential, Contour, RESONANT, approx_jost_many, approx_root,
                    integrate_expansion, partial_cross_section)

pot = BarrierWellPotential()
ray = Contour(r_max=25.0)

es = integrate_expansion(pot, 0, 7.0, 4, ray)
print("alpha_n:", np.round(es.alpha.real, 8))
print("beta_n: ", np.round(es.beta.real, 8))

root = approx_root(es, 7.1 - 0.3j, RESONANT)
print(f"resonance from the expansion: Er = {root.real:.10f}  Gamma = {-2 * root.imag:.10f}")

E = np.linspace(6.4, 7.6, 7)
k = np.sqrt(1.8814440607956766 * E)
fi, fo = approx_jost_many(es, E.astype(complex))
approx = np.abs(fo / fi - 1) ** 2 / k
exact = partial_cross_section(pot, 0, E, ray)
print("   E     sigma_0 exact   expansion   rel. error")
for row in zip(E, exact, approx):
    print(f"{row[0]:6.2f}  {row[1]:12.6f}  {row[2]:12.6f}  {abs(row[2] / row[1] - 1):.1e}")
