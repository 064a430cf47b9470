"""Low-energy scattering and the Levinson count.

The expansion about E0 = 0 gives the 2D scattering length; the phase shift
swept from threshold to high energy drops by pi per bound state.
"""
import math

from jost2d import (BarrierWellPotential, Contour, effective_range_params, integrate_expansion,
                    levinson_check, phase_shift_curve)

pot = BarrierWellPotential()
ray = Contour(r_max=25.0)

p = effective_range_params(integrate_expansion(pot, 0, 0.0, 1, ray))
print(f"scattering length a = {p.a:.10f}")
print(f"log scattering length a' = {p.a_log:.6g}")

curve = phase_shift_curve(pot, 0, contour=ray)
rep = levinson_check(curve, bound_count=3)
print(f"delta(0+) - delta(inf) = {rep.difference:.4f}  (3 pi = {3 * math.pi:.4f})  "
      f"passed: {rep.passed}")
