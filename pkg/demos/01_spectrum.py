"""Bound states and resonances of the barrier-well example.

Bound states sit on the negative real axis of the physical sheet; resonances
are zeros of f_in on the lower sheet.  The ray is cut at |r| = 25, where the
reference numbers were computed; use Contour() for cutoff-converged values.
"""
import time

from jost2d import BarrierWellPotential, Contour, PHYSICAL, RESONANT, find_spectral_points

pot = BarrierWellPotential(V0=25.0, r0=2.0, R=2.0)
ray = Contour(r_max=25.0)

t0 = time.perf_counter()
bound = find_spectral_points(pot, 0, (-50.0, -0.05, 0.0, 0.0), PHYSICAL, (200, 1), ray)
print(f"bound states ({time.perf_counter() - t0:.1f} s)")
for p in bound:
    print(f"  E = {p.Er:.10f}")

# a small box around the two lowest broad resonances keeps the demo quick
res = find_spectral_points(pot, 0, (6.5, 8.5, -2.2, -0.1), RESONANT, (24, 12), ray)
print("resonances, E = Er - i Gamma/2")
for p in res:
    print(f"  Er = {p.Er:.10f}  Gamma = {p.Gamma:.10f}  residual {p.rel_residual:.1e}")
