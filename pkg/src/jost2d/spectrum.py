"""Spectral points (zeros of f_in) and real-energy observables."""
from dataclasses import dataclass, field
import math

import numpy as np

from .contour import Contour, ab_batch, finout_batch, finout_on_sheet, zero_im_kr_angle
from .errors import NonConvergenceError
from .potential import DONOR_UNITS
from .riccati import PHYSICAL, RESONANT, LogBranch, momentum, _pw


# -- batched Jost-function evaluation ------------------------------------------

def jost_many(pot, pw, E, branch=PHYSICAL, contour=None, units=DONOR_UNITS,
              policy="zero-im-kr", chunk=256):
    """f_in, f_out for an array of energies, each on its own zero-im-kr ray."""
    contour = contour or Contour()
    E = np.atleast_1d(np.asarray(E, dtype=complex))
    fin = np.empty(E.size, dtype=complex)
    fout = np.empty(E.size, dtype=complex)
    for lo in range(0, E.size, chunk):
        Ec = E[lo:lo + chunk]
        th = zero_im_kr_angle(Ec, units.c2mu) if policy == "zero-im-kr" else contour.theta
        fi, fo = finout_on_sheet(pot, pw, Ec, branch, th, contour, units).values
        fin[lo:lo + chunk], fout[lo:lo + chunk] = fi, fo
    return fin, fout


# -- spectral points -------------------------------------------------------------

@dataclass
class SpectralPoint:
    Er: float
    Gamma: float
    kind: str
    sheet: LogBranch
    residual: float
    newton_iters: int
    rel_residual: float = math.nan
    quality: str = "ok"

    @property
    def E(self):
        return complex(self.Er, -self.Gamma / 2)


@dataclass
class SpectrumScan:
    """Points found in a search region plus seeds that did not converge."""
    points: list
    unresolved: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]


def newton_fin(pot, pw, seeds, branch, contour=None, units=DONOR_UNITS, maxiter=40,
               step_tol=1e-11):
    """Batched Newton iteration on f_in(E) = 0.

    Returns (roots, iterations, f_in, f_out, derivative, converged).
    """
    E = np.atleast_1d(np.asarray(seeds, dtype=complex)).copy()
    n = E.size
    its = np.zeros(n, dtype=int)
    done = np.zeros(n, dtype=bool)
    fin = np.full(n, np.nan, dtype=complex)
    fout = np.full(n, np.nan, dtype=complex)
    dfin = np.full(n, np.nan, dtype=complex)
    last = np.full(n, np.inf)
    for _ in range(maxiter):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        Ea = E[act]
        h = 1e-7 * np.maximum(1.0, np.abs(Ea))
        f, g = jost_many(pot, pw, np.concatenate([Ea, Ea + h, Ea - h]), branch, contour, units)
        m = act.size
        f0, fp, fm = f[:m], f[m:2 * m], f[2 * m:]
        d = (fp - fm) / (2 * h)
        fin[act], fout[act], dfin[act] = f0, g[:m], d
        step = f0 / d
        bad = ~np.isfinite(step)
        step[bad] = 0
        E[act] = Ea - step
        its[act] += 1
        scale = np.maximum(1.0, np.abs(Ea))
        size = np.abs(step)
        # below 1e-8 a step that no longer halves is integrator noise
        stalled = (size < 1e-8 * scale) & (size > 0.5 * last[act])
        last[act] = size
        conv = (size < step_tol * scale) | stalled
        done[act[conv | bad]] = True
        fin[act[bad]] = np.nan
        # Newton wandering onto the branch point is hopeless
        done[act[np.abs(E[act]) < 1e-8]] = True
    f, g = jost_many(pot, pw, E, branch, contour, units)
    converged = done & np.isfinite(f) & (its < maxiter)
    return E, its, f, g, dfin, converged


def _rel_residual(f, g, d, E):
    # |f_out| alone fails for near-real narrow resonances, where f_out ~ conj(f_in)
    # vanishes too; the derivative term then sets the scale
    scale = abs(d) * max(1.0, abs(E)) if np.isfinite(d) else 0.0
    if np.isfinite(g):
        scale = max(scale, abs(g))
    return abs(f) / scale if scale > 0 else math.inf


def _grid_seeds(absf):
    """Indices of discrete local minima of |f| over 3x3 neighbourhoods."""
    ny, nx = absf.shape
    pad = np.pad(absf, 1, constant_values=np.inf)
    is_min = np.ones_like(absf, dtype=bool)
    dips = np.zeros_like(absf, dtype=bool)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy or dx:
                nb = pad[1 + dy:1 + dy + ny, 1 + dx:1 + dx + nx]
                is_min &= absf <= nb
                dips |= (absf < nb) & np.isfinite(nb)
    # a flat patch (|f_in| constant, e.g. V = 0) is not a minimum
    return np.argwhere(is_min & dips & np.isfinite(absf))


def _classify(E, branch, pw):
    Er, G = E.real, -2 * E.imag
    if branch.half_plane == "upper":
        if Er < 0 and abs(G) < 1e-8 * max(1.0, abs(Er)):
            return "bound", 0.0
        return "virtual-like", G
    if Er <= 0:
        return "virtual-like", G
    return "resonance", G


def find_spectral_points(pot, pw, region, branch=None, grid=(64, 32), contour=None,
                         units=DONOR_UNITS, tol=1e-8, broad_tol=1e-6, extra_seeds=()):
    """Zeros of f_in in a rectangle of the complex energy plane.

    ``region`` is (re_min, re_max, im_min, im_max).  With im_min == im_max
    the search runs along that line (nx samples).  Seeds are discrete
    local minima of |f_in| on the sample grid, refined by Newton.
    """
    branch = branch or (PHYSICAL if region[2] == region[3] == 0 and region[1] <= 0 else RESONANT)
    re_min, re_max, im_min, im_max = map(float, region)
    nx, ny = grid
    if im_min == im_max:
        ny = 1
    xs = np.linspace(re_min, re_max, nx)
    ys = np.linspace(im_max, im_min, ny)
    Eg = xs[None, :] + 1j * ys[:, None]
    Eg[np.abs(Eg) < 1e-9] = 1e-9 * (1 if re_max > 0 else -1)
    # the scan only needs to place seeds, so a looser tolerance will do
    contour = contour or Contour()
    scan = contour.with_(rtol=max(contour.rtol, 1e-8), atol=max(contour.atol, 1e-12))
    fin, _ = jost_many(pot, pw, Eg.ravel(), branch, scan, units)
    absf = np.abs(fin).reshape(Eg.shape)
    absf[~np.isfinite(absf)] = np.inf
    seeds = [Eg[i, j] for i, j in _grid_seeds(absf)]
    if ny == 1:
        # sign changes of Re f_in along a line (f_in is real on E < 0)
        re = fin.real
        for j in np.flatnonzero(np.sign(re[:-1]) * np.sign(re[1:]) < 0):
            t = re[j] / (re[j] - re[j + 1])
            seeds.append(Eg[0, j] + t * (Eg[0, j + 1] - Eg[0, j]))
    if ny > 1:
        # narrow resonances hide between grid rows; they dip |f_in| along the edge
        # nearest the real axis, so that edge gets a finer 1D pass
        edge = np.linspace(re_min, re_max, 8 * nx) + 1j * im_max
        edge[np.abs(edge) < 1e-9] = 1e-9
        a = np.abs(jost_many(pot, pw, edge, branch, scan, units)[0])
        a[~np.isfinite(a)] = np.inf
        lows = np.flatnonzero((a[1:-1] < a[:-2]) & (a[1:-1] < a[2:])) + 1
        seeds.extend(edge[lows])
    seeds.extend(complex(s) for s in extra_seeds)
    if not seeds:
        return SpectrumScan([])
    E, its, f, g, d, ok = newton_fin(pot, pw, seeds, branch, contour, units)
    margin = 1e-6
    points, unresolved = [], []
    for i in range(len(seeds)):
        Ei = E[i]
        inside = (re_min - margin <= Ei.real <= re_max + margin
                  and im_min - margin <= Ei.imag <= im_max + margin)
        if not ok[i]:
            if inside or not np.isfinite(Ei):
                unresolved.append(complex(seeds[i]))
            continue
        if not inside:
            continue
        kind, G = _classify(Ei, branch, pw)
        rel = _rel_residual(f[i], g[i], d[i], Ei)
        broad = kind == "resonance" and G > Ei.real
        if rel > (broad_tol if broad else tol):
            unresolved.append(complex(seeds[i]))
            continue
        if any(abs(p.E - complex(Ei.real, -G / 2)) < 1e-8 * max(1.0, abs(Ei)) for p in points):
            continue
        points.append(SpectralPoint(float(Ei.real), float(G), kind, branch, float(abs(f[i])),
                                    int(its[i]), float(rel), "broad" if broad else "ok"))
    points.sort(key=lambda p: p.Er)
    return SpectrumScan(points, unresolved)


# -- phase shifts -------------------------------------------------------------------

def _fout_real(pot, pw, E, contour, units, chunk=128):
    E = np.atleast_1d(np.asarray(E, dtype=float))
    out = np.empty(E.size, dtype=complex)
    for lo in range(0, E.size, chunk):
        k = np.sqrt(units.c2mu * E[lo:lo + chunk]).astype(complex)
        sol = ab_batch(pot, pw, k, 0.0, contour, units)
        a, b = sol.values
        out[lo:lo + chunk] = 0.5 * (a + 1j * b)
    return out


def phase_shift(pot, pw, E, contour=None, units=DONOR_UNITS):
    """delta_l(E) in [0, pi) from tan(delta) = b/a."""
    if not E > 0:
        raise ValueError("phase shift needs E > 0")
    contour = contour or Contour()
    k = np.sqrt(units.c2mu * E) + 0j
    a, b = ab_batch(pot, pw, k, 0.0, contour, units).values[:, 0]
    return float(np.mod(math.atan2(b.real, a.real), np.pi))


@dataclass
class PhaseShiftCurve:
    E: np.ndarray
    delta: np.ndarray
    delta_zero: float
    delta_inf: float
    flagged: list = field(default_factory=list)
    refined: bool = True


def default_phase_grid(Emin=1e-8, Emax=2000.0):
    low = np.geomspace(Emin, 0.1, 30, endpoint=False)
    mid = np.arange(0.1, 20.0, 0.05)
    high = np.geomspace(20.0, Emax, 60)
    return np.concatenate([low, mid, high])


def _wrap(x, period):
    return np.mod(x + period / 2, period) - period / 2


def phase_shift_curve(pot, pw, grid=None, contour=None, units=DONOR_UNITS, refine=True,
                      min_width=1e-10, fit_from=500.0, subdivisions=8):
    """Continuous phase shift on a real-energy grid.

    The phase is arg f_out, unwrapped by continuity.  Where neighbouring
    samples differ by more than pi/2 the interval is subdivided until the
    jump is resolved or narrower than ``min_width``; an unresolved jump is
    counted as +pi (a pole just below the axis) and flagged.  With
    ``refine=False`` the phase is continued modulo pi instead, so unresolved
    jumps are lost.  The curve is shifted by a multiple of pi so that the
    extrapolation of the high-energy end goes to zero.
    """
    contour = contour or Contour()
    E = np.array(default_phase_grid() if grid is None else grid, dtype=float)
    E.sort()
    phi = np.angle(_fout_real(pot, pw, E, contour, units))
    flagged = []
    if refine:
        while True:
            d = _wrap(np.diff(phi), 2 * np.pi)
            bad = np.flatnonzero(np.abs(d) > np.pi / 2)
            todo = [j for j in bad if E[j + 1] - E[j] > min_width]
            if not todo:
                break
            newE = np.concatenate([np.linspace(E[j], E[j + 1], subdivisions + 2)[1:-1]
                                   for j in todo])
            newphi = np.angle(_fout_real(pot, pw, newE, contour, units))
            E = np.concatenate([E, newE])
            phi = np.concatenate([phi, newphi])
            order = np.argsort(E)
            E, phi = E[order], phi[order]
        d = _wrap(np.diff(phi), 2 * np.pi)
        bad = np.abs(d) > np.pi / 2
        d[bad] = np.mod(d[bad], 2 * np.pi)
    else:
        d2 = _wrap(np.diff(phi), 2 * np.pi)
        bad = np.abs(d2) > np.pi / 2
        d = _wrap(np.diff(phi), np.pi)
    flagged = [(float(E[j]), float(E[j + 1])) for j in np.flatnonzero(bad)]
    delta = phi[0] + np.concatenate([[0.0], np.cumsum(d)])
    # threshold: tan(delta) -> 0, so delta(0+) is the nearest multiple of pi
    delta_zero = delta[0] - math.atan(math.tan(delta[0]))
    hi = E >= fit_from
    if np.count_nonzero(hi) >= 3:
        # delta ~ b/sqrt(E) + c/E at high energy (b vanishes when the
        # potential integrates to zero, so both terms are kept)
        X = np.vstack([np.ones(np.count_nonzero(hi)), E[hi] ** -0.5, 1 / E[hi]]).T
        delta_inf = float(np.linalg.lstsq(X, delta[hi], rcond=None)[0][0])
    else:
        delta_inf = float(delta[-1])
    shift = -np.pi * round(delta_inf / np.pi)
    return PhaseShiftCurve(E, delta + shift, delta_zero + shift, delta_inf + shift, flagged,
                           refine)


@dataclass
class LevinsonReport:
    passed: bool
    difference: float
    expected: float
    delta_zero: float
    delta_inf: float
    flagged: list


def levinson_check(curve, bound_count, tol=0.05):
    """Does delta(0+) - delta(inf) equal pi times the bound-state count?"""
    diff = curve.delta_zero - curve.delta_inf
    expected = math.pi * bound_count
    ok = abs(diff - expected) < tol and (curve.refined or not curve.flagged)
    return LevinsonReport(bool(ok), float(diff), expected, curve.delta_zero, curve.delta_inf,
                          list(curve.flagged))


# -- amplitudes and cross sections --------------------------------------------------

@dataclass
class CrossSections:
    E: float
    ells: list
    s: np.ndarray
    f: np.ndarray
    sigma: np.ndarray
    sigma_total: float
    phi: np.ndarray
    dsigma: np.ndarray

    def amplitude(self, phi):
        eps = np.array([1 if l == 0 else 2 for l in self.ells])
        return np.cos(np.outer(np.atleast_1d(phi), self.ells)) @ (eps * self.f)


def amplitudes_and_cross_sections(pot, ells, E, contour=None, units=DONOR_UNITS, n_phi=256):
    """Partial amplitudes, S-matrix elements and cross sections at real E > 0."""
    if not E > 0:
        raise ValueError("cross sections need E > 0")
    contour = contour or Contour()
    ells = [int(l) for l in ells]
    k = math.sqrt(units.c2mu * E)
    s = np.empty(len(ells), dtype=complex)
    for i, l in enumerate(ells):
        fi, fo = finout_batch(pot, l, k + 0j, 0.0, contour, units).values[:, 0]
        s[i] = fo / fi
    eps = np.array([1 if l == 0 else 2 for l in ells])
    f = (s - 1) / np.sqrt(2j * np.pi * k)
    sigma = eps / k * np.abs(s - 1) ** 2
    phi = np.linspace(0, 2 * np.pi, n_phi, endpoint=False)
    amp = np.cos(np.outer(phi, ells)) @ (eps * f)
    return CrossSections(E, ells, s, f, sigma, float(sigma.sum()), phi, np.abs(amp) ** 2)


def partial_cross_section(pot, pw, E, contour=None, units=DONOR_UNITS):
    """sigma_l on an array of real energies (batched)."""
    E = np.atleast_1d(np.asarray(E, dtype=float))
    contour = contour or Contour()
    fi, fo = jost_many(pot, pw, E, PHYSICAL, contour, units, policy="real-axis")
    k = np.sqrt(units.c2mu * E)
    return _pw(pw).epsilon / k * np.abs(fo / fi - 1) ** 2
