"""Radial ODE systems integrated along a rotated ray r = rho*exp(-i*theta).

Four systems share one driver:

* ``finout``    - F_in, F_out of the variable-phase ansatz
                  u = F_in h- + F_out h+;
* ``ab``        - A, B of u = A j - B y;
* ``tilde``     - the single-valued A~, B~ built on j~, y~;
* ``expansion`` - Taylor coefficients of A~, B~ in E - E0.

Every function takes a batch of energies; each energy may have its own
rotation angle but all share the radial parameter rho, so the whole batch
is one vector ODE for scipy's DOP853 stepper.
"""
from dataclasses import dataclass, field, replace
import csv
import math
import warnings

import numpy as np
from scipy.integrate import DOP853

from .errors import (ContourInadequateError, DomainError, DomainWarning,
                     InvalidRotationError, NonConvergenceError)
from .potential import DONOR_UNITS, reduced_potential
from .riccati import (PHYSICAL, log_branch_h, momentum, riccati_hankel_scaled, riccati_jy,
                      taylor_sc, _pw, _tilde_nu)

# zero-im-kr never rotates further than this; steeper rays barely damp V
MAX_AUTO_THETA = 0.3 * np.pi
OVERFLOW = 1e300


@dataclass(frozen=True)
class Contour:
    """Integration ray r = rho*exp(-i*theta), rho in [r_start, r_max]."""
    theta: float = 0.0
    r_start: float = 1e-6
    r_max: float = 70.0
    rtol: float = 1e-12
    atol: float = 1e-14
    adaptive_tail: bool = True
    tail_tol: float = 1e-14
    max_steps: int = 10000

    def __post_init__(self):
        if not abs(self.theta) < np.pi / 2:
            raise InvalidRotationError(f"rotation angle {self.theta} outside (-pi/2, pi/2)")
        if not 0 < self.r_start < self.r_max:
            raise ValueError("need 0 < r_start < r_max")

    @property
    def direction(self):
        return np.exp(-1j * self.theta)

    def point(self, rho):
        return rho * self.direction

    def with_(self, **kw):
        return replace(self, **kw)


def zero_im_kr_angle(E, c2mu):
    """Rotation that makes k*r real, or 0 when that ray is too steep."""
    E = np.asarray(E, dtype=complex)
    th = np.angle(np.sqrt(c2mu * E))
    th = np.where(np.abs(th) > MAX_AUTO_THETA, 0.0, th)
    return th[()] if th.ndim == 0 else th


def build_contour(E, units=DONOR_UNITS, policy="zero-im-kr", base=None):
    """Contour for energy E.

    ``policy`` is 'real-axis', 'zero-im-kr' or an explicit angle.
    ``base`` supplies the remaining settings.
    """
    base = base or Contour()
    if isinstance(policy, str):
        if policy == "real-axis":
            return base.with_(theta=0.0)
        if policy == "zero-im-kr":
            if complex(E) == 0:
                raise ValueError("zero-im-kr rotation is undefined at E = 0")
            return base.with_(theta=float(zero_im_kr_angle(E, units.c2mu)))
        raise ValueError(f"unknown contour policy {policy!r}")
    return base.with_(theta=float(policy))


@dataclass
class RadialSolution:
    """Terminal values of one integration run plus diagnostics.

    ``values`` has shape (n_components, n_energies).  Iterating over a
    single-energy solution yields the component values.
    """
    system: str
    values: np.ndarray
    nfev: int = 0
    n_steps: int = 0
    rho_end: float = 0.0
    tail_residual: float = math.nan
    trace: list = field(default_factory=list, repr=False)

    def __iter__(self):
        v = self.values
        return iter(v[:, 0] if v.ndim == 2 and v.shape[1] == 1 else v)

    def write_trace(self, path):
        """Dump r and the real/imaginary parts of every state component."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            if not self.trace:
                return
            n = len(self.trace[0][1])
            w.writerow(["rho"] + [f"{p}{i}" for i in range(n) for p in ("re", "im")])
            for rho, y in self.trace:
                w.writerow([f"{rho:.10g}"] + [f"{x:.10g}" for v in y for x in (v.real, v.imag)])


def _tail_metric(pot, units, rho, direction, rate=0.0):
    """|V| rho^2, times the exp(2|Im kr|) the integrand still carries."""
    r = rho * direction
    v = np.abs(reduced_potential(pot, units, r)) * np.exp(rate * rho)
    return float(np.max(v)) * max(rho, 1.0) ** 2


def _drive(system, rhs, y0, pot, units, direction, contour, trace=False, span=None, rate=0.0):
    """Step DOP853 over ``span`` (default r_start..r_max) with overflow and tail checks.

    ``rate`` is the per-energy growth 2|Im(k e^{-i theta})| of the integrand.
    """
    y0 = np.asarray(y0, dtype=complex)
    rho0, rho1 = span or (contour.r_start, contour.r_max)
    solver = DOP853(rhs, rho0, y0, rho1, rtol=contour.rtol, atol=contour.atol)
    quiet = 0
    steps = 0
    tail = math.nan
    rec = [(rho0, y0.copy())] if trace else []
    guard = OVERFLOW * contour.rtol
    while solver.status == "running":
        solver.step()
        steps += 1
        if solver.status == "failed":
            raise NonConvergenceError(f"{system}: step size collapsed at rho={solver.t:.6g}")
        if steps >= contour.max_steps:
            # typical when cancellation in the right-hand side (outside the
            # analyticity domain) forces ever smaller steps
            raise NonConvergenceError(
                f"{system}: no end of ray after {steps} steps (rho={solver.t:.6g})")
        y = solver.y
        big = np.max(np.abs(y))
        if not np.isfinite(big) or big > guard:
            raise ContourInadequateError(
                f"{system}: state overflow at rho={solver.t:.6g}; exp(2|Im kr|) "
                "outgrows the potential decay along this ray")
        if trace:
            rec.append((solver.t, y.copy()))
        tail = _tail_metric(pot, units, solver.t, direction, rate)
        if contour.adaptive_tail:
            quiet = quiet + 1 if tail < contour.tail_tol else 0
            if quiet >= 3:
                break
    sol = RadialSolution(system, None, solver.nfev, steps, float(solver.t), tail, rec)
    sol.stopped_early = solver.status == "running"
    return solver.y, sol


def _rays(thetas, n):
    th = np.broadcast_to(np.asarray(thetas, dtype=float), (n,)).copy()
    if np.any(np.abs(th) >= np.pi / 2):
        raise InvalidRotationError("rotation angle must satisfy |theta| < pi/2")
    return th, np.exp(-1j * th)


def growth_excess(k, theta, eta):
    """2|Im(k e^{-i theta})| - eta cos(theta); negative inside the domain."""
    kd = np.asarray(k) * np.exp(-1j * np.asarray(theta))
    eta = np.inf if eta is None else eta
    return 2 * np.abs(kd.imag) - eta * np.cos(theta)


def _eta(pot):
    return getattr(pot, "eta", None)


# -- F_in / F_out ---------------------------------------------------------------

def finout_batch(pot, pw, k, thetas, contour=None, units=DONOR_UNITS, trace=False):
    """f_in, f_out for an array of momenta.

    A component whose integrand grows faster than the potential decays has
    no limit; it is returned as nan.  The other component is then coupled
    to an exponentially rescaled variable (F_out e^{2ikr} or F_in e^{-2ikr})
    so that nothing overflows.
    """
    contour = contour or Contour()
    ell = _pw(pw).ell
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    M = k.size
    th, d = _rays(thetas, M)
    if ell >= 2 and M > 1:
        # the A/B handoff radius is ~1/|k|; momenta more than a factor 2 apart
        # are integrated separately so each gets its own handoff
        group = np.floor(np.log2(np.maximum(np.abs(k), 1e-300))).astype(int)
        if np.unique(group).size > 1:
            return _finout_groups(pot, pw, k, th, contour, units, group)
    kd = k * d
    eta = _eta(pot)
    excess = growth_excess(k, th, eta)
    if eta is None:
        excess = 2 * np.abs(kd.imag) * contour.r_max - 50.0
    mode = np.where(excess < 0, 0, np.sign(kd.imag)).astype(int)
    direct = mode == 0
    up, dn = mode == 1, mode == -1
    ik2 = 2j * k

    def rhs(rho, y):
        P, Q = y[:M], y[M:]
        r = rho * d
        z = k * r
        Hm, Hp = riccati_hankel_scaled(ell, z)
        g = reduced_potential(pot, units, r) / ik2
        A, B, C = Hm * Hp, Hp * Hp, Hm * Hm
        w = np.ones(M, dtype=complex)
        if np.any(direct):
            w[direct] = np.exp(2j * z[direct])
        with np.errstate(invalid="ignore", over="ignore"):
            dP = -g * (P * A + np.where(g == 0, 0, Q * B * w))
            dQ = g * (np.where(g == 0, 0, P * C / w) + Q * A)
        dP = dP - np.where(dn, ik2 * P, 0)
        dQ = dQ + np.where(up, ik2 * Q, 0)
        return np.concatenate([dP * d, dQ * d])

    rho1 = contour.r_start
    P0 = np.full(M, 0.5, dtype=complex)
    Q0 = P0.copy()
    nfev = steps = 0
    rec = []
    if ell >= 2:
        # near the origin h+ h- ~ r^(1-2l) cancels to r^2l relative accuracy, so
        # the first stretch (|kr| < 1) runs on the well-conditioned A/B system
        kmax = float(np.max(np.abs(k))) or 1.0
        stop = min(max(1.0 / kmax, 10 * contour.r_start), contour.r_max)
        y0 = np.concatenate([np.ones(M), np.zeros(M)]).astype(complex)
        yab, s0 = _drive("finout", _ab_rhs(pot, units, ell, k, d), y0, pot, units, d,
                         contour, trace, span=(contour.r_start, stop))
        rho1 = s0.rho_end
        P0 = 0.5 * (yab[:M] - 1j * yab[M:])
        Q0 = 0.5 * (yab[:M] + 1j * yab[M:])
        nfev, steps = s0.nfev, s0.n_steps
        rec = [(t, np.concatenate([0.5 * (v[:M] - 1j * v[M:]), 0.5 * (v[:M] + 1j * v[M:])]))
               for t, v in s0.trace]
    z0 = k * rho1 * d
    P0 = np.where(dn, P0 * np.exp(-2j * z0), P0)
    Q0 = np.where(up, Q0 * np.exp(2j * z0), Q0)
    y0 = np.concatenate([P0, Q0])
    if rho1 < contour.r_max:
        y, sol = _drive("finout", rhs, y0, pot, units, d, contour, trace,
                        span=(rho1, contour.r_max), rate=np.where(direct, 2 * np.abs(kd.imag), 0))
        sol.nfev += nfev
        sol.n_steps += steps
        sol.trace = rec + sol.trace[1:] if rec else sol.trace
    else:
        y, sol = y0, s0
        sol.trace = rec
    fin = np.where(dn, np.nan, y[:M]).astype(complex)
    fout = np.where(up, np.nan, y[M:]).astype(complex)
    sol.values = np.vstack([fin, fout])
    sol.mode = mode
    return sol


def _finout_groups(pot, pw, k, th, contour, units, group):
    vals = np.empty((2, k.size), dtype=complex)
    mode = np.empty(k.size, dtype=int)
    nfev = steps = 0
    rho_end = 0.0
    for g in np.unique(group):
        idx = np.flatnonzero(group == g)
        s = finout_batch(pot, pw, k[idx], th[idx], contour, units)
        vals[:, idx] = s.values
        mode[idx] = s.mode
        nfev, steps, rho_end = nfev + s.nfev, steps + s.n_steps, max(rho_end, s.rho_end)
    sol = RadialSolution("finout", vals, nfev, steps, rho_end)
    sol.mode = mode
    return sol


def finout_on_sheet(pot, pw, E, branch=PHYSICAL, thetas=0.0, contour=None, units=DONOR_UNITS,
                    trace=False):
    """f_in, f_out at energies E on a given sheet.

    A rotated momentum on the negative real axis would put the Hankel cut
    on the ray, so there the integration runs at -k.  The result carries
    ln k with arg(k e^{-i theta}) + theta; where that differs from the
    sheet's h(k) it is moved over through the single-valued pair
    (a~, k^2l b~) = (f_in + f_out - h k^2l b~, (f_out - f_in)/i).
    """
    E = np.atleast_1d(np.asarray(E, dtype=complex))
    k = np.atleast_1d(momentum(E, units.c2mu, branch))
    th = np.broadcast_to(np.asarray(thetas, dtype=float), k.shape)
    z = k * np.exp(-1j * th)
    on_cut = (z.real < 0) & (np.abs(z.imag) <= 1e-12 * np.abs(z))
    kint = np.where(on_cut, -k, k)
    sol = finout_batch(pot, pw, kint, th, contour, units, trace)
    fi, fo = sol.values
    arg_int = np.angle(kint * np.exp(-1j * th)) + th
    h_int = (2 / np.pi) * (np.log(np.abs(k) / 2) + 1j * arg_int)
    h = np.atleast_1d(log_branch_h(k, 1.0, branch))
    other = np.abs(h - h_int) > 1e-9
    if np.any(other):
        kb = (fo[other] - fi[other]) / 1j
        at = fi[other] + fo[other] - h_int[other] * kb
        fi[other] = 0.5 * (at + (h[other] - 1j) * kb)
        fo[other] = 0.5 * (at + (h[other] + 1j) * kb)
    sol.values = np.vstack([fi, fo])
    sol.resheeted = other
    return sol


# -- A / B -------------------------------------------------------------------

def _ab_rhs(pot, units, ell, k, d):
    M = k.size

    def rhs(rho, y):
        A, B = y[:M], y[M:]
        r = rho * d
        j, yy = riccati_jy(ell, k * r)
        v = reduced_potential(pot, units, r) / k
        W = v * (A * j - B * yy)
        return np.concatenate([-yy * W * d, -j * W * d])
    return rhs


def ab_batch(pot, pw, k, thetas, contour=None, units=DONOR_UNITS, trace=False):
    """A, B limits (a_l, b_l) for an array of momenta."""
    contour = contour or Contour()
    ell = _pw(pw).ell
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    M = k.size
    th, d = _rays(thetas, M)
    bad = growth_excess(k, th, _eta(pot)) >= 0
    if np.any(bad):
        raise ContourInadequateError(
            "A/B system: exp(2|Im kr|) is not damped by the potential along the ray "
            f"for E = {(k[bad][0] ** 2 / units.c2mu):.6g}")

    y0 = np.concatenate([np.ones(M), np.zeros(M)]).astype(complex)
    y, sol = _drive("ab", _ab_rhs(pot, units, ell, k, d), y0, pot, units, d, contour, trace,
                    rate=2 * np.abs((k * d).imag))
    sol.values = np.vstack([y[:M], y[M:]])
    return sol


# -- tilded systems ---------------------------------------------------------------

def _check_domain(pot, E, th, units, strict, what):
    k = np.sqrt(units.c2mu * np.asarray(E, dtype=complex))
    bad = growth_excess(k, th, _eta(pot)) >= 0
    if np.any(bad):
        msg = (f"{what}: E = {np.asarray(E)[bad][0]:.6g} lies outside the analyticity "
               "domain for this ray")
        if strict:
            raise DomainError(msg)
        warnings.warn(msg, DomainWarning, stacklevel=3)


def expansion_batch(pot, pw, E0, N, thetas, contour=None, units=DONOR_UNITS,
                    scaleR=1.0, strict_domain=False, trace=False):
    """Coefficients (alpha_n, beta_n), n = 0..N, for an array of centres E0.

    ``values`` has shape (2(N+1), M): alpha_0..alpha_N then beta_0..beta_N.
    N = 0 is the plain tilded system.
    """
    contour = contour or Contour()
    ell = _pw(pw).ell
    E0 = np.atleast_1d(np.asarray(E0, dtype=complex))
    M = E0.size
    th, d = _rays(thetas, M)
    _check_domain(pot, E0, th, units, strict_domain, "tilde system")
    n1 = N + 1
    c2mu = units.c2mu
    ii = np.arange(n1)
    conv = np.clip(ii[:, None] - ii[None, :], 0, N)       # index n - i
    low = (ii[:, None] >= ii[None, :])[:, :, None]

    def rhs(rho, y):
        Y = y.reshape(2, n1, M)
        Aa, Bb = Y[0], Y[1]
        r = rho * d
        if N == 0:
            S, C = _tilde_nu(ell, c2mu * E0, r, scaleR)
            S, C = S[None], C[None]
        else:
            S, C = taylor_sc(ell, E0, r, N, c2mu, scaleR)
        v = reduced_potential(pot, units, r) * d
        # W_n = sum_{i+j=n} (A_i s_j - B_i c_j), and likewise for the derivatives
        Sm, Cm = S[conv] * low, C[conv] * low
        W = np.einsum("nim,im->nm", Sm, Aa) - np.einsum("nim,im->nm", Cm, Bb)
        dA = -v * np.einsum("nim,im->nm", Cm, W)
        dB = -v * np.einsum("nim,im->nm", Sm, W)
        return np.concatenate([dA.ravel(), dB.ravel()])

    y0 = np.zeros((2, n1, M), dtype=complex)
    y0[0, 0] = 1.0
    rate = 2 * np.abs((np.sqrt(c2mu * E0) * d).imag)
    y, sol = _drive("expansion" if N else "tilde", rhs, y0.ravel(), pot, units, d,
                    contour, trace, rate=rate)
    sol.values = y.reshape(2 * n1, M)
    return sol


# -- single-point front ends ----------------------------------------------------

def _point(E, branch):
    if hasattr(E, "E") and hasattr(E, "branch"):
        return complex(E.E), E.branch
    return complex(E), branch or PHYSICAL


def integrate_finout(pot, pw, E, contour=None, units=DONOR_UNITS, branch=None,
                     trace=False):
    """(f_in, f_out) at a point of the energy surface.

    ``E`` is a complex energy (with ``branch``) or a RiemannPoint.
    """
    E, branch = _point(E, branch)
    if contour is None:
        contour = build_contour(E, units) if E != 0 else Contour()
    return finout_on_sheet(pot, pw, E, branch, contour.theta, contour, units, trace)


def integrate_ab(pot, pw, E, contour=None, units=DONOR_UNITS, branch=None, trace=False):
    """(a_l, b_l), the limits of A and B with A(0) = 1, B(0) = 0."""
    E, branch = _point(E, branch)
    contour = contour or Contour()
    k = momentum(E, units.c2mu, branch)
    return ab_batch(pot, pw, k, contour.theta, contour, units, trace)


def integrate_tilde(pot, pw, E, contour=None, units=DONOR_UNITS, scaleR=1.0,
                    strict_domain=False, trace=False):
    """(a~, b~); single-valued in E, so no sheet is needed."""
    E, _ = _point(E, None)
    contour = contour or Contour()
    return expansion_batch(pot, pw, E, 0, contour.theta, contour, units, scaleR,
                           strict_domain, trace)


def integrate_expansion(pot, pw, E0, N, contour=None, units=DONOR_UNITS, scaleR=1.0,
                        strict_domain=False):
    """ExpansionSet of order N about E0 (see jost2d.expansion)."""
    from .expansion import integrate_expansion as _impl
    return _impl(pot, pw, E0, N, contour, units, scaleR, strict_domain)
