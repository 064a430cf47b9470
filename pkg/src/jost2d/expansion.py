"""Power-series (generalized effective-range) expansion of the Jost functions.

With a~(E) = sum alpha_n (E-E0)^n and b~(E) = sum beta_n (E-E0)^n,

    f_in/out(E) ~ (1/2) sum_n {alpha_n + k^(2l) [h(k) -/+ i] beta_n} (E-E0)^n

on any sheet.  The coefficients come either from the exact radial problem
(integrate_expansion) or from a fit to scattering data (fit_coefficients).
"""
from dataclasses import dataclass, field, asdict
import json
import math
import warnings

import numpy as np
from scipy.optimize import least_squares

from .contour import Contour, build_contour, expansion_batch
from .errors import (IllConditionedFitError, NoLowEnergyScatteringWarning,
                     NonConvergenceError, ZeroDenominatorError, ZeroEnergyPoleError)
from .jost import JostPair, RiemannPoint, k_power
from .potential import DONOR_UNITS
from .riccati import EULER_GAMMA, PHYSICAL, PartialWave, log_branch_h, momentum, _pw


@dataclass
class ExpansionSet:
    pw: PartialWave
    E0: complex
    N: int
    alpha: np.ndarray
    beta: np.ndarray
    scaleR: float = 1.0
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.pw = _pw(self.pw)
        self.E0 = complex(self.E0)
        self.alpha = np.asarray(self.alpha, dtype=complex)
        self.beta = np.asarray(self.beta, dtype=complex)
        if len(self.alpha) != self.N + 1 or len(self.beta) != self.N + 1:
            raise ValueError("alpha and beta need N+1 entries")

    def truncate(self, N):
        return ExpansionSet(self.pw, self.E0, N, self.alpha[:N + 1], self.beta[:N + 1],
                            self.scaleR, dict(self.provenance, truncated_from=self.N))

    def ab(self, E):
        """Truncated series a~(E), b~(E)."""
        x = np.asarray(E, dtype=complex) - self.E0
        return (np.polynomial.polynomial.polyval(x, self.alpha),
                np.polynomial.polynomial.polyval(x, self.beta))

    def to_json(self):
        pair = lambda z: [float(z.real), float(z.imag)]
        doc = {"ell": self.pw.ell, "E0": pair(self.E0), "N": self.N,
               "alpha": [pair(a) for a in self.alpha], "beta": [pair(b) for b in self.beta],
               "scaleR": self.scaleR, "provenance": self.provenance}
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        z = lambda p: complex(p[0], p[1])
        return cls(PartialWave(d["ell"]), z(d["E0"]), int(d["N"]),
                   [z(a) for a in d["alpha"]], [z(b) for b in d["beta"]],
                   float(d.get("scaleR", 1.0)), d.get("provenance", {}))


def _default_contour(E0, units, contour):
    if contour is not None:
        return contour
    if complex(E0).imag != 0:
        return build_contour(E0, units)
    return Contour()


def integrate_expansion(pot, pw, E0, N, contour=None, units=DONOR_UNITS, scaleR=1.0,
                        strict_domain=False):
    """Exact expansion coefficients alpha_n, beta_n (n <= N) about E0."""
    if N < 0:
        raise ValueError("N must be >= 0")
    contour = _default_contour(E0, units, contour)
    sol = expansion_batch(pot, pw, E0, N, contour.theta, contour, units, scaleR,
                          strict_domain)
    v = sol.values[:, 0]
    prov = {"theta": contour.theta, "r_start": contour.r_start, "r_max": contour.r_max,
            "rtol": contour.rtol, "atol": contour.atol, "rho_end": sol.rho_end,
            "nfev": sol.nfev, "c2mu": units.c2mu}
    return ExpansionSet(_pw(pw), E0, N, v[:N + 1], v[N + 1:], scaleR, prov)


def approx_jost_many(eset, E, branch=PHYSICAL, units=DONOR_UNITS):
    """Approximate (f_in, f_out) for an array of energies on one sheet."""
    E = np.asarray(E, dtype=complex)
    a, b = eset.ab(E)
    k = momentum(E, units.c2mu, branch)
    h = log_branch_h(k, eset.scaleR, branch)
    kp = (units.c2mu * E) ** eset.pw.ell  # integer power
    return 0.5 * (a + kp * (h - 1j) * b), 0.5 * (a + kp * (h + 1j) * b)


def approx_jost(eset, at, units=DONOR_UNITS):
    """JostPair from the truncated expansion."""
    a, b = eset.ab(at.E)
    k = at.k(units)
    h = complex(log_branch_h(k, eset.scaleR, at.branch))
    kp = k_power(units.c2mu * complex(at.E), eset.pw.ell)
    return JostPair(complex(0.5 * (a + kp * (h - 1j) * b)), complex(0.5 * (a + kp * (h + 1j) * b)),
                    at, f"expansion(N={eset.N}, E0={eset.E0:.10g})")


def approx_root(eset, guess, branch=None, units=DONOR_UNITS, tol=1e-13, maxiter=60):
    """Zero of the approximate f_in by Newton's method."""
    from .riccati import RESONANT
    branch = branch or RESONANT
    E = complex(guess)
    for it in range(maxiter):
        dE = 1e-7 * max(1.0, abs(E))
        f0 = approx_jost_many(eset, E, branch, units)[0]
        fp = approx_jost_many(eset, E + dE, branch, units)[0]
        fm = approx_jost_many(eset, E - dE, branch, units)[0]
        step = f0 / ((fp - fm) / (2 * dE))
        E -= step
        if abs(step) < tol * max(1.0, abs(E)):
            return complex(E)
    raise NonConvergenceError(f"approximate f_in: no root from {guess}")


# -- effective range ------------------------------------------------------------

@dataclass(frozen=True)
class EffectiveRangeParams:
    a: float
    r0: float
    a_log: float = math.nan
    a_inv_log: float = math.nan


def effective_range_function(pot, pw, E, contour=None, units=DONOR_UNITS, scaleR=1.0):
    """a~/b~ = k^(2l) [cot(delta) - h(k)], single-valued in E."""
    contour = contour or Contour()
    sol = expansion_batch(pot, pw, E, 0, contour.theta, contour, units, scaleR)
    at, bt = sol.values[:, 0]
    if abs(bt) <= 1e-15 * abs(at):
        raise ZeroDenominatorError(f"b~ vanishes at E = {E}: delta = 0 mod pi")
    return complex(at / bt)


def effective_range_params(eset, units=DONOR_UNITS):
    """Scattering length and effective radius from a threshold expansion."""
    if eset.E0 != 0:
        raise ValueError("effective-range parameters need an expansion about E0 = 0")
    if eset.N < 1:
        raise ValueError("need N >= 1")
    a0, a1 = eset.alpha[0], eset.alpha[1]
    b0, b1 = eset.beta[0], eset.beta[1]
    if a0 == 0:
        raise ZeroEnergyPoleError("alpha_0 = 0: S-matrix pole at threshold")
    if b0 == 0:
        warnings.warn("beta_0 = 0: no low-energy scattering, scattering length and "
                      "effective radius degenerate", NoLowEnergyScatteringWarning, stacklevel=2)
        return EffectiveRangeParams(0.0, math.nan)
    a = (-b0 / a0).real
    r0 = (units.hbar2_over_mu * (a1 / b0 - a0 * b1 / b0 ** 2)).real
    if eset.pw.ell != 0:
        return EffectiveRangeParams(a, r0)
    ln_ap = -math.pi / (2 * a) - EULER_GAMMA
    return EffectiveRangeParams(a, r0, math.exp(ln_ap), -math.pi / ln_ap)


# -- fitting -------------------------------------------------------------------

@dataclass
class FitDiagnostics:
    residual_norm: float
    condition: float
    nfev: int
    n_data: int
    success: bool


def observable_from_jost(f_in, f_out, pw, k, kind):
    """Partial cross section or phase shift (mod pi) at real k."""
    s = f_out / f_in
    if kind == "sigma":
        return _pw(pw).epsilon / k * np.abs(s - 1) ** 2
    if kind == "delta":
        return np.mod(np.angle(s) / 2, np.pi)
    raise ValueError(f"unknown observable {kind!r}")


def _linear_seeds(x, y, k, h, kp, pw, N, observable):
    """Starting points from the linear problem a~(E) - G(E) b~(E) = 0.

    G = k^(2l) (cot(delta) - h) is read off the data.  A cross section fixes
    only sin^2(delta), so cot(delta) is known up to a sign that flips where
    sin^2 passes 1; every single-flip sign pattern is tried.
    """
    if observable == "delta":
        cots = [1 / np.tan(y)]
    else:
        s2 = np.clip(y * k / (4 * pw.epsilon), 1e-12, 1.0)
        c = np.sqrt((1 - s2) / s2)
        cots = []
        for i in range(len(x) + 1):
            sign = np.where(np.arange(len(x)) < i, 1.0, -1.0)
            cots += [sign * c, -sign * c]
    V = np.vander(x, N + 1, increasing=True)
    seeds = []
    for cot in cots:
        G = kp * (cot - h)
        M = np.hstack([V[:, 1:], -G[:, None] * V]) / (1 + np.abs(G))[:, None]
        p, *_ = np.linalg.lstsq(M, -1 / (1 + np.abs(G)), rcond=None)
        if np.all(np.isfinite(p)):
            seeds.append(p)
    return seeds


def fit_coefficients(data, pw, E0, N, observable="sigma", units=DONOR_UNITS, scaleR=1.0,
                     warm_start=None, cond_limit=1e10):
    """Least-squares fit of alpha_n, beta_n to real scattering data.

    ``data`` is a sequence of (E, value) with E > 0.  Only the ratio a~/b~
    is observable, so the coefficients are normalized to alpha_0 = 1.
    Returns (ExpansionSet, FitDiagnostics).
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError("data must be (E, value) pairs")
    E, y = data[:, 0], data[:, 1]
    if len(E) < 2 * (N + 1):
        raise ValueError(f"need at least {2 * (N + 1)} data points for N = {N}")
    if np.any(E <= 0):
        raise ValueError("fit energies must be positive")
    pw = _pw(pw)
    E0 = float(np.real(E0))
    w = float(np.max(np.abs(E - E0)))
    x = (E - E0) / w
    k = np.sqrt(units.c2mu * E)
    h = np.real(log_branch_h(k, scaleR, PHYSICAL))
    kp = (units.c2mu * E) ** pw.ell
    if observable == "sigma":
        weight = 1.0 / (np.abs(y) + 1e-2 * np.max(np.abs(y)) + 1e-300)
    else:
        weight = np.ones_like(y)

    def model(p, n):
        al = np.concatenate([[1.0], p[:n]])
        be = p[n:]
        a = np.polynomial.polynomial.polyval(x, al)
        b = np.polynomial.polynomial.polyval(x, be)
        fi = 0.5 * (a + kp * (h - 1j) * b)
        fo = 0.5 * (a + kp * (h + 1j) * b)
        return observable_from_jost(fi, fo, pw, k, observable)

    def resid(p, n):
        m = model(p, n)
        if observable == "delta":
            d = np.mod(m - y + np.pi / 2, np.pi) - np.pi / 2
        else:
            d = m - y
        return d * weight

    def solve(p0, n):
        return least_squares(resid, p0, args=(n,), method="lm", x_scale="jac",
                             xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000 * (n + 1))

    if warm_start is not None:
        al = np.real(warm_start.alpha / warm_start.alpha[0])[1:] * w ** np.arange(1, N + 1)
        be = np.real(warm_start.beta / warm_start.alpha[0]) * w ** np.arange(N + 1)
        best = solve(np.concatenate([al[:N], be[:N + 1]]), N)
    else:
        best = None
        for p0 in _linear_seeds(x, y, k, h, kp, pw, N, observable):
            res = solve(p0, N)
            if best is None or res.cost < best.cost:
                best = res
        # build up the order, keeping the best of several beta_0 seeds
        for b0 in (-10.0, -1.0, -0.1, 0.1, 1.0, 10.0):
            res = solve(np.array([b0]), 0)
            for n in range(1, N + 1):
                p = res.x
                p0 = np.concatenate([p[:n - 1], [0.0], p[n - 1:], [0.0]])
                res = solve(p0, n)
            if best is None or res.cost < best.cost:
                best = res
    J = best.jac
    sv = np.linalg.svd(J, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    if cond > cond_limit:
        raise IllConditionedFitError(
            f"fit design condition number {cond:.3g} exceeds {cond_limit:.3g}; "
            "widen the data window or lower N")
    p = best.x
    scale = w ** -np.arange(N + 1)
    alpha = np.concatenate([[1.0], p[:N]]) * scale
    beta = p[N:] * scale
    diag = FitDiagnostics(float(np.linalg.norm(best.fun)), cond, int(best.nfev), len(E),
                          bool(best.success))
    prov = {"fit": {"observable": observable, "n_data": len(E), "window": [float(E.min()), float(E.max())],
                    "residual_norm": diag.residual_norm, "condition": cond},
            "c2mu": units.c2mu}
    return ExpansionSet(pw, E0, N, alpha, beta, scaleR, prov), diag
