"""Riccati-Bessel functions of half-integer order lambda = l - 1/2.

For a circular potential the free radial solutions are

    j(z) = sqrt(pi z/2) J_l(z),   y(z) = sqrt(pi z/2) Y_l(z),

with integer-order cylindrical Bessel functions.  Splitting off powers of
k and the logarithm h(k) = (2/pi) ln(kR/2) leaves the "tilded" functions
j~, y~ which are entire in the energy E:

    j(kr) = k^(l+1/2) j~(E, r)
    y(kr) = k^(1/2-l) y~(E, r) + k^(l+1/2) h(k) j~(E, r)

This module also provides their Taylor coefficients in E (s_n and c_n).
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy import special as sp

from .errors import SingularArgumentError

EULER_GAMMA = 0.57721566490153286061

# below this |k r| the tilded functions are summed from their E-power series
SERIES_KR = 3.0


@dataclass(frozen=True)
class PartialWave:
    ell: int = 0

    def __post_init__(self):
        if int(self.ell) != self.ell or self.ell < 0:
            raise ValueError(f"ell must be a non-negative integer, got {self.ell!r}")
        object.__setattr__(self, "ell", int(self.ell))

    @property
    def lam(self):
        return self.ell - 0.5

    @property
    def epsilon(self):
        return 1 if self.ell == 0 else 2


@dataclass(frozen=True)
class LogBranch:
    """Sheet of the energy surface: half-plane of k and winding of ln k."""
    half_plane: str = "upper"
    winding: int = 0

    def __post_init__(self):
        if self.half_plane not in ("upper", "lower"):
            raise ValueError("half_plane must be 'upper' or 'lower'")

    @property
    def name(self):
        base = "physical" if self.half_plane == "upper" else "resonance"
        return base if self.winding == 0 else f"{self.half_plane}{self.winding:+d}"

    @classmethod
    def parse(cls, text):
        t = text.strip().lower()
        if t in ("physical", "upper"):
            return PHYSICAL
        if t in ("resonance", "lower", "unphysical"):
            return RESONANT
        for hp in ("upper", "lower"):
            if t.startswith(hp):
                return cls(hp, int(t[len(hp):]))
        raise ValueError(f"unknown sheet {text!r}")


PHYSICAL = LogBranch("upper", 0)
RESONANT = LogBranch("lower", 0)


def _pw(pw):
    return pw if isinstance(pw, PartialWave) else PartialWave(pw)


def _check_nonzero(z, what):
    if np.any(np.asarray(z) == 0):
        raise SingularArgumentError(f"{what} is singular at zero")


def riccati_jy(pw, z):
    """Riccati-Bessel j and Riccati-Neumann y at complex z."""
    ell = _pw(pw).ell
    z = np.asarray(z, dtype=complex)
    _check_nonzero(z, "y_lambda(z)")
    pref = np.sqrt(np.pi * z / 2)
    return pref * sp.jv(ell, z), pref * sp.yv(ell, z)


def riccati_hankel(pw, z):
    """(h-, h+) = j -/+ i y, evaluated through Hankel functions."""
    ell = _pw(pw).ell
    z = np.asarray(z, dtype=complex)
    _check_nonzero(z, "h(z)")
    pref = np.sqrt(np.pi * z / 2)
    return pref * sp.hankel2(ell, z), pref * sp.hankel1(ell, z)


def riccati_hankel_scaled(ell, z):
    """(h- e^{iz}, h+ e^{-iz}); bounded for large |Im z|."""
    pref = np.sqrt(np.pi * z / 2)
    return pref * sp.hankel2e(ell, z), pref * sp.hankel1e(ell, z)


def riccati_derivatives(pw, z):
    """z-derivatives (j', y') from the order-lowering recurrence."""
    ell = _pw(pw).ell
    z = np.asarray(z, dtype=complex)
    _check_nonzero(z, "y_lambda'(z)")
    pref = np.sqrt(np.pi * z / 2)
    out = []
    for f in (sp.jv, sp.yv):
        c, cm = f(ell, z), f(ell - 1, z)
        # d/dz sqrt(z) C_l = sqrt(z) (C_{l-1} - l C_l/z) + C_l/(2 sqrt z)
        out.append(pref * (cm - ell * c / z + c / (2 * z)))
    return tuple(out)


def log_branch_h(k, scaleR=1.0, branch=PHYSICAL):
    """h(k) = (2/pi) ln(kR/2) on the given sheet.

    The upper sheet takes arg k in (-pi/2, 3pi/2], the lower sheet
    arg k in (-3pi/2, pi/2]; each winding adds 2i.
    """
    k = np.asarray(k, dtype=complex)
    _check_nonzero(k, "h(k)")
    if scaleR <= 0:
        raise ValueError("scaleR must be positive")
    arg = np.angle(k)
    if branch.half_plane == "upper":
        arg = np.where(arg <= -np.pi / 2, arg + 2 * np.pi, arg)
    else:
        arg = np.where(arg > np.pi / 2, arg - 2 * np.pi, arg)
    h = (2 / np.pi) * (np.log(np.abs(k) * scaleR / 2) + 1j * arg) + 2j * branch.winding
    return h[()] if h.ndim == 0 else h


def momentum(E, c2mu, branch=PHYSICAL):
    """k with k**2 = c2mu*E in the half-plane of ``branch``.

    On the positive real E axis k > 0 on both sheets.
    """
    E = np.asarray(E, dtype=complex)
    k = np.sqrt(c2mu * E)
    if branch.half_plane == "upper":
        k = np.where(k.imag < 0, -k, k)
    else:
        k = np.where((k.imag > 0), -k, k)
    return k[()] if k.ndim == 0 else k


def psi_int(n):
    """Digamma at a positive integer: -gamma + sum_{k<n} 1/k."""
    return -EULER_GAMMA + math.fsum(1.0 / j for j in range(1, n))


# -- power series in E --------------------------------------------------------

def f_coeff(ell, n, r):
    """Coefficient of k^(2n) in j~ (power series of the regular function)."""
    x = np.asarray(r) / 2
    return (math.sqrt(math.pi) * (-1) ** n / (math.factorial(n) * math.factorial(n + ell))
            * x ** (2 * n + ell + 0.5))


def g_coeff(ell, n, r, scaleR=1.0):
    """Coefficient of k^(2n) in y~."""
    r = np.asarray(r)
    x = r / 2
    p = x ** (2 * n - ell + 0.5)
    sp_ = math.sqrt(math.pi)
    if n <= ell - 1:
        return -math.factorial(ell - n - 1) / (sp_ * math.factorial(n)) * p
    m = n - ell
    return ((2 / np.pi) * np.log(r / scaleR) * f_coeff(ell, m, r)
            - (-1) ** m * (psi_int(n + 1) + psi_int(m + 1))
            / (sp_ * math.factorial(n) * math.factorial(m)) * p)


def _series_tilde(nu, k2, r, scaleR, max_terms=200):
    """Sum j~ and y~ from their power series in k2 = c2mu*E (nu >= 0)."""
    x = r / 2
    w = -k2 * x * x
    spi = math.sqrt(math.pi)
    base = x ** (nu + 0.5)
    # j~ and the digamma-weighted companion sum of y~
    t = base / math.factorial(nu)
    jt = t.copy()
    ysum = (psi_int(1) + psi_int(nu + 1)) * t
    small = 0
    for m in range(1, max_terms):
        t = t * w / (m * (m + nu))
        jt = jt + t
        dy = (psi_int(m + 1) + psi_int(m + nu + 1)) * t
        ysum = ysum + dy
        tiny = np.abs(t) <= 1e-16 * np.abs(jt)
        tiny &= np.abs(dy) <= 1e-16 * np.abs(ysum)
        small = small + 1 if np.all(tiny) else 0
        if small >= 2:
            break
    jt = spi * jt
    k2nu = k2 ** nu
    yt = (2 / np.pi) * np.log(r / scaleR) * k2nu * jt - k2nu * ysum / spi
    for n in range(nu):
        yt = yt - (math.factorial(nu - n - 1) / (spi * math.factorial(n))
                   * k2 ** n * x ** (2 * n - nu + 0.5))
    return jt, yt


def _intpow(z, n):
    """z**n for integer n (an integer power is single-valued)."""
    return z ** int(n)


def _bessel_tilde(nu, k, r, scaleR):
    """T_nu = sqrt(pi r/2) k^nu [Y_nu(kr) - h J_nu(kr)] and sqrt(pi r/2) J_nu(kr).

    Valid for any integer nu; k may be either root.
    """
    z = k * r
    pref = np.sqrt(np.pi * r / 2)
    J = sp.jv(nu, z)
    Yhat = sp.yv(nu, z) - (2 / np.pi) * np.log(z / 2) * J
    return pref * _intpow(k, nu) * (Yhat + (2 / np.pi) * np.log(r / scaleR) * J), pref * J


def _broadcast(E, r):
    E, r = np.broadcast_arrays(np.asarray(E, dtype=complex), np.asarray(r, dtype=complex))
    return E.copy(), r.copy()


def _tilde_nu(nu, k2, r, scaleR):
    k = np.sqrt(k2)
    use_series = np.abs(k * r) < SERIES_KR
    jt = np.empty_like(r)
    yt = np.empty_like(r)
    if np.any(use_series):
        (js,), (ys,) = _sc_series(nu, k2[use_series], r[use_series], 1.0, 0, scaleR)
        jt[use_series], yt[use_series] = js, ys
    big = ~use_series
    if np.any(big):
        kb, rb = k[big], r[big]
        T, PJ = _bessel_tilde(nu, kb, rb, scaleR)
        jt[big] = PJ / _intpow(kb, nu)
        yt[big] = T
    return jt, yt


def tilde_jy(pw, E, r, units, scaleR=1.0):
    """Single-valued parts (j~, y~) at energy E and radius r."""
    ell = _pw(pw).ell
    E, r = _broadcast(E, r)
    _check_nonzero(r, "y~(r)")
    jt, yt = _tilde_nu(ell, units.c2mu * E, r, scaleR)
    return (jt[()], yt[()]) if jt.ndim == 0 else (jt, yt)


# -- Taylor coefficients in E -------------------------------------------------

@lru_cache(maxsize=None)
def _derivative_terms(n):
    """n-th E-derivative of T_nu as a sum of terms, in units of a**n.

    Keys: ('T', dnu, p) for r**p T_{nu+dnu} and ('F', dnu, m, p) for
    r**p F_{nu+dnu, m} with F_{mu,m} = k^(mu-2m) sqrt(pi r/2) J_mu(kr).
    """
    terms = {("T", 0, 0): 1.0}
    for _ in range(n):
        new = {}
        for key, c in terms.items():
            if key[0] == "T":
                _, d, p = key
                out = [(("T", d - 1, p + 1), c), (("F", d, 1, p), -2 * c / np.pi)]
            else:
                _, d, m, p = key
                out = [(("F", d, m + 1, p), -2 * m * c), (("F", d - 1, m, p + 1), c)]
            for k_, v in out:
                new[k_] = new.get(k_, 0.0) + v
        terms = {k_: v for k_, v in new.items() if v != 0}
    return tuple(terms.items())


@lru_cache(maxsize=None)
def _recurrence_tables(n_max):
    """Dense form of _derivative_terms for n = 0..n_max.

    Values are ordered T_{l-d} (d = 0..n_max), then F_{l-d, m}
    (d = 0..n_max, m = 1..n_max).  Returns coef[n, p, value] and, for the
    F entries, the order offset d and the power of k, mu - 2m = l - d - 2m.
    """
    nT = n_max + 1
    nvals = nT + nT * n_max
    coef = np.zeros((n_max + 1, n_max + 1, nvals))
    for n in range(n_max + 1):
        for key, c in _derivative_terms(n):
            if key[0] == "T":
                _, d, p = key
                idx = -d
            else:
                _, d, m, p = key
                idx = nT + (-d) * n_max + (m - 1)
            coef[n, p, idx] += c / math.factorial(n)
    d_of = np.array([d for d in range(nT) for m in range(1, n_max + 1)])
    m_of = np.array([m for d in range(nT) for m in range(1, n_max + 1)])
    return coef, d_of, m_of


def _sc_recurrence(ell, k, r, a, n_max, scaleR):
    """s_n and c_n from closed forms at |k r| away from zero."""
    z = k * r
    pref = np.sqrt(np.pi * r / 2)
    lo = ell - n_max
    orders = np.arange(lo, ell + n_max + 1)
    J = sp.jv(orders[:, None], z[None, :])          # rows: order lo..l+n_max
    Y = sp.yv(orders[:n_max + 1][::-1, None], z[None, :])  # orders l..lo
    logs = (2 / np.pi) * (np.log(r / scaleR) - np.log(z / 2))
    Jdown = J[:n_max + 1][::-1]                     # orders l, l-1, ..., lo
    kpow_T = k[None, :] ** (ell - np.arange(n_max + 1))[:, None]
    T = pref * kpow_T * (Y + logs * Jdown)
    n = np.arange(n_max + 1)
    fact = np.array([math.factorial(i) for i in n], dtype=float)
    Jup = J[n_max:]                                 # orders l..l+n_max
    s = ((-a * r)[None, :] ** n[:, None] / fact[:, None] * pref * Jup
         / k[None, :] ** (ell + n)[:, None])
    if n_max == 0:
        return s, T[:1]
    coef, d_of, m_of = _recurrence_tables(n_max)
    F = k[None, :] ** (ell - d_of - 2 * m_of)[:, None] * pref * Jdown[d_of]
    V = np.concatenate([T, F])
    rp = r[None, :] ** n[:, None]                   # r^p
    c = np.einsum("npv,vm,pm->nm", coef, V, rp) * (a ** n)[:, None]
    return s, c


@lru_cache(maxsize=None)
def _series_tables(ell, M):
    """Constant parts of f_m and g_m, m = 0..M, as arrays (F, P, Q).

    f_m = F_m x^(2m+l+1/2) and g_m = (P_m + Q_m ln(r/R)) x^(2m-l+1/2), x = r/2.
    """
    spi = math.sqrt(math.pi)
    F = np.array([spi * (-1) ** m / (math.factorial(m) * math.factorial(m + ell))
                  for m in range(M + 1)])
    P = np.empty(M + 1)
    Q = np.zeros(M + 1)
    for m in range(M + 1):
        if m < ell:
            P[m] = -math.factorial(ell - m - 1) / (spi * math.factorial(m))
        else:
            j = m - ell
            P[m] = (-(-1) ** j * (psi_int(m + 1) + psi_int(j + 1))
                    / (spi * math.factorial(m) * math.factorial(j)))
            Q[m] = (2 / np.pi) * F[j]
    return F, P, Q


def _sc_series(ell, k2, r, c2mu, n_max, scaleR, extra=34):
    """s_n and c_n by shifting the E-power series to E0 = k2/c2mu."""
    M = n_max + extra
    F, P, Q = _series_tables(ell, M)
    x = r / 2
    u = c2mu * x * x
    q = k2 * x * x
    J = extra + 1
    qp = np.ones((J,) + r.shape, dtype=complex)
    for j in range(1, J):
        qp[j] = qp[j - 1] * q
    L = np.log(r / scaleR)
    xs, xc = x ** (ell + 0.5), x ** (0.5 - ell)
    s, c = [], []
    un = np.ones_like(u)
    for n in range(n_max + 1):
        w = np.array([math.comb(n + j, n) for j in range(J)], dtype=float)
        m = slice(n, n + J)
        s.append(xs * un * np.tensordot(w * F[m], qp, 1))
        c.append(xc * un * (np.tensordot(w * P[m], qp, 1) + L * np.tensordot(w * Q[m], qp, 1)))
        un = un * u
    return s, c


def taylor_sc(ell, E0, r, n_max, c2mu, scaleR=1.0):
    """Arrays (s, c) of shape (n_max+1,) + shape of broadcast(E0, r)."""
    E0, r = _broadcast(E0, r)
    shape = r.shape
    E0, r = E0.ravel(), r.ravel()
    k2 = c2mu * E0
    k = np.sqrt(k2)
    a = c2mu / 2
    S = np.empty((n_max + 1, r.size), dtype=complex)
    C = np.empty_like(S)
    ser = np.abs(k * r) < SERIES_KR
    if np.any(ser):
        s, c = _sc_series(ell, k2[ser], r[ser], c2mu, n_max, scaleR)
        S[:, ser], C[:, ser] = np.array(s), np.array(c)
    big = ~ser
    if np.any(big):
        S[:, big], C[:, big] = _sc_recurrence(ell, k[big], r[big], a, n_max, scaleR)
    return S.reshape((n_max + 1,) + shape), C.reshape((n_max + 1,) + shape)


def taylor_s_coeffs(pw, E0, r, n_max, units, scaleR=1.0):
    """s_n = (1/n!) d^n j~/dE^n at E0."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    S, _ = taylor_sc(_pw(pw).ell, E0, r, n_max, units.c2mu, scaleR)
    return S


def taylor_c_coeffs(pw, E0, r, n_max, units, scaleR=1.0):
    """c_n = (1/n!) d^n y~/dE^n at E0."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    _, C = taylor_sc(_pw(pw).ell, E0, r, n_max, units.c2mu, scaleR)
    return C
