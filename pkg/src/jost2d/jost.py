"""Jost functions and the S-matrix on the sheets of the energy surface.

All multivaluedness sits in k^(2l) (single-valued) and h(k); the pair
(a~, b~) is single-valued, so one integration serves every sheet:

    f_in/out = (a~ + k^(2l) [h(k) -/+ i] b~) / 2
"""
from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from .contour import Contour, build_contour, expansion_batch, finout_on_sheet
from .errors import PoleWarning, SingularArgumentError
from .potential import DONOR_UNITS
from .riccati import PHYSICAL, RESONANT, LogBranch, log_branch_h, momentum, _pw


@dataclass(frozen=True)
class RiemannPoint:
    """A complex energy pinned to a sheet."""
    E: complex
    branch: LogBranch = PHYSICAL

    def k(self, units=DONOR_UNITS):
        if self.E == 0:
            raise SingularArgumentError("E = 0 is the branch point")
        return complex(momentum(self.E, units.c2mu, self.branch))

    def h(self, units=DONOR_UNITS, scaleR=1.0):
        return complex(log_branch_h(self.k(units), scaleR, self.branch))


@dataclass
class JostPair:
    f_in: complex
    f_out: complex
    at: RiemannPoint = None
    source: str = "direct"
    info: dict = field(default_factory=dict, repr=False)

    def s_matrix(self):
        return s_matrix(self)


def k_power(k2, ell):
    """k^(2 ell) = (k^2)^ell by repeated squaring."""
    out = 1.0 + 0j
    base = k2
    n = ell
    while n:
        if n & 1:
            out *= base
        base *= base
        n >>= 1
    return out


def assemble_jost(atilde, btilde, pw, at, units=DONOR_UNITS, scaleR=1.0, source="factorized"):
    """Jost functions at ``at`` from the single-valued pair."""
    ell = _pw(pw).ell
    k = at.k(units)
    h = complex(log_branch_h(k, scaleR, at.branch))
    kp = k_power(units.c2mu * complex(at.E), ell)
    f_in = 0.5 * (atilde + kp * (h - 1j) * btilde)
    f_out = 0.5 * (atilde + kp * (h + 1j) * btilde)
    return JostPair(f_in, f_out, at, source)


def s_matrix(jp, pole_tol=1e-8):
    """S = f_out / f_in; a vanishing f_in returns complex infinity and warns."""
    scale = abs(jp.f_out) if np.isfinite(jp.f_out) else 1.0
    if abs(jp.f_in) <= pole_tol * scale:
        warnings.warn(f"f_in vanishes at E = {jp.at.E if jp.at else '?'}: S-matrix pole",
                      PoleWarning, stacklevel=2)
        return complex(math.inf, 0.0)
    return jp.f_out / jp.f_in


def in_domain_D(E, eta, theta=0.0, units=DONOR_UNITS):
    """Is E inside the parabolic analyticity domain for rotation theta?"""
    if not eta > 0:
        raise ValueError("eta must be positive")
    if not abs(theta) < math.pi / 2:
        raise ValueError("|theta| must be below pi/2")
    E = complex(E)
    c = units.c2mu
    if theta == 0:
        return E.imag ** 2 < eta ** 4 / (4 * c * c) + eta ** 2 / c * E.real
    if E == 0:
        return True
    chi = math.atan2(E.imag, E.real)
    return math.sin(chi / 2 - theta) ** 2 < eta ** 2 * math.cos(theta) ** 2 / (4 * c * abs(E))


def jost_direct(pot, pw, at, contour=None, units=DONOR_UNITS):
    """JostPair from the F_in/F_out system (nan for a divergent component)."""
    if contour is None:
        contour = build_contour(at.E, units)
    sol = finout_on_sheet(pot, pw, at.E, at.branch, contour.theta, contour, units)
    fi, fo = sol.values[:, 0]
    return JostPair(complex(fi), complex(fo), at, "direct", {"solution": sol})


def jost_factorized(pot, pw, at, contour=None, units=DONOR_UNITS, scaleR=1.0,
                    strict_domain=False):
    """JostPair through (a~, b~) and assemble_jost."""
    contour = contour or Contour()
    sol = expansion_batch(pot, pw, at.E, 0, contour.theta, contour, units, scaleR,
                          strict_domain)
    at_, bt_ = sol.values[:, 0]
    jp = assemble_jost(at_, bt_, pw, at, units, scaleR)
    jp.info["solution"] = sol
    return jp


__all__ = ["RiemannPoint", "JostPair", "assemble_jost", "s_matrix", "in_domain_D",
           "jost_direct", "jost_factorized", "k_power", "PHYSICAL", "RESONANT"]
