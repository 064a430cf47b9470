"""Circularly symmetric potentials and the unit system they live in.

Energies are measured in a fixed energy unit and lengths in a length
unit, so the only physical constant left in the radial equation is
c2mu = 2*mu/hbar**2 in those units (k**2 = c2mu * E).
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (ConfigError, NoExponentialDecayError,
                     UnsupportedEvaluationError)

# CODATA 2010
HBARC_EV_ANGSTROM = 1973.269718
ELECTRON_MASS_EV = 510998.928


def c2mu_from_units(energy_unit_meV, length_unit_angstrom, mass_ratio):
    """2*mu/hbar**2 expressed in the given energy and length units."""
    hb2m = HBARC_EV_ANGSTROM**2 / (2.0 * ELECTRON_MASS_EV * mass_ratio)  # eV A^2
    return energy_unit_meV * 1e-3 * length_unit_angstrom**2 / hb2m


@dataclass(frozen=True)
class UnitSystem:
    """Energy/length units plus the derived constant c2mu.

    The defaults are the effective donor units of GaAs (m* = 0.063 m_e).
    When ``c2mu`` is not given it is derived from the units and the mass.
    """
    energy_unit_meV: float = 10.96
    length_unit_angstrom: float = 101.89
    mass_ratio: float = 0.063
    c2mu: float = None

    def __post_init__(self):
        if self.c2mu is None:
            object.__setattr__(self, "c2mu", c2mu_from_units(
                self.energy_unit_meV, self.length_unit_angstrom, self.mass_ratio))
        if not self.c2mu > 0:
            raise ValueError("c2mu must be positive")

    @property
    def hbar2_over_mu(self):
        return 2.0 / self.c2mu

    def k2(self, E):
        return self.c2mu * E


DONOR_UNITS = UnitSystem()


class RadialPotential:
    """Base class: ``U(r)`` in energy units, ``eta`` the tail decay rate."""
    analytic = True
    eta = None

    def __call__(self, r):
        raise NotImplementedError

    def is_zero(self):
        return False


@dataclass(frozen=True)
class BarrierWellPotential(RadialPotential):
    """U(r) = V0 (r - r0) exp(-r/R): a well inside r0, a barrier outside."""
    V0: float = 25.0
    r0: float = 2.0
    R: float = 2.0

    def __call__(self, r):
        r = np.asarray(r)
        return self.V0 * (r - self.r0) * np.exp(-r / self.R)

    @property
    def eta(self):
        return 1.0 / self.R

    def is_zero(self):
        return self.V0 == 0


@dataclass(frozen=True)
class ZeroPotential(RadialPotential):
    """The free particle."""

    def __call__(self, r):
        return np.zeros_like(np.asarray(r, dtype=complex))

    @property
    def eta(self):
        return math.inf

    def is_zero(self):
        return True


@dataclass(frozen=True)
class CallablePotential(RadialPotential):
    """Wrap a user function ``func(r)``.

    ``eta`` is the exponential decay rate of the tail (None if unknown) and
    ``analytic`` says whether ``func`` accepts complex radii.
    """
    func: object = None
    eta: float = None
    analytic: bool = True

    def __call__(self, r):
        r = np.asarray(r)
        if np.iscomplexobj(r) and np.any(r.imag != 0) and not self.analytic:
            raise UnsupportedEvaluationError("callable potential is not analytic")
        return self.func(r)


@dataclass(frozen=True, eq=False)
class TabulatedPotential(RadialPotential):
    """Cubic-spline interpolation of U on a real grid.

    Beyond the last grid point the tail ``U_last*exp(-eta*(r - r_last))``
    is used when ``eta`` is given, otherwise U is taken as zero there.
    Complex radii are not supported.
    """
    r: np.ndarray = None
    U: np.ndarray = None
    eta: float = None
    analytic: bool = field(default=False, init=False)

    def __post_init__(self):
        object.__setattr__(self, "_spline", CubicSpline(np.asarray(self.r, float),
                                                        np.asarray(self.U, float)))

    def __call__(self, r):
        r = np.asarray(r)
        if np.iscomplexobj(r):
            if np.any(r.imag != 0):
                raise UnsupportedEvaluationError(
                    "tabulated potential cannot be evaluated at complex radius")
            r = r.real
        rl = self.r[-1]
        inside = self._spline(np.minimum(r, rl))
        if self.eta is None:
            tail = 0.0
        else:
            tail = self.U[-1] * np.exp(-self.eta * (r - rl))
        return np.where(r <= rl, inside, tail)


def reduced_potential(pot, units, r):
    """V(r) = c2mu * U(r), in 1/length**2."""
    return units.c2mu * pot(r)


def decay_constant(pot):
    """Exponential decay rate eta of the potential tail."""
    eta = getattr(pot, "eta", None)
    if eta is None:
        raise NoExponentialDecayError(f"{type(pot).__name__} has no exponential tail")
    return eta


# -- config ----------------------------------------------------------------

def read_keyvalue(path_or_lines):
    """Parse ``key = value`` lines; '#' starts a comment.

    Returns ``{key: (value_string, line_number)}``.
    """
    if isinstance(path_or_lines, str):
        with open(path_or_lines) as fh:
            lines = fh.read().splitlines()
    else:
        lines = list(path_or_lines)
    out = {}
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=no)
        key, val = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=no)
        if key in out:
            raise ConfigError(f"duplicate key {key!r}", key=key, line=no)
        out[key] = (val, no)
    return out


def _number(cfg, key, default):
    if key not in cfg:
        return default
    val, no = cfg[key]
    try:
        return float(val)
    except ValueError:
        raise ConfigError(f"key {key!r}: not a number: {val!r}", key=key, line=no) from None


def potential_from_config(cfg):
    """Build ``(potential, units)`` from a parsed key/value mapping."""
    kind, no = cfg.get("kind", ("barrier-well", None))
    units = UnitSystem(energy_unit_meV=_number(cfg, "energy_unit_meV", 10.96),
                       length_unit_angstrom=_number(cfg, "length_unit_angstrom", 101.89),
                       mass_ratio=_number(cfg, "mass_ratio", 0.063),
                       c2mu=_number(cfg, "c2mu", None))
    if kind in ("barrier-well", "builtin"):
        V0 = _number(cfg, "V0", 25.0)
        R = _number(cfg, "R", 2.0)
        if R <= 0:
            raise ConfigError("key 'R': must be positive", key="R", line=cfg["R"][1])
        pot = BarrierWellPotential(V0, _number(cfg, "r0", 2.0), R)
    elif kind in ("zero", "free"):
        pot = ZeroPotential()
    elif kind == "tabulated":
        if "table" not in cfg:
            raise ConfigError("tabulated potential needs key 'table'", key="table")
        path, tno = cfg["table"]
        try:
            data = np.loadtxt(path, comments="#", delimiter=",", ndmin=2)
        except OSError as exc:
            raise ConfigError(f"key 'table': {exc}", key="table", line=tno) from None
        pot = TabulatedPotential(data[:, 0], data[:, 1], _number(cfg, "eta", None))
    else:
        raise ConfigError(f"key 'kind': unknown potential kind {kind!r}", key="kind", line=no)
    return pot, units
