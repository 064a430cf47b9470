import math

import numpy as np
import pytest

from jost2d import (BarrierWellPotential, CallablePotential, ConfigError, DONOR_UNITS,
                    NoExponentialDecayError, TabulatedPotential, UnitSystem,
                    UnsupportedEvaluationError, ZeroPotential, c2mu_from_units,
                    decay_constant, potential_from_config, reduced_potential)
from jost2d.potential import read_keyvalue


def test_donor_c2mu_from_codata():
    # hbar^2/(2 m* m_e) in eV A^2, then expressed in (10.96 meV)(101.89 A)^2
    hb2m = 1973.269718 ** 2 / (2 * 510998.928 * 0.063)
    expected = 10.96e-3 * 101.89 ** 2 / hb2m
    assert DONOR_UNITS.c2mu == pytest.approx(expected, rel=1e-15)
    assert DONOR_UNITS.c2mu == pytest.approx(1.8814440607956766, rel=1e-14)
    assert DONOR_UNITS.hbar2_over_mu * DONOR_UNITS.c2mu == pytest.approx(2.0)


def test_explicit_c2mu_wins():
    u = UnitSystem(c2mu=2.0)
    assert u.c2mu == 2.0
    assert u.k2(3.0) == 6.0
    with pytest.raises(ValueError):
        UnitSystem(c2mu=-1.0)


def test_c2mu_scales_with_units():
    base = c2mu_from_units(10.0, 100.0, 0.1)
    assert c2mu_from_units(20.0, 100.0, 0.1) == pytest.approx(2 * base)
    assert c2mu_from_units(10.0, 200.0, 0.1) == pytest.approx(4 * base)
    assert c2mu_from_units(10.0, 100.0, 0.2) == pytest.approx(2 * base)


def test_barrier_well_shape():
    U = BarrierWellPotential()
    assert U(0.0) == -50.0
    assert U(2.0) == 0.0
    # maximum of the barrier at r = r0 + R
    assert U(4.0) == pytest.approx(50 * math.exp(-2))
    assert U.eta == 0.5
    z = 3.0 - 1.0j
    assert U(z) == pytest.approx(25 * (z - 2) * np.exp(-z / 2))


def test_reduced_potential():
    U = BarrierWellPotential()
    r = np.linspace(0.1, 5, 7)
    assert np.allclose(reduced_potential(U, DONOR_UNITS, r), DONOR_UNITS.c2mu * U(r))


def test_zero_potential():
    Z = ZeroPotential()
    assert np.all(Z(np.array([0.5, 2 + 1j])) == 0)
    assert Z.eta == math.inf
    assert Z.is_zero()


def test_decay_constant_required():
    f = CallablePotential(lambda r: np.exp(-r * r))
    with pytest.raises(NoExponentialDecayError):
        decay_constant(f)
    assert decay_constant(BarrierWellPotential(R=4.0)) == 0.25


def test_callable_non_analytic_rejects_complex():
    f = CallablePotential(lambda r: np.abs(r), eta=1.0, analytic=False)
    assert f(2.0) == 2.0
    with pytest.raises(UnsupportedEvaluationError):
        f(np.array([1 + 1j]))


def test_tabulated_interpolates_and_tails():
    U = BarrierWellPotential()
    r = np.linspace(0, 30, 3001)
    T = TabulatedPotential(r, U(r), eta=0.5)
    x = np.array([0.123, 1.7, 4.05, 12.3])
    assert np.allclose(T(x), U(x), atol=1e-9, rtol=1e-8)
    # beyond the grid: exponential continuation of the last value
    assert T(32.0) == pytest.approx(U(30.0) * math.exp(-1.0))
    with pytest.raises(UnsupportedEvaluationError):
        T(np.array([2.0 - 0.1j]))
    # purely real complex input is fine
    assert T(np.array([1.7 + 0j]))[0] == pytest.approx(U(1.7), rel=1e-8)


def test_read_keyvalue_comments_and_lines():
    cfg = read_keyvalue(["# header", "", "V0 = 10  # inline", "kind=barrier-well"])
    assert cfg["V0"] == ("10", 3)
    assert cfg["kind"] == ("barrier-well", 4)


@pytest.mark.parametrize("lines, key, line", [
    (["V0 = 1", "junk"], None, 2),
    (["V0 = 1", "V0 = 2"], "V0", 2),
    (["= 3"], None, 1),
])
def test_read_keyvalue_errors(lines, key, line):
    with pytest.raises(ConfigError) as ei:
        read_keyvalue(lines)
    assert ei.value.line == line
    assert ei.value.key == key


def test_potential_from_config():
    pot, units = potential_from_config(read_keyvalue(["V0 = 10", "R = 1"]))
    assert pot == BarrierWellPotential(10.0, 2.0, 1.0)
    assert units.c2mu == DONOR_UNITS.c2mu
    pot, units = potential_from_config(read_keyvalue(["kind = zero", "c2mu = 2"]))
    assert isinstance(pot, ZeroPotential) and units.c2mu == 2.0


@pytest.mark.parametrize("lines, key", [
    (["V0 = ten"], "V0"),
    (["kind = square"], "kind"),
    (["R = -1"], "R"),
    (["kind = tabulated"], "table"),
])
def test_potential_from_config_errors(lines, key):
    with pytest.raises(ConfigError) as ei:
        potential_from_config(read_keyvalue(lines))
    assert ei.value.key == key
    assert key in str(ei.value)


def test_tabulated_from_config(tmp_path):
    r = np.linspace(0, 20, 401)
    path = tmp_path / "u.csv"
    np.savetxt(path, np.column_stack([r, np.exp(-r)]), delimiter=",")
    pot, _ = potential_from_config(read_keyvalue([f"kind = tabulated", f"table = {path}",
                                                  "eta = 1"]))
    assert pot(1.0) == pytest.approx(math.exp(-1), rel=1e-6)
    assert pot.eta == 1.0
