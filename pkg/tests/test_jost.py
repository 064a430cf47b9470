import cmath
import math

import numpy as np
import pytest

from jost2d import (Contour, PHYSICAL, RESONANT, JostPair, LogBranch, PoleWarning,
                    RiemannPoint, SingularArgumentError, ZeroPotential, assemble_jost,
                    build_contour, in_domain_D, jost_direct, jost_factorized, s_matrix)
from jost2d.contour import growth_excess
from jost2d.jost import k_power

CUT = Contour(r_max=25.0)


def test_k_power(units):
    for k2 in (2.0, -3.0 + 1j, 0.5j):
        for ell in range(6):
            assert k_power(k2, ell) == pytest.approx(k2 ** ell, rel=1e-14)


def test_riemann_point(units):
    p = RiemannPoint(-4.0, PHYSICAL)
    assert p.k(units) == pytest.approx(1j * math.sqrt(4 * units.c2mu))
    assert RiemannPoint(-4.0 + 1e-3j, RESONANT).k(units).imag < 0
    with pytest.raises(SingularArgumentError):
        RiemannPoint(0.0).k(units)
    h = RiemannPoint(2.0).h(units)
    assert h == pytest.approx(2 / math.pi * math.log(math.sqrt(2 * units.c2mu) / 2))


@pytest.mark.parametrize("ell", [0, 1, 2])
@pytest.mark.parametrize("E, branch", [(0.8, PHYSICAL), (7.0, PHYSICAL), (-0.02, PHYSICAL),
                                       (6.0 - 0.5j, RESONANT), (2.0 + 0.3j, PHYSICAL)])
def test_direct_and_factorized_agree(pot, units, ell, E, branch):
    at = RiemannPoint(E, branch)
    ray = build_contour(E, units, base=CUT)
    d = jost_direct(pot, ell, at, ray, units)
    f = jost_factorized(pot, ell, at, ray, units, strict_domain=True)
    scale = max(abs(d.f_in), abs(d.f_out))
    assert abs(d.f_in - f.f_in) <= 1e-8 * scale
    assert abs(d.f_out - f.f_out) <= 1e-8 * scale
    assert d.source == "direct" and f.source == "factorized"


@pytest.mark.parametrize("E", [0.3, 2.5, 11.0])
def test_real_energy_symmetry(pot, units, E):
    jp = jost_direct(pot, 0, RiemannPoint(E), CUT, units)
    assert jp.f_out == pytest.approx(jp.f_in.conjugate(), rel=1e-12)
    assert abs(s_matrix(jp)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("E", [1.5, 6.0])
def test_sheets_join_across_positive_axis(pot, units, E):
    eps = 1e-9
    up = jost_factorized(pot, 0, RiemannPoint(E + 1j * eps, PHYSICAL), CUT, units)
    down = jost_factorized(pot, 0, RiemannPoint(E - 1j * eps, RESONANT), CUT, units)
    same = jost_factorized(pot, 0, RiemannPoint(E - 1j * eps, PHYSICAL), CUT, units)
    assert up.f_in == pytest.approx(down.f_in, rel=1e-7)
    # the physical sheet itself jumps across the cut
    assert abs(up.f_in - same.f_in) > 1e-3 * abs(up.f_in)


def test_windings_differ_by_log_period(pot, units):
    E = 4.0 - 0.2j
    a = jost_factorized(pot, 1, RiemannPoint(E, LogBranch("upper", 0)), CUT, units)
    b = jost_factorized(pot, 1, RiemannPoint(E, LogBranch("upper", 1)), CUT, units)
    sol = a.info["solution"]
    bt = sol.values[1, 0]
    k2 = units.c2mu * E
    # h shifts by 2i, so f_in and f_out both shift by i k^2 bt
    assert b.f_in - a.f_in == pytest.approx(1j * k2 * bt, rel=1e-12)
    assert b.f_out - a.f_out == pytest.approx(1j * k2 * bt, rel=1e-12)


def test_assemble_matches_formula(units):
    at = RiemannPoint(3.0 - 1.0j, RESONANT)
    jp = assemble_jost(0.7 + 0.1j, -0.2 + 0.05j, 2, at, units)
    k = at.k(units)
    h = at.h(units)
    kp = k ** 4
    assert jp.f_in == pytest.approx(0.5 * (0.7 + 0.1j + kp * (h - 1j) * (-0.2 + 0.05j)))
    assert jp.f_out == pytest.approx(0.5 * (0.7 + 0.1j + kp * (h + 1j) * (-0.2 + 0.05j)))


def test_free_particle(units):
    jp = jost_direct(ZeroPotential(), 3, RiemannPoint(2.0 - 1.0j, RESONANT), Contour(), units)
    assert jp.f_in == 0.5 and jp.f_out == 0.5 and s_matrix(jp) == 1.0


def test_s_matrix_pole_warning():
    jp = JostPair(1e-12, 0.4 + 0.3j, RiemannPoint(-1.0))
    with pytest.warns(PoleWarning):
        s = s_matrix(jp)
    assert cmath.isinf(s)
    assert JostPair(0.5, 0.5j).s_matrix() == 1j


def test_in_domain_real_axis(units):
    eta, c = 0.5, units.c2mu
    # boundary parabola Im E^2 = eta^4/(4c^2) + eta^2 Re E / c
    for x in (-0.03, 0.0, 2.0, 10.0):
        y = math.sqrt(eta ** 4 / (4 * c * c) + eta ** 2 * x / c)
        assert in_domain_D(x + 0.99 * y * 1j, eta, 0.0, units)
        assert not in_domain_D(x + 1.01 * y * 1j, eta, 0.0, units)
    assert not in_domain_D(-1.0, eta, 0.0, units)


def test_in_domain_matches_growth_condition(units):
    rng = np.random.default_rng(3)
    for _ in range(400):
        E = complex(rng.uniform(-2, 12), rng.uniform(-4, 4))
        th = rng.uniform(-1.2, 1.2)
        k = np.sqrt(units.c2mu * E)
        exc = growth_excess(k, th, 0.5)
        if abs(exc) > 1e-9:
            assert in_domain_D(E, 0.5, th, units) == (exc < 0)


def test_in_domain_arguments(units):
    with pytest.raises(ValueError):
        in_domain_D(1.0, 0.0)
    with pytest.raises(ValueError):
        in_domain_D(1.0, 0.5, math.pi / 2)
