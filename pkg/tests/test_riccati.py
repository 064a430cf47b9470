import math

import numpy as np
import pytest

from jost2d import (DONOR_UNITS, PHYSICAL, RESONANT, LogBranch, PartialWave,
                    SingularArgumentError, log_branch_h, momentum, riccati_derivatives,
                    riccati_hankel, riccati_jy, taylor_c_coeffs, taylor_s_coeffs, tilde_jy)
from jost2d.riccati import SERIES_KR, riccati_hankel_scaled

from oracles import central_derivative, riccati_jy_oracle, taylor_stencil

ZS = [0.05, 0.7, 2.5 + 0.3j, 6.0 - 2.0j, 11.0 + 4.0j, 25.0, -1.5 + 2.0j]


@pytest.mark.parametrize("ell", [0, 1, 2, 5])
@pytest.mark.parametrize("z", ZS)
def test_riccati_jy_against_series_oracle(ell, z):
    j, y = riccati_jy(ell, z)
    jo, yo = riccati_jy_oracle(ell, z)
    assert abs(j - jo) <= 1e-12 * max(abs(jo), 1e-300)
    assert abs(y - yo) <= 1e-12 * abs(yo)


@pytest.mark.parametrize("ell", [0, 3])
def test_hankel_pair(ell):
    z = np.array([0.3, 4.0 + 1j, 9.0 - 0.5j])
    j, y = riccati_jy(ell, z)
    hm, hp = riccati_hankel(ell, z)
    assert np.allclose(hm, j - 1j * y, rtol=1e-13)
    assert np.allclose(hp, j + 1j * y, rtol=1e-13)
    sm, sp_ = riccati_hankel_scaled(ell, z)
    assert np.allclose(sm * np.exp(-1j * z), hm, rtol=1e-13)
    assert np.allclose(sp_ * np.exp(1j * z), hp, rtol=1e-13)


@pytest.mark.parametrize("ell", [0, 1, 4])
@pytest.mark.parametrize("z", [0.9, 3.0 + 1.0j, 12.0 - 3.0j])
def test_derivatives_against_difference_stencil(ell, z):
    dj, dy = riccati_derivatives(ell, z)
    h = 1e-3
    fj = lambda x: riccati_jy_oracle(ell, x)[0]
    fy = lambda x: riccati_jy_oracle(ell, x)[1]
    assert dj == pytest.approx(central_derivative(fj, z, h), rel=1e-9, abs=1e-12)
    assert dy == pytest.approx(central_derivative(fy, z, h), rel=1e-9)


@pytest.mark.parametrize("ell", [0, 2])
def test_wronskian_examples(ell):
    z = np.array([0.2, 1.0 + 1.0j, 7.5 - 2.0j])
    j, y = riccati_jy(ell, z)
    dj, dy = riccati_derivatives(ell, z)
    assert np.allclose(j * dy - dj * y, 1.0, rtol=0, atol=1e-12)


def test_singular_argument():
    with pytest.raises(SingularArgumentError):
        riccati_jy(0, 0.0)
    with pytest.raises(SingularArgumentError):
        riccati_hankel(1, np.array([1.0, 0.0]))
    with pytest.raises(SingularArgumentError):
        log_branch_h(0.0)


def test_partial_wave():
    assert PartialWave(0).epsilon == 1 and PartialWave(3).epsilon == 2
    assert PartialWave(2).lam == 1.5
    for bad in (-1, 1.5):
        with pytest.raises(ValueError):
            PartialWave(bad)


@pytest.mark.parametrize("ell", [0, 1, 3])
@pytest.mark.parametrize("E, r", [(2.0, 0.7), (3.0 - 1.0j, 1.3), (-4.0 + 0.5j, 2.0),
                                  (12.0, 3.0), (0.3 + 0.2j, 9.0)])
def test_tilde_factorization_against_oracle(ell, E, r):
    c = DONOR_UNITS.c2mu
    k = np.sqrt(c * complex(E))
    jt, yt = tilde_jy(ell, E, r, DONOR_UNITS)
    jo, yo = riccati_jy_oracle(ell, k * r)
    h = log_branch_h(k, 1.0, PHYSICAL)
    assert jo == pytest.approx(k ** (ell + 0.5) * jt, rel=1e-11)
    assert yo == pytest.approx(k ** (0.5 - ell) * yt + k ** (ell + 0.5) * h * jt, rel=1e-10)


@pytest.mark.parametrize("ell", [0, 2])
def test_tilde_routes_agree_at_switch(ell):
    c = DONOR_UNITS.c2mu
    r = 1.0
    for phase in (0.0, 0.4, -1.1, 2.5):
        for kr in (SERIES_KR * (1 - 1e-9), SERIES_KR * (1 + 1e-9)):
            k = kr * np.exp(1j * phase)
            E = k * k / c
            a = tilde_jy(ell, E, r, DONOR_UNITS)
            b = tilde_jy(ell, E * (1 + 2e-9), r, DONOR_UNITS)
            assert a[0] == pytest.approx(b[0], rel=1e-8)
            assert a[1] == pytest.approx(b[1], rel=1e-8)


def test_tilde_at_zero_energy():
    r = np.array([0.5, 2.0, 6.0])
    for ell in (0, 1, 3):
        jt, _ = tilde_jy(ell, 0.0, r, DONOR_UNITS)
        expected = math.sqrt(math.pi) * (r / 2) ** (ell + 0.5) / math.factorial(ell)
        assert np.allclose(jt, expected, rtol=1e-14)


@pytest.mark.parametrize("ell", [0, 1, 2])
@pytest.mark.parametrize("E0, r", [(1.0, 0.6), (5.0 - 1.0j, 1.2), (7.0, 4.0), (2.0 + 3.0j, 8.0)])
def test_taylor_coefficients_against_stencil(ell, E0, r):
    n_max = 5
    s = taylor_s_coeffs(ell, E0, r, n_max, DONOR_UNITS)
    c = taylor_c_coeffs(ell, E0, r, n_max, DONOR_UNITS)
    so = taylor_stencil(lambda E: tilde_jy(ell, E, r, DONOR_UNITS)[0], E0, n_max, radius=1.0)
    co = taylor_stencil(lambda E: tilde_jy(ell, E, r, DONOR_UNITS)[1], E0, n_max, radius=1.0)
    scale_s = np.max(np.abs(so))
    scale_c = np.max(np.abs(co))
    assert np.allclose(s, so, rtol=1e-9, atol=1e-11 * scale_s)
    assert np.allclose(c, co, rtol=1e-9, atol=1e-11 * scale_c)


def test_taylor_zeroth_order_is_value():
    r = np.array([0.3, 2.0, 7.0])
    s = taylor_s_coeffs(1, 4.0 - 1j, r, 0, DONOR_UNITS)
    c = taylor_c_coeffs(1, 4.0 - 1j, r, 0, DONOR_UNITS)
    jt, yt = tilde_jy(1, 4.0 - 1j, r, DONOR_UNITS)
    assert np.allclose(s[0], jt, rtol=1e-13) and np.allclose(c[0], yt, rtol=1e-13)
    with pytest.raises(ValueError):
        taylor_s_coeffs(0, 1.0, 1.0, -1, DONOR_UNITS)


def test_momentum_sheets():
    c = DONOR_UNITS.c2mu
    for E in (3.0, 3.0 + 0j):
        assert momentum(E, c, PHYSICAL) == pytest.approx(math.sqrt(3 * c))
        assert momentum(E, c, RESONANT) == pytest.approx(math.sqrt(3 * c))
    kp = momentum(-2.0 + 1.0j, c, PHYSICAL)
    kr = momentum(-2.0 + 1.0j, c, RESONANT)
    assert kp.imag > 0 and kr.imag < 0
    assert kp ** 2 == pytest.approx(c * (-2 + 1j)) and kr == pytest.approx(-kp)
    # a bound-state energy gives k = i kappa on the physical sheet
    assert momentum(-5.0, c, PHYSICAL) == pytest.approx(1j * math.sqrt(5 * c))


def test_log_branch_ranges():
    k = 1.3 * np.exp(1j * np.array([-1.4, 0.0, 1.0, 2.0, 3.0]))
    up = log_branch_h(k, 1.0, PHYSICAL)
    arg_up = up.imag * np.pi / 2
    assert np.all((arg_up > -np.pi / 2) & (arg_up <= 3 * np.pi / 2))
    k_low = 1.3 * np.exp(-1j * np.array([-1.0, 0.0, 1.0, 2.0, 3.0]))
    lo = log_branch_h(k_low, 1.0, RESONANT)
    arg_lo = lo.imag * np.pi / 2
    assert np.all((arg_lo > -3 * np.pi / 2) & (arg_lo <= np.pi / 2))
    # positive real k: both sheets agree and h is real
    assert log_branch_h(2.0, 1.0, PHYSICAL) == log_branch_h(2.0, 1.0, RESONANT)
    assert log_branch_h(2.0).imag == 0
    # each winding adds 2i; the scale only shifts the real part
    w = LogBranch("upper", 2)
    assert log_branch_h(1 + 1j, 1.0, w) - log_branch_h(1 + 1j) == pytest.approx(4j)
    assert (log_branch_h(1 + 1j, 3.0) - log_branch_h(1 + 1j)) == pytest.approx(2 / np.pi * math.log(3))


def test_log_branch_parse_and_name():
    assert LogBranch.parse("physical") is PHYSICAL
    assert LogBranch.parse("resonance") is RESONANT
    assert LogBranch.parse("lower-1") == LogBranch("lower", -1)
    assert LogBranch("upper", 2).name == "upper+2"
    with pytest.raises(ValueError):
        LogBranch.parse("sideways")
