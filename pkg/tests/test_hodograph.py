import numpy as np
import pytest

from critnls.hodograph import (
    MINUS,
    MultivaluedError,
    critical_point_report,
    elliptic_constants,
    eval_semiclassical,
    find_critical_point,
    hodograph_residual,
    hyperbolic_constants,
    nongeneric_eta,
    solve_riemann_wave,
    tian_ye_derivative,
    tian_ye_mu,
    tian_ye_mu_minus_rrr,
    tian_ye_mu_quadrature,
)
from critnls.madelung import InitialDataCase

QD = InitialDataCase("quintic_defoc_sech")
CD = InitialDataCase("cubic_defoc_sech")
QF = InitialDataCase("quintic_foc_sech")
CF = InitialDataCase("cubic_foc_sech")


def test_quintic_defocusing_break_closed_form():
    cp = find_critical_point(QD)
    assert cp.t0 == pytest.approx(3 * np.sqrt(3) / 4, abs=1e-12)
    assert cp.x0 == pytest.approx(-(np.log((np.sqrt(3) + 1) / np.sqrt(2)) + np.sqrt(3) / 2), abs=1e-12)
    assert cp.which_invariant_breaks == MINUS
    assert cp.r_minus0 == pytest.approx(-2 / 3, abs=1e-14)


def test_quintic_dark_break():
    cp = find_critical_point(InitialDataCase("quintic_defoc_dark"))
    assert cp.t0 == pytest.approx(25 * np.sqrt(15) / 72, abs=1e-10)
    assert cp.x0 == pytest.approx(0.5475956, abs=1e-7)


def test_dark_scaling_with_B():
    a = find_critical_point(InitialDataCase("quintic_defoc_dark", A=1.0, B=1.0))
    b = find_critical_point(InitialDataCase("quintic_defoc_dark", A=2.0, B=3.0))
    assert b.t0 == pytest.approx(a.t0 * 3 / 2, rel=1e-9)
    assert b.x0 == pytest.approx(a.x0 * 3, rel=1e-9)


def test_cubic_breaks():
    cp = find_critical_point(CF)
    assert (cp.x0, cp.t0, cp.u0) == pytest.approx((0.0, 0.5, 2.0), abs=1e-10)
    cp = find_critical_point(CD)
    assert cp.x0 == pytest.approx(-2.209395255, abs=1e-6)
    assert cp.t0 == pytest.approx(3 * np.sqrt(2) / 32 * np.sqrt(69 + 11 * np.sqrt(33)), abs=1e-10)


def test_focusing_breaks():
    cp = find_critical_point(QF)
    assert cp.u0 == pytest.approx(1.5858049, abs=1e-6)
    assert cp.t0 == pytest.approx(0.41194928, abs=1e-7)
    cp = find_critical_point(InitialDataCase("quintic_foc_asym", alpha=0.2))
    assert (cp.x0, cp.t0, cp.u0, cp.v0) == pytest.approx((-0.09425, 0.47635, 1.69938, -0.23415), abs=2e-5)
    cp = find_critical_point(InitialDataCase("quintic_foc_dark"))
    assert abs(cp.x0) == pytest.approx(1.87234, abs=1e-5)
    assert cp.t0 == pytest.approx(0.90408, abs=1e-5)


def test_hyperbolic_constants():
    h = hyperbolic_constants(QD)
    assert (h.alpha, h.beta, h.gamma) == pytest.approx((5.50116, -1.25938, 81 * np.sqrt(3) / 16), abs=1e-5)
    assert h.sigma == -h.rho
    # consistency of the seventh roots with the normal form
    assert h.gamma * h.nu_plus**3 == pytest.approx(h.beta**3 * h.nu_minus**2, rel=1e-12)
    h = hyperbolic_constants(CD)
    assert h.alpha == pytest.approx(2.635171951, abs=1e-6)
    assert h.gamma == pytest.approx(2.32689365333, rel=1e-6)


def test_nongeneric_eta_and_rho_zero():
    case = InitialDataCase("nonlocal_defoc_sech")
    eta = nongeneric_eta(case)
    assert eta == pytest.approx(1.306003435, abs=1e-8)
    h = hyperbolic_constants(InitialDataCase("nonlocal_defoc_sech", eta=eta))
    assert not h.generic


def test_elliptic_constants():
    e = elliptic_constants(QF)
    assert e.a_plus == pytest.approx(-0.61138j, abs=1e-5)
    assert e.psi_arg == pytest.approx(0.0, abs=1e-12)
    e = elliptic_constants(CF)
    assert e.a_plus == pytest.approx(-1j * np.sqrt(2) / 4)
    e0 = elliptic_constants(InitialDataCase("nonlocal_foc_sech", eta=0.0))
    assert e0 == e


def test_tian_ye_closed_form_matches_quadrature():
    # the closed form covers the monotone region r− < 0 < r+
    for rp, rm in ((0.5, -1.2), (1.5, -0.3), (0.3, -0.5), (1.0, -1.0)):
        a = tian_ye_mu(rp, rm, CD)
        b = tian_ye_mu_quadrature(rp, rm)
        assert np.allclose(a, b, atol=1e-10, rtol=0)


def test_tian_ye_third_derivative():
    rp, rm = 0.4, -1.1
    num = tian_ye_derivative(CD, rp, rm, MINUS, MINUS, 3)
    assert num == pytest.approx(tian_ye_mu_minus_rrr(CD, rp, rm), rel=1e-7)
    with pytest.raises(ValueError):
        tian_ye_mu(2.5, 0.0, CD)


@pytest.mark.parametrize("case", [QD, CD, QF, CF, InitialDataCase("quintic_defoc_dark"),
                                  InitialDataCase("quintic_foc_asym", alpha=0.2)])
def test_hodograph_residuals(case):
    cp = find_critical_point(case)
    if case.name == "cubic_defoc_sech":
        x = np.concatenate([np.linspace(-8, -3, 21), np.linspace(3, 8, 21)])
    else:
        x = np.linspace(cp.x0 - 3, cp.x0 + 3, 61)
    st = eval_semiclassical(case, x, 0.8 * cp.t0, cp)
    assert np.max(hodograph_residual(case, st, x, 0.8 * cp.t0)) < 1e-10


def test_symmetric_data_stay_symmetric():
    x = np.linspace(-3, 3, 31)
    st = eval_semiclassical(QD, x, 1.0)
    assert np.allclose(st.u, st.u[::-1], atol=1e-12)
    assert np.allclose(st.v, -st.v[::-1], atol=1e-12)


def test_cubic_middle_region_is_refused():
    with pytest.raises(ValueError):
        eval_semiclassical(CD, [0.0], 1.0)


def test_past_break_is_refused():
    cp = find_critical_point(QD)
    with pytest.raises(MultivaluedError):
        eval_semiclassical(QD, [0.0], 1.01 * cp.t0)
    with pytest.raises(MultivaluedError):
        solve_riemann_wave(QD, [0.0], 1.01 * cp.t0)


def test_report_lists_constants():
    text = critical_point_report(QD, find_critical_point(QD), hyperbolic_constants(QD))
    assert "t0 = 1.29903810568" in text and "gamma = " in text
