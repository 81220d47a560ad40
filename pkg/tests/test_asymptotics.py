import dataclasses

import numpy as np
import pytest

from critnls.asymptotics import (
    LocalFrame,
    MatchReport,
    matching_table,
    matching_zone,
    normal_form_r_minus,
    p12_approx,
    p1_approx,
    p1_leading,
    p1_state,
    p1_variable,
)
from critnls.hodograph import elliptic_constants, eval_semiclassical, find_critical_point, hyperbolic_constants
from critnls.madelung import InitialDataCase
from critnls.painleve import P12Family

QD = InitialDataCase("quintic_defoc_sech")
QF = InitialDataCase("quintic_foc_sech")


@pytest.fixture(scope="module")
def family():
    return P12Family(-1.0, 0.0, 0.25)


def _hyperbolic_frame(eps, family=None):
    cp = find_critical_point(QD)
    return LocalFrame(cp, hyperbolic_constants(QD, cp), eps, QD, family=family)


def _elliptic_frame(case, eps):
    cp = find_critical_point(case)
    return LocalFrame(cp, elliptic_constants(case, cp), eps, case)


def _point(frame, X, T):
    """(x, t) with prescribed scaled coordinates."""
    cp, c, eps = frame.cp, frame.constants, frame.epsilon
    xm = X * eps ** (6 / 7) / c.nu_minus
    xp = T * eps ** (4 / 7) / c.nu_plus
    dt = (xm - xp) / (cp.lambda_plus0 - cp.lambda_minus0)
    return np.array([cp.x0 + xp + cp.lambda_plus0 * dt]), cp.t0 + dt


def test_frame_validation():
    cp = find_critical_point(QD)
    with pytest.raises(ValueError):
        LocalFrame(cp, hyperbolic_constants(QD, cp), 0.0)


def test_p12_at_critical_point(family):
    fr = _hyperbolic_frame(0.01, family)
    c = fr.constants
    X, T = fr.scaled_coords(np.array([fr.cp.x0]), fr.cp.t0)
    assert X[0] == 0 and T[0] == 0
    rm = p12_approx(fr, [fr.cp.x0], fr.cp.t0).r_minus[0]
    k = c.nu_plus * 0.01 ** (2 / 7) / (c.beta * c.nu_minus)
    assert rm == pytest.approx(fr.cp.r_minus0 + k * (-0.4151721), abs=1e-6)
    assert fr.family is family


@pytest.mark.parametrize("X", [-300.0, -100.0, 100.0, 300.0])
@pytest.mark.parametrize("T", [-1.0, -0.5])
def test_p12_reduces_to_normal_form(family, X, T):
    fr = _hyperbolic_frame(1e-3, family)
    x, t = _point(fr, X, T)
    Xs, Ts = fr.scaled_coords(x, t)
    assert (Xs[0], Ts[0]) == pytest.approx((X, T))
    p = p12_approx(fr, x, t).r_minus[0] - fr.cp.r_minus0
    n = normal_form_r_minus(fr, x, t)[0] - fr.cp.r_minus0
    assert abs(p - n) < 1e-2 * abs(n)


def test_p12_translation_covariance(family):
    fr = _hyperbolic_frame(0.01, family)
    # x > x0 keeps T ≤ 0 inside the fixture family
    x = fr.cp.x0 + np.linspace(0.0, 0.02, 5)
    a = p12_approx(fr, x, fr.cp.t0)
    shifted = dataclasses.replace(fr, cp=dataclasses.replace(fr.cp, x0=fr.cp.x0 + 3.0))
    b = p12_approx(shifted, x + 3.0, fr.cp.t0)
    assert np.allclose(a.r_minus, b.r_minus, atol=1e-14)
    assert np.allclose(a.r_plus, b.r_plus, atol=1e-14)


def test_p12_refuses_wrong_frames():
    cp = find_critical_point(QD)
    h = dataclasses.replace(hyperbolic_constants(QD, cp), generic=False)
    with pytest.raises(ValueError):
        p12_approx(LocalFrame(cp, h, 0.1), [cp.x0], cp.t0)
    with pytest.raises(ValueError):
        p12_approx(_elliptic_frame(QF, 0.1), [0.0], 0.4)
    with pytest.raises(ValueError):
        p1_variable(_hyperbolic_frame(0.1), [0.0], 0.4)


def test_p1_symmetric_data_give_imaginary_xi():
    fr = _elliptic_frame(QF, 0.05)
    xi = p1_variable(fr, np.linspace(-0.5, 0.5, 11), fr.cp.t0)
    assert np.max(np.abs(xi.real)) < 1e-12 * np.max(np.abs(xi))


def test_p1_conjugation_symmetry():
    fr = _elliptic_frame(QF, 0.05)
    x = np.linspace(0.05, 0.5, 10)
    a = p1_approx(fr, x, fr.cp.t0)
    b = p1_approx(fr, -x, fr.cp.t0)
    # u even and v odd give inc(−x) = −conj(inc(x))
    assert np.allclose(b, -np.conj(a), atol=1e-12)


def test_nonlocal_eta_zero_formula_equals_cubic():
    x = np.linspace(-0.3, 0.3, 7)
    a = _elliptic_frame(InitialDataCase("cubic_foc_sech"), 0.05)
    b = _elliptic_frame(InitialDataCase("nonlocal_foc_sech", eta=0.0), 0.05)
    assert np.max(np.abs(p1_approx(a, x, 0.5) - p1_approx(b, x, 0.5))) < 1e-12


def test_p1_far_field_matches_square_root_normal_form():
    fr = _elliptic_frame(QF, 1e-5)
    x = np.array([0.004, 0.008, 0.016])
    assert np.all(np.abs(p1_variable(fr, x, fr.cp.t0)) > 70)
    full = p1_approx(fr, x, fr.cp.t0)
    lead = p1_leading(fr, x, fr.cp.t0)
    assert np.max(np.abs(full / lead - 1)) < 1e-4
    cp = fr.cp
    st = eval_semiclassical(QF, x, cp.t0, cp)
    semi = (st.v - cp.v0) + 1j * (st.u - cp.u0)
    gap = np.abs(lead / semi - 1)
    # the remainder of the square-root normal form is O(|x − x0|^{1/2})
    assert np.all(np.diff(gap) > 0)
    assert gap[0] < 0.06
    assert gap[1] / gap[0] == pytest.approx(np.sqrt(2), rel=0.1)


def test_p1_state_is_physical():
    fr = _elliptic_frame(QF, 0.1)
    st = p1_state(fr, np.linspace(-1, 1, 21), fr.cp.t0)
    assert np.all(st.u >= 0)
    assert np.allclose(st.u, st.u[::-1], atol=1e-12)


def test_matching_zone_basic():
    x = np.linspace(-1, 1, 201)
    nls = np.cos(x)
    semi = nls + 0.1 * (np.abs(x) < 0.295)
    pain = nls + 0.05 * x**2 + 0.01
    rep = matching_zone(nls, semi, pain, x, (-1, 1))
    assert rep.crossover == pytest.approx((-0.29, 0.29), abs=1e-9)
    assert rep.sup_diff_semiclassical == pytest.approx(0.1)
    assert "half_width" in rep.as_text()
    same = matching_zone(nls, nls, pain, x, (-1, 1))
    assert same.crossover is None and same.half_width == 0.0
    assert matching_table(x, nls, semi, pain).shape == (201, 3)
    with pytest.raises(ValueError):
        MatchReport((0, 1), 0.0, 0.0, (1.0, 0.0), 0)
    with pytest.raises(ValueError):
        matching_zone(nls, semi, pain, x, (2, 3))
