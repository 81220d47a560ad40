import numpy as np
import pytest

from critnls.painleve import (
    ChebSegment,
    P12Family,
    cheb_nodes,
    cheb_operator,
    fit_p1_pole,
    kdv_residual,
    p12_dispersionless_seed,
    p12_series,
    p1_coefficients,
    p1_on_line,
    p1_origin_data,
    p1_series,
    p1_series_radius,
    solve_p12,
    solve_p1_ray,
    solve_p1_tritronquee,
)


def test_chebyshev_differentiation_is_exact_for_polynomials():
    x, _ = cheb_nodes(16)
    assert np.all(np.diff(x) > 0)
    z, D = cheb_operator(ChebSegment(-1.0, 3.0, 16))
    f = z**5 - 2 * z**2
    assert np.max(np.abs(D @ f - (5 * z**4 - 4 * z))) < 1e-9


def test_p1_series_satisfies_equation_at_large_xi():
    a = p1_coefficients(10)
    assert a[0] == 1.0
    xi = 30.0 + 0j
    h = 1e-3
    om = [p1_series(xi + k * h)[0] for k in (-1, 0, 1)]
    d2 = (om[0] - 2 * om[1] + om[2]) / h**2
    assert abs(d2 - (6 * om[1] ** 2 - xi)) < 1e-6
    assert 8.0 <= p1_series_radius() <= 10.0


def test_p1_origin_values():
    om0, dom0 = p1_origin_data()
    assert om0 == pytest.approx(-0.18755430834049, abs=1e-11)
    assert dom0 == pytest.approx(-0.30490556026, abs=1e-10)


@pytest.mark.parametrize("angle", [0.0, 0.7 * np.pi, -0.7 * np.pi, 0.5 * np.pi])
def test_p1_ray_residuals(angle):
    sol = solve_p1_ray(angle)
    assert sol.residual_norm < 1e-10
    assert sol.tail_coeff < 1e-10


def test_p1_symmetry_and_far_field():
    om, _, _ = p1_on_line(np.array([-3j, 3j]))
    assert om[1] == pytest.approx(np.conj(om[0]), abs=1e-12)
    sol = solve_p1_ray(0.0)
    z = np.array([12.0 + 0j])
    assert sol.evaluate(z)[0] == pytest.approx(-np.sqrt(12.0 / 6), rel=1e-3)


def test_p1_sector_guard():
    with pytest.raises(ValueError):
        solve_p1_tritronquee(ChebSegment(-10 + 1j, -10 - 1j, 64))


def test_p1_pole_location():
    fit = fit_p1_pole()
    assert fit.xi_pole == pytest.approx(-2.3841687, abs=1e-5)
    assert fit.coefficient == pytest.approx(1.0, abs=1e-3)


def test_p12_series_and_seed():
    U, U1, U2, U3 = p12_series(40.0, 0.0)
    assert U == pytest.approx(-(6 * 40.0) ** (1 / 3), rel=1e-2)
    seed = p12_dispersionless_seed(-2.0, np.array([0.0, 3.0]))
    assert seed[0][0] == 0.0
    X = 3.0
    u = seed[0][1]
    assert X == pytest.approx(-2.0 * u - u**3 / 6)


def test_p12_solution_at_zero():
    sol = solve_p12(0.0)
    assert sol.accepted
    assert sol.evaluate(np.array([0.0]))[0] == pytest.approx(-0.4151721, abs=1e-7)
    fine = solve_p12(0.0, segment=ChebSegment(sol.segment.endpoint_a, sol.segment.endpoint_b,
                                              2 * sol.segment.n_coll))
    X = np.array([-10.0, 0.0, 10.0])
    assert np.max(np.abs(fine.evaluate(X) - sol.evaluate(X))) < 1e-10
    # boundary data match the series
    assert sol.evaluate(np.array([19.0]))[0] == pytest.approx(p12_series(19.0, 0.0)[0], abs=1e-10)


def test_p12_kdv_and_family_interpolation():
    X = np.linspace(-5, 5, 11)
    assert kdv_residual(-1.0, X) < 1e-8
    fam = P12Family(-1.0, -0.5, 0.1)
    assert fam.max_residual() < 1e-8
    direct = solve_p12(-0.73)
    vals = fam.evaluate(X, -0.73)
    assert np.max(np.abs(vals[0] - direct.evaluate(X))) < 1e-5
    with pytest.raises(ValueError):
        fam.evaluate(X, 2.0)
