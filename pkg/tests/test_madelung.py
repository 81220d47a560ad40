import numpy as np
import pytest

from critnls import NlsModel, WaveField, make_grid
from critnls.madelung import (
    ELLIPTIC,
    HYPERBOLIC,
    InitialDataCase,
    MadelungState,
    asym_residuals,
    build_initial_data,
    psi_from_uv,
    riemann_invariants,
    solve_asym_data,
    uv_from_psi,
    uv_from_riemann,
)


@pytest.mark.parametrize("s,sign", [(1, "defocusing"), (2, "defocusing"), (1, "focusing"), (2, "focusing")])
def test_riemann_round_trip(s, sign):
    x = np.linspace(-3, 3, 41)
    st = MadelungState(0.5 + 0.3 * np.cos(x), 0.2 * np.sin(x))
    m = NlsModel(s, sign, 0.0, 0.1)
    pair = riemann_invariants(st, m)
    assert pair.branch == (HYPERBOLIC if sign == "defocusing" else ELLIPTIC)
    back = uv_from_riemann(pair, m)
    assert np.max(np.abs(back.u - st.u)) < 1e-12
    assert np.max(np.abs(back.v - st.v)) < 1e-12


def test_quintic_invariants_are_v_plus_minus_u():
    st = MadelungState(np.array([0.4]), np.array([0.1]))
    pair = riemann_invariants(st, NlsModel(2, "defocusing", 0.0, 0.1))
    assert np.isclose(pair.r_plus[0], 0.5) and np.isclose(pair.r_minus[0], -0.3)
    assert np.isclose(pair.lambda_plus[0], 0.5)


def test_psi_round_trip_with_velocity():
    g = make_grid(1024, 40.0)
    x = g.nodes
    eps = 0.1
    st = MadelungState(1 / np.cosh(x) ** 2, 0.3 * np.tanh(x) / np.cosh(x) ** 2)
    m = NlsModel(2, "defocusing", 0.0, eps)
    psi = psi_from_uv(st, g, m)
    back = uv_from_psi(psi, m)
    w = st.u > 1e-6
    assert np.max(np.abs(back.u - st.u)) < 1e-12
    assert np.max(np.abs(back.v[w] - st.v[w])) < 1e-9


def test_vacuum_and_bad_state():
    with pytest.raises(ValueError):
        MadelungState(np.array([-1.0]), np.array([0.0]))
    g = make_grid(64, 10.0)
    psi = WaveField.from_values(g, np.zeros(64, complex))
    st = uv_from_psi(psi, NlsModel())
    assert np.all(st.v == 0)
    with pytest.raises(ValueError):
        riemann_invariants(st, NlsModel(1, "defocusing", 0.0, 0.1))


def test_case_catalogue():
    x = np.array([0.0, 1.0])
    assert np.allclose(InitialDataCase("quintic_defoc_dark").uv(x).u, np.tanh(x) ** 4)
    assert np.allclose(InitialDataCase("cubic_defoc_sech", A=2.0).uv(x).u, 4 / np.cosh(x) ** 2)
    assert InitialDataCase("nonlocal_foc_sech", eta=0.5).model(0.1).eta == 0.5
    with pytest.raises(ValueError):
        InitialDataCase("unknown")
    with pytest.raises(ValueError):
        InitialDataCase("quintic_foc_sech", eta=1.0)
    with pytest.raises(ValueError):
        InitialDataCase("quintic_foc_asym", alpha=0.7)


def test_asymmetric_data_satisfy_their_equations():
    data = solve_asym_data(0.2)
    x = np.linspace(-10, 10, 101)
    r = data.invariant(x)
    res = asym_residuals(r.imag, r.real, x, 0.0, 0.2)
    assert np.max(np.abs(res)) < 1e-10


def test_build_initial_data_warns_on_short_grid():
    case = InitialDataCase("quintic_foc_sech")
    with pytest.warns(UserWarning):
        build_initial_data(case, make_grid(64, 8.0), case.model(0.1))
