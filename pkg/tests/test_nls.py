import numpy as np
import pytest

from critnls import NlsModel, WaveField, make_grid
from critnls.nls import StepperConfig, evolve, write_trace_metadata


def _free_exact(psi, model, t):
    k = psi.grid.wavenumbers
    return np.fft.ifft(np.fft.fft(psi.values) * np.exp(-0.5j * model.epsilon * k**2 * t))


def test_free_propagator_fourth_order():
    g = make_grid(256, 8 * np.pi)
    # tiny amplitude makes the nonlinear term negligible
    psi = WaveField.from_values(g, 1e-8 * np.exp(-g.nodes**2) + 0j)
    m = NlsModel(1, "focusing", 0.0, 0.1)
    ex = _free_exact(psi, m, 0.5)
    errs = []
    for n in (20, 40, 80):
        tr = evolve(psi, m, 0.5, StepperConfig(n_steps=n, cutoff_fraction=1.0, krasny_threshold=0), [0.5])
        errs.append(np.max(np.abs(tr.snapshots[-1].values - ex)) / 1e-8)
    rates = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(rates > 3.8)


def test_stiff_split_is_stable_and_accurate():
    g = make_grid(512, 8 * np.pi)
    psi = WaveField.from_values(g, 1e-8 * np.exp(-4 * g.nodes**2) + 0j)
    m = NlsModel(1, "focusing", 0.0, 1.0)
    tr = evolve(psi, m, 0.2, StepperConfig(n_steps=200, krasny_threshold=0), [0.2])
    assert tr.metadata["explicit_modes"] < g.n_modes
    err = np.max(np.abs(tr.snapshots[-1].values - _free_exact(psi, m, 0.2))) / 1e-8
    assert err < 1e-6


def test_soliton_conservation_and_metadata(tmp_path):
    g = make_grid(512, 40.0)
    psi = WaveField.from_values(g, 1 / np.cosh(g.nodes) + 0j)
    m = NlsModel(1, "focusing", 0.0, 1.0)
    tr = evolve(psi, m, 1.0, StepperConfig(n_steps=400), [0.5, 1.0])
    assert len(tr.snapshots) == 3
    assert tr.delta_e.max() < 1e-9
    assert np.abs(tr.delta_mass).max() < 1e-12
    # the focusing soliton keeps its modulus
    assert np.max(np.abs(np.abs(tr.snapshots[-1].values) - 1 / np.cosh(g.nodes))) < 1e-6
    write_trace_metadata(tmp_path / "m.txt", tr)
    text = (tmp_path / "m.txt").read_text()
    assert "energy_gate_ok = True" in text and "blowup_time = none" in text


def test_blowup_detected_for_quintic_collapse():
    g = make_grid(2**12, 16 * np.pi)
    psi = WaveField.from_values(g, 1 / np.cosh(g.nodes) + 0j)
    tr = evolve(psi, NlsModel(2, "focusing", 0.0, 0.1), 0.8, StepperConfig(n_steps=1000, amplitude_cap=1e6))
    assert tr.terminated_early and tr.blowup_time is not None
    assert 0.41 < tr.blowup_time < 0.8


def test_config_validation():
    with pytest.raises(ValueError):
        StepperConfig(n_steps=0)
    with pytest.raises(ValueError):
        StepperConfig(scheme="euler")
    with pytest.raises(ValueError):
        StepperConfig(cutoff_fraction=2.0)


def test_imex_scheme_matches_composite():
    g = make_grid(256, 20.0)
    psi = WaveField.from_values(g, 1 / np.cosh(g.nodes) + 0j)
    m = NlsModel(1, "defocusing", 0.0, 0.5)
    a = evolve(psi, m, 0.5, StepperConfig(n_steps=800), [0.5]).snapshots[-1].values
    b = evolve(psi, m, 0.5, StepperConfig(n_steps=800, scheme="imex"), [0.5]).snapshots[-1].values
    assert np.max(np.abs(a - b)) < 1e-6


def test_nonlocal_eta_zero_equals_cubic():
    g = make_grid(256, 20.0)
    psi = WaveField.from_values(g, 1 / np.cosh(g.nodes) + 0j)
    a = evolve(psi, NlsModel(1, "defocusing", 0.0, 0.2), 0.3, StepperConfig(n_steps=100), [0.3])
    b = evolve(psi, NlsModel(1, "defocusing", 1e-300, 0.2), 0.3, StepperConfig(n_steps=100), [0.3])
    assert np.max(np.abs(a.snapshots[-1].values - b.snapshots[-1].values)) < 1e-12


def test_final_step_is_always_monitored():
    g = make_grid(256, 20.0)
    psi = WaveField.from_values(g, 1 / np.cosh(g.nodes) + 0j)
    tr = evolve(psi, NlsModel(2, "defocusing", 0.0, 0.2), 0.3, StepperConfig(n_steps=50))
    assert tr.times.tolist() == pytest.approx([0.0, 0.3])
    assert 0 < tr.delta_e[-1] < 1e-6
