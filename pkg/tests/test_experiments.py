import json
import math

import numpy as np
import pytest

from critnls.experiments import (
    ConfigError,
    ExperimentConfig,
    blowup_fit,
    config_from_dict,
    conjectured_intercept,
    load_config,
    run,
    scaling_regression,
)


def test_regression_exact_power_law():
    x = np.array([0.1, 0.2, 0.4, 0.8])
    r = scaling_regression(x, 3 * x**2)
    assert r.slope_a == pytest.approx(2.0, abs=1e-14)
    assert r.intercept_b == pytest.approx(math.log(3), abs=1e-14)
    assert r.corr_r == pytest.approx(1.0, abs=1e-14)
    assert r.n_points == 4


def test_regression_errors():
    with pytest.raises(ValueError):
        scaling_regression([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        scaling_regression([1.0, 2.0, 3.0], [1.0, -2.0, 3.0])


def test_regression_subsets_agree():
    x = np.linspace(0.01, 0.1, 12)
    noise = 1 + 0.01 * np.sin(37 * np.arange(12))
    y = 0.7 * x**0.8 * noise
    full = scaling_regression(x, y)
    folds = [scaling_regression(x[k::3], y[k::3]) for k in range(3)]
    for f in folds:
        assert abs(f.slope_a - full.slope_a) < 3 * max(f.sigma_a, full.sigma_a)


def test_blowup_fit_and_conjecture():
    eps = np.array([0.03, 0.05, 0.1])
    t0 = 0.4
    tb = t0 + 1.2 * eps**0.8
    r = blowup_fit(eps, list(tb), t0)
    assert r.slope_a == pytest.approx(0.8)
    with pytest.warns(UserWarning):
        blowup_fit(list(eps) + [0.2], list(tb) + [None], t0)
    assert conjectured_intercept() == pytest.approx(0.1596, abs=1e-4)


def test_strict_config_keys():
    with pytest.raises(ConfigError, match="epsilonn"):
        config_from_dict({"study": "critical_point", "epsilonn": [0.1]})
    with pytest.raises(ConfigError, match="grid.modes"):
        config_from_dict({"study": "evolve", "grid": {"modes": 64}})
    with pytest.raises(ConfigError, match="unknown study"):
        config_from_dict({"study": "fly"})
    with pytest.raises(ConfigError, match="epsilon_list"):
        config_from_dict({"study": "scaling", "epsilon_list": []})
    with pytest.raises(ConfigError, match="options.foo"):
        ExperimentConfig("match", options={"foo": 1})


def test_load_yaml_and_json(tmp_path):
    (tmp_path / "c.yaml").write_text("study: critical-point\ncase:\n  name: cubic_foc_sech\n  A: 1.0\n")
    cfg = load_config(tmp_path / "c.yaml")
    assert cfg.study == "critical_point" and cfg.case.name == "cubic_foc_sech"
    (tmp_path / "c.json").write_text(json.dumps({"study": "scaling", "epsilon_list": [0.1, 0.05],
                                                  "stepper": {"n_steps": 100}}))
    cfg = load_config(tmp_path / "c.json")
    assert cfg.epsilon_list == (0.1, 0.05) and cfg.stepper.n_steps == 100


def test_critical_point_run_is_deterministic(tmp_path):
    outs = []
    for k in range(2):
        cfg = ExperimentConfig("critical_point", output_dir=str(tmp_path / "same"))
        assert run(cfg) == 0
        outs.append({p.name: p.read_bytes() for p in sorted((tmp_path / "same").iterdir())})
    assert outs[0] == outs[1]
    vals = dict(line.split(" = ", 1) for line in outs[0]["critical_point.txt"].decode().splitlines())
    assert float(vals["u0"]) == pytest.approx(1.5858049, abs=1e-6)
    assert float(vals["t0"]) == pytest.approx(0.4119493, abs=1e-6)


def test_nongeneric_eta_study(tmp_path):
    cfg = config_from_dict({"study": "nongeneric_eta", "case": "nonlocal_defoc_sech",
                            "output_dir": str(tmp_path)})
    run(cfg)
    meta = (tmp_path / "metadata.txt").read_text()
    line = [s for s in meta.splitlines() if s.startswith("eta_star")][0]
    assert float(line.split("=")[1]) == pytest.approx(1.3060, abs=1e-3)


def test_small_evolve_and_semiclassical(tmp_path):
    cfg = config_from_dict({
        "study": "evolve", "case": "quintic_defoc_sech", "grid": {"n_modes": 512, "length": 40.0},
        "stepper": {"n_steps": 200}, "epsilon_list": [0.2], "times": [0.5, 1.0], "output_dir": str(tmp_path / "e"),
    })
    run(cfg)
    sub = tmp_path / "e" / "eps_00"
    assert (sub / "snapshot_002.tsv").exists()
    header = (sub / "snapshot_000.tsv").read_text().splitlines()[0]
    assert header.split("\t") == ["x", "re_psi", "im_psi", "u", "v"]
    assert "max_delta_e" in (sub / "metadata.txt").read_text()
    cfg = config_from_dict({"study": "semiclassical", "case": "quintic_defoc_sech", "times": [0.0, 1.0],
                            "options": {"n_points": 11}, "output_dir": str(tmp_path / "s")})
    run(cfg)
    rows = np.loadtxt(tmp_path / "s" / "semiclassical_001.tsv", skiprows=1)
    assert rows.shape == (11, 3)


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ConfigError, match="not writable"):
        run(ExperimentConfig("nongeneric_eta", output_dir=str(blocker / "sub")))


def test_blowup_requires_quintic_focusing(tmp_path):
    cfg = config_from_dict({"study": "blowup", "case": "cubic_foc_sech", "output_dir": str(tmp_path)})
    with pytest.raises(ConfigError):
        run(cfg)
