"""Configurable studies: evolutions, critical points, Painlevé tables, matching, scaling and blow-up laws.

Every study writes tab-separated tables with a header line and a key = value
metadata file into ``output_dir``. Outputs contain no timestamps, so a rerun
with the same configuration reproduces the files byte for byte.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np
import yaml
from scipy import fft, stats

from .asymptotics import LocalFrame, matching_table, matching_zone, p12_approx, p1_state, p1_variable
from .hodograph import (
    critical_point_report,
    elliptic_constants,
    eval_semiclassical,
    find_critical_point,
    hyperbolic_constants,
    nongeneric_eta,
    semiclassical_invariants,
)
from .madelung import InitialDataCase, build_initial_data, riemann_invariants, uv_from_psi
from .nls import StepperConfig, evolve
from .painleve import P12Family, fit_p1_pole, p12_equation_residual, solution_table, solve_p1_ray
from .spectral import make_grid

STUDIES = ("evolve", "semiclassical", "critical_point", "painleve1", "painleve12", "match", "scaling",
           "blowup", "nongeneric_eta")
SWEEPS = ("match", "scaling", "blowup")
XI_POLE = -2.3841
BLOWUP_SCALE = 2.0324

_CASE_KEYS = {"name", "A", "B", "alpha", "eta"}
_GRID_KEYS = {"n_modes", "length"}
_STEPPER_KEYS = {f.name for f in fields(StepperConfig)}
_OPTION_KEYS = {"t_end", "x_min", "x_max", "n_points", "angle", "radius", "T_min", "T_max", "dT",
                "window_scale", "blowup_t_end"}
_TOP_KEYS = {"study", "case", "grid", "stepper", "epsilon_list", "times", "output_dir", "options", "budget"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RegressionResult:
    slope_a: float
    intercept_b: float
    sigma_a: float
    sigma_b: float
    corr_r: float
    n_points: int

    def __post_init__(self):
        if abs(self.corr_r) > 1 + 1e-12:
            raise ValueError("|corr_r| must not exceed 1")


@dataclass
class ExperimentConfig:
    study: str
    case: InitialDataCase = field(default_factory=lambda: InitialDataCase("quintic_foc_sech"))
    n_modes: int = 2**13
    length: float = 20 * np.pi
    stepper: StepperConfig = field(default_factory=lambda: StepperConfig(n_steps=4000))
    epsilon_list: tuple = (0.1,)
    times: tuple = ()
    output_dir: str = "out"
    options: dict = field(default_factory=dict)
    budget: str = ""

    def __post_init__(self):
        if self.study not in STUDIES:
            raise ConfigError(f"unknown study {self.study!r}; expected one of {', '.join(STUDIES)}")
        self.epsilon_list = tuple(float(e) for e in self.epsilon_list)
        self.times = tuple(float(t) for t in self.times)
        if self.study in SWEEPS and not self.epsilon_list:
            raise ConfigError(f"study {self.study} needs a nonempty epsilon_list")
        if any(e <= 0 for e in self.epsilon_list):
            raise ConfigError("epsilon values must be positive")
        for k in self.options:
            if k not in _OPTION_KEYS:
                raise ConfigError(f"unknown config key 'options.{k}'")

    def option(self, key, default=None):
        return self.options.get(key, default)

    def as_dict(self) -> dict:
        return {
            "study": self.study,
            "case": {"name": self.case.name, "A": self.case.A, "B": self.case.B, "alpha": self.case.alpha,
                     "eta": self.case.eta},
            "grid": {"n_modes": self.n_modes, "length": self.length},
            "stepper": asdict(self.stepper),
            "epsilon_list": list(self.epsilon_list),
            "times": list(self.times),
            "output_dir": self.output_dir,
            "options": dict(sorted(self.options.items())),
            "budget": self.budget,
        }


def _check_keys(section: dict, allowed: set, prefix: str):
    if not isinstance(section, dict):
        raise ConfigError(f"section {prefix.rstrip('.') or 'root'} must be a mapping")
    for k in section:
        if k not in allowed:
            raise ConfigError(f"unknown config key '{prefix}{k}'")


def config_from_dict(data: dict) -> ExperimentConfig:
    """Strict conversion: any key outside the schema is an error naming that key."""
    _check_keys(data, _TOP_KEYS, "")
    if "study" not in data:
        raise ConfigError("missing required key 'study'")
    kw = {"study": str(data["study"]).replace("-", "_")}
    if "case" in data:
        case = data["case"]
        if isinstance(case, str):
            case = {"name": case}
        _check_keys(case, _CASE_KEYS, "case.")
        kw["case"] = InitialDataCase(**case)
    if "grid" in data:
        _check_keys(data["grid"], _GRID_KEYS, "grid.")
        if "n_modes" in data["grid"]:
            kw["n_modes"] = int(data["grid"]["n_modes"])
        if "length" in data["grid"]:
            kw["length"] = float(data["grid"]["length"])
    if "stepper" in data:
        _check_keys(data["stepper"], _STEPPER_KEYS, "stepper.")
        kw["stepper"] = StepperConfig(**{"n_steps": 4000, **data["stepper"]})
    for key in ("epsilon_list", "times"):
        if key in data:
            val = data[key]
            kw[key] = tuple(val) if isinstance(val, (list, tuple)) else (val,)
    if "output_dir" in data:
        kw["output_dir"] = str(data["output_dir"])
    if "options" in data:
        _check_keys(data["options"], _OPTION_KEYS, "options.")
        kw["options"] = dict(data["options"])
    if "budget" in data:
        kw["budget"] = str(data["budget"])
    return ExperimentConfig(**kw)


def read_config_file(path) -> dict:
    """Raw mapping from a YAML or JSON file."""
    path = Path(path)
    text = path.read_text()
    data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping")
    return data


def load_config(path) -> ExperimentConfig:
    """Read a YAML or JSON configuration file."""
    return config_from_dict(read_config_file(path))


# ---------------------------------------------------------------- regression

def scaling_regression(xs, ys) -> RegressionResult:
    """Least squares ln y = a ln x + b with standard errors and the Pearson correlation."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("xs and ys must be 1-d arrays of equal length")
    if len(xs) < 3:
        raise ValueError("need at least 3 points")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("data must be positive")
    if np.ptp(xs) == 0:
        raise ValueError("xs must not all be equal")
    fit = stats.linregress(np.log(xs), np.log(ys))
    r = 1.0 if np.ptp(ys) == 0 else float(np.clip(fit.rvalue, -1.0, 1.0))
    return RegressionResult(float(fit.slope), float(fit.intercept), float(fit.stderr),
                            float(fit.intercept_stderr), r, len(xs))


# ---------------------------------------------------------------- output

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return " ".join(_fmt(x) for x in v)
    if v is None:
        return "none"
    return str(v)


def write_table(path, header, rows) -> None:
    """Tab-separated table with a header line; floats in round-trip precision."""
    rows = np.atleast_2d(np.asarray(rows))
    with open(path, "w") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(_fmt(v) for v in row) + "\n")


def write_metadata(path, items: dict) -> None:
    with open(path, "w") as fh:
        for k, v in items.items():
            fh.write(f"{k} = {_fmt(v)}\n")


def _config_metadata(cfg: ExperimentConfig) -> dict:
    out = {}

    def flat(prefix, d):
        for k, v in d.items():
            if isinstance(v, dict):
                flat(f"{prefix}{k}.", v)
            else:
                out[f"{prefix}{k}"] = v

    flat("config.", cfg.as_dict())
    return out


def _ensure_dir(path) -> Path:
    p = Path(path)
    try:
        p.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output_dir {str(p)!r} is not writable: {exc}") from exc
    if not os.access(p, os.W_OK):
        raise ConfigError(f"output_dir {str(p)!r} is not writable")
    return p


# ---------------------------------------------------------------- helpers

def _x_nodes(cfg: ExperimentConfig, default):
    lo = float(cfg.option("x_min", default[0]))
    hi = float(cfg.option("x_max", default[1]))
    n = int(cfg.option("n_points", default[2]))
    return np.linspace(lo, hi, n)


def run_nls(case: InitialDataCase, epsilon: float, n_modes: int, length: float, stepper: StepperConfig,
            t_end: float, snapshot_times=()):
    """Sampled initial data evolved to t_end; returns (grid, model, trace)."""
    grid = make_grid(n_modes, length)
    model = case.model(epsilon)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        psi0 = build_initial_data(case, grid, model)
    return grid, model, evolve(psi0, model, t_end, stepper, snapshot_times)


def _nls(cfg: ExperimentConfig, eps: float, t_end: float, snapshot_times=()):
    return run_nls(cfg.case, eps, cfg.n_modes, cfg.length, cfg.stepper, t_end, snapshot_times)


def _snapshot_at(trace, t):
    i = int(np.argmin(np.abs(trace.times - t)))
    return trace.snapshots[i], float(trace.times[i])


# ---------------------------------------------------------------- studies

def study_evolve(cfg: ExperimentConfig, out: Path) -> dict:
    t_end = float(cfg.option("t_end", max(cfg.times) if cfg.times else find_critical_point(cfg.case).t0))
    meta = {}
    for j, eps in enumerate(cfg.epsilon_list):
        grid, model, tr = _nls(cfg, eps, t_end, cfg.times)
        sub = _ensure_dir(out / f"eps_{j:02d}")
        for k, (t, snap) in enumerate(zip(tr.times, tr.snapshots)):
            st = uv_from_psi(snap, model)
            write_table(sub / f"snapshot_{k:03d}.tsv", ["x", "re_psi", "im_psi", "u", "v"],
                        np.column_stack([grid.nodes, snap.values.real, snap.values.imag, st.u, st.v]))
        write_table(sub / "conservation.tsv", ["t", "delta_e", "delta_mass"],
                    np.column_stack([tr.times, tr.delta_e, tr.delta_mass]))
        m = {"epsilon": eps, **tr.metadata, "snapshot_times": list(tr.times),
             "max_delta_e": float(np.max(tr.delta_e)), "max_abs_delta_mass": float(np.max(np.abs(tr.delta_mass))),
             "blowup_time": tr.blowup_time}
        write_metadata(sub / "metadata.txt", m)
        meta[f"eps_{j:02d}.max_delta_e"] = m["max_delta_e"]
        meta[f"eps_{j:02d}.max_abs_delta_mass"] = m["max_abs_delta_mass"]
    return meta


def study_semiclassical(cfg: ExperimentConfig, out: Path) -> dict:
    cp = find_critical_point(cfg.case)
    x = _x_nodes(cfg, (-8.0, 8.0, 801))
    times = cfg.times or (0.0, 0.5 * cp.t0, cp.t0)
    for k, t in enumerate(times):
        st = eval_semiclassical(cfg.case, x, t, cp)
        write_table(out / f"semiclassical_{k:03d}.tsv", ["x", "u", "v"], np.column_stack([x, st.u, st.v]))
    return {"t0": cp.t0, "times": list(times)}


def study_critical_point(cfg: ExperimentConfig, out: Path) -> dict:
    case = cfg.case
    cp = find_critical_point(case)
    const = elliptic_constants(case, cp) if case.elliptic else hyperbolic_constants(case, cp)
    (out / "critical_point.txt").write_text(critical_point_report(case, cp, const))
    return {"x0": cp.x0, "t0": cp.t0, "u0": cp.u0, "v0": cp.v0}


def study_painleve1(cfg: ExperimentConfig, out: Path) -> dict:
    angle = float(cfg.option("angle", 0.7 * np.pi))
    radius = float(cfg.option("radius", 14.0))
    meta = {}
    for name, ang in (("real_axis", 0.0), ("ray", angle)):
        sol = solve_p1_ray(ang, radius)
        write_table(out / f"p1_{name}.tsv", ["s", "re_xi", "im_xi", "re_omega", "im_omega"], solution_table(sol))
        meta[f"{name}.residual"] = sol.residual_norm
        meta[f"{name}.tail"] = sol.tail_coeff
    pole = fit_p1_pole()
    meta.update({"angle": angle, "radius": radius, "pole": pole.xi_pole, "pole_coefficient": pole.coefficient,
                 "pole_narrow_window": pole.xi_pole_half_window})
    return meta


def study_painleve12(cfg: ExperimentConfig, out: Path) -> dict:
    T_min = float(cfg.option("T_min", -3.0))
    T_max = float(cfg.option("T_max", 3.0))
    dT = float(cfg.option("dT", 0.05))
    fam = P12Family(T_min, T_max, dT)
    rows = []
    for k, T in enumerate(fam.T_grid):
        sol = fam.solutions[k]
        U0, U1, U2 = fam.evaluate(np.array([0.0]), float(T))[:, 0]
        rows.append([T, U0, U1, U2, sol.residual_norm, p12_equation_residual(sol), sol.tail_coeff])
    write_table(out / "p12_family.tsv", ["T", "U0", "UX0", "UXX0", "residual", "equation_residual", "tail"], rows)
    X = _x_nodes(cfg, (fam.bounds[0], fam.bounds[1], 401))
    for k, T in enumerate(cfg.times):
        vals = fam.evaluate(X, T)
        write_table(out / f"p12_profile_{k:03d}.tsv", ["X", "U", "U_X", "U_XX"], np.column_stack([X, *vals]))
    return {"T_min": T_min, "T_max": T_max, "dT": dT, "max_residual": fam.max_residual(),
            "max_tail": fam.max_tail(), "domain": list(fam.bounds)}


def match_point(case: InitialDataCase, eps: float, n_modes: int, length: float, stepper: StepperConfig,
                window_scale: Optional[float] = None, family: Optional[P12Family] = None):
    """NLS, semiclassical and Painlevé fields at t0 on a window scaled to the Painlevé zone.

    Elliptic case: field u on |ξ| ≤ window_scale (default 10).
    Hyperbolic case: field r− on |X| ≤ window_scale (default 1/2).
    Returns (x, nls, semi, pain, MatchReport, frame).
    """
    cp = find_critical_point(case)
    grid, model, tr = run_nls(case, eps, n_modes, length, stepper, cp.t0, [cp.t0])
    snap, t = _snapshot_at(tr, cp.t0)
    st = uv_from_psi(snap, model)
    x = grid.nodes
    if case.elliptic:
        frame = LocalFrame(cp, elliptic_constants(case, cp), eps, case)
        scale = abs(p1_variable(frame, np.array([cp.x0 + 1.0]), cp.t0)[0] - p1_variable(frame, np.array([cp.x0]), cp.t0)[0])
        half = (10.0 if window_scale is None else window_scale) / scale
        sel = np.abs(x - cp.x0) <= 1.05 * half
        nls = st.u[sel]
        semi = eval_semiclassical(case, x[sel], cp.t0, cp).u
        pain = p1_state(frame, x[sel], cp.t0).u
    else:
        hc = hyperbolic_constants(case, cp)
        frame = LocalFrame(cp, hc, eps, case, family=family)
        half = (0.5 if window_scale is None else window_scale) * eps ** (6 / 7) / abs(hc.nu_minus)
        sel = np.abs(x - cp.x0) <= 1.05 * half
        nls = riemann_invariants(st, model).r_minus[sel]
        semi = semiclassical_invariants(case, x[sel], cp.t0, cp).r_minus
        pain = p12_approx(frame, x[sel], cp.t0).r_minus
    xs = x[sel] - cp.x0
    rep = matching_zone(nls, semi, pain, xs, (-half, half))
    return xs, nls, semi, pain, rep, frame


def study_match(cfg: ExperimentConfig, out: Path) -> dict:
    meta = {}
    family = None
    for j, eps in enumerate(cfg.epsilon_list):
        xs, nls, semi, pain, rep, frame = match_point(cfg.case, eps, cfg.n_modes, cfg.length, cfg.stepper,
                                                      cfg.option("window_scale"), family)
        family = frame.family
        write_table(out / f"match_{j:02d}.tsv", ["x_minus_x0", "abs_nls_semi", "abs_nls_painleve"],
                    matching_table(xs, nls, semi, pain))
        (out / f"match_{j:02d}.txt").write_text(f"epsilon = {_fmt(eps)}\n" + rep.as_text())
        meta[f"eps_{j:02d}.sup_diff_semiclassical"] = rep.sup_diff_semiclassical
        meta[f"eps_{j:02d}.sup_diff_painleve"] = rep.sup_diff_painleve
        meta[f"eps_{j:02d}.half_width"] = rep.half_width
    return meta


def scaling_errors(case: InitialDataCase, eps: float, n_modes: int, length: float, stepper: StepperConfig,
                   times, x_window):
    """Sup-norm NLS versus semiclassical differences at the given times.

    Elliptic case: |u_NLS − u_sc| on the window. Hyperbolic case: (Δ+, Δ−) with
    Δ± = sup |r±_NLS − r±_sc|. Returns (rows, trace).
    """
    cp = find_critical_point(case)
    t_end = max(times)
    grid, model, tr = run_nls(case, eps, n_modes, length, stepper, t_end, times)
    x = grid.nodes
    sel = (x > x_window[0]) & (x < x_window[1])
    rows = []
    for t in times:
        snap, ts = _snapshot_at(tr, t)
        st = uv_from_psi(snap, model)
        if case.elliptic:
            sc = eval_semiclassical(case, x[sel], min(ts, cp.t0), cp)
            rows.append([ts, float(np.max(np.abs(st.u[sel] - sc.u)))])
        else:
            rn = riemann_invariants(st, model)
            sc = semiclassical_invariants(case, x[sel], min(ts, cp.t0), cp)
            rows.append([ts, float(np.max(np.abs(rn.r_plus[sel] - sc.r_plus))),
                         float(np.max(np.abs(rn.r_minus[sel] - sc.r_minus)))])
    return rows, tr


def study_scaling(cfg: ExperimentConfig, out: Path) -> dict:
    case = cfg.case
    cp = find_critical_point(case)
    if case.elliptic:
        times = cfg.times or (0.5 * cp.t0, cp.t0)
        window = (float(cfg.option("x_min", -6.0)), float(cfg.option("x_max", 6.0)))
        names = ["delta_u"]
    else:
        times = cfg.times or (cp.t0,)
        window = (float(cfg.option("x_min", -8.0)), float(cfg.option("x_max", 0.0)))
        names = ["delta_plus", "delta_minus"]
    table = []
    per_time = [[] for _ in times]
    meta = {"t0": cp.t0, "window": list(window)}
    for eps in cfg.epsilon_list:
        rows, tr = scaling_errors(case, eps, cfg.n_modes, cfg.length, cfg.stepper, times, window)
        for k, r in enumerate(rows):
            table.append([eps, *r])
            per_time[k].append([eps, *r])
        meta[f"max_delta_e[{_fmt(eps)}]"] = float(np.max(tr.delta_e))
    write_table(out / "scaling.tsv", ["epsilon", "t", *names], table)
    reg_rows = []
    for t, sub in zip(times, per_time):
        sub = np.array(sub)
        for q, name in enumerate(names):
            if len(sub) >= 3:
                r = scaling_regression(sub[:, 0], sub[:, 2 + q])
                reg_rows.append([t, q, r.slope_a, r.intercept_b, r.sigma_a, r.sigma_b, r.corr_r, r.n_points])
                meta[f"slope[{name}, t={_fmt(t)}]"] = r.slope_a
    if reg_rows:
        write_table(out / "regression.tsv", ["t", "field", "a", "b", "sigma_a", "sigma_b", "r", "n"], reg_rows)
    return meta


def blowup_times(case: InitialDataCase, epsilons, n_modes: int, length: float, stepper: StepperConfig,
                 t_end: float):
    out = []
    for eps in epsilons:
        _, _, tr = run_nls(case, eps, n_modes, length, stepper, t_end)
        out.append(tr.blowup_time)
    return out


def blowup_fit(epsilons, t_blowup, t0: float):
    """Fit ln(t_B − t0) = a ln ε + b over the runs that blew up."""
    eps = np.array([e for e, tb in zip(epsilons, t_blowup) if tb is not None])
    tb = np.array([tb for tb in t_blowup if tb is not None])
    skipped = len(epsilons) - len(eps)
    if skipped:
        warnings.warn(f"{skipped} run(s) did not blow up and were excluded", stacklevel=2)
    return scaling_regression(eps, tb - t0)


def conjectured_intercept() -> float:
    """|b| = ln(2.3841/2.0324) from ξ_pole ≈ −2.0324 (t_B − t0)/ε^{4/5}."""
    return math.log(-XI_POLE / BLOWUP_SCALE)


def study_blowup(cfg: ExperimentConfig, out: Path) -> dict:
    if cfg.case.name != "quintic_foc_sech":
        raise ConfigError("the blow-up study is defined for quintic_foc_sech")
    cp = find_critical_point(cfg.case)
    t_end = float(cfg.option("blowup_t_end", cfg.option("t_end", 0.7)))
    tbs = blowup_times(cfg.case, cfg.epsilon_list, cfg.n_modes, cfg.length, cfg.stepper, t_end)
    write_table(out / "blowup.tsv", ["epsilon", "t_blowup"],
                [[e, np.nan if tb is None else tb] for e, tb in zip(cfg.epsilon_list, tbs)])
    meta = {"t0": cp.t0, "t_end": t_end, "conjectured_abs_b": conjectured_intercept()}
    if sum(tb is not None for tb in tbs) >= 3:
        r = blowup_fit(cfg.epsilon_list, tbs, cp.t0)
        meta.update({"a": r.slope_a, "b": r.intercept_b, "sigma_a": r.sigma_a, "sigma_b": r.sigma_b,
                     "r": r.corr_r, "n": r.n_points})
    return meta


def study_nongeneric_eta(cfg: ExperimentConfig, out: Path) -> dict:
    case = cfg.case
    if case.name not in ("nonlocal_defoc_sech", "cubic_defoc_sech"):
        case = InitialDataCase("nonlocal_defoc_sech", A=case.A)
    cp = find_critical_point(case)
    eta = nongeneric_eta(case, cp)
    return {"u0": cp.u0, "eta_star": eta, "rho_at_eta_star": -(1 - 4 * eta * cp.u0) / (16 * cp.u0)}


_DISPATCH = {
    "evolve": study_evolve,
    "semiclassical": study_semiclassical,
    "critical_point": study_critical_point,
    "painleve1": study_painleve1,
    "painleve12": study_painleve12,
    "match": study_match,
    "scaling": study_scaling,
    "blowup": study_blowup,
    "nongeneric_eta": study_nongeneric_eta,
}


def run(cfg: ExperimentConfig, threads: int = 1) -> int:
    """Run the configured study and write its artifacts; returns 0 on success."""
    out = _ensure_dir(cfg.output_dir)
    with fft.set_workers(max(1, int(threads))):
        results = _DISPATCH[cfg.study](cfg, out)
    write_metadata(out / "metadata.txt", {**_config_metadata(cfg), **results})
    return 0
