"""Local Painlevé asymptotics near break-up and comparison metrics.

Hyperbolic (defocusing) case, minus invariant breaking:
    r− ≈ r−0 + (ν+ ε^{2/7}/(β ν−)) U(X, T),
    r+ ≈ r+0 + x+/α − ε^{4/7} (σ ν+ ν−/β) U_XX(X, T),
with X = ν− x−/ε^{6/7}, T = ν+ x+/ε^{4/7}, x± = x − x0 − λ±0 (t − t0) and U the
smooth P_I² solution.

Elliptic (focusing) case:
    v − v0 + i√(V'0/u0)(u − u0) ≈ 6i (ε² c r² e^{2iψ}/(9√(u0/V'0)(3V'0 + u0V''0)))^{1/5} Ω(ξ),
    ξ = −i ((u0/V'0)(3V'0 + u0V''0)² r e^{iψ}/(3 c² ε⁴))^{1/5} (x − x0 − λ+0 (t − t0)),
with a+ = −i/(r e^{iψ}), c = 1 + 4ηu0 (c = 1 for local models) and Ω the tritronquée solution.
Fifth roots take the positive root of the modulus and the phase ψ/5.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .hodograph import (
    MINUS,
    CriticalPoint,
    EllipticConstants,
    HyperbolicConstants,
)
from .madelung import ELLIPTIC, HYPERBOLIC, InitialDataCase, MadelungState, RiemannPair
from .painleve import P12Family, p1_on_line


@dataclass
class LocalFrame:
    cp: CriticalPoint
    constants: Union[HyperbolicConstants, EllipticConstants]
    epsilon: float
    case: Optional[InitialDataCase] = None
    family: Optional[P12Family] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    @property
    def hyperbolic(self) -> bool:
        return isinstance(self.constants, HyperbolicConstants)

    def characteristic_coords(self, x, t: float):
        """x± = x − x0 − λ±0 (t − t0) with physical speeds."""
        x = np.asarray(x, dtype=float)
        dt = t - self.cp.t0
        xp = x - self.cp.x0 - self.cp.lambda_plus0 * dt
        xm = x - self.cp.x0 - self.cp.lambda_minus0 * dt
        return xp, xm

    def scaled_coords(self, x, t: float):
        """(X, T) of the P_I² formula."""
        c = self.constants
        xp, xm = self.characteristic_coords(x, t)
        X = c.nu_minus * np.real(xm) / self.epsilon ** (6 / 7)
        T = c.nu_plus * np.real(xp) / self.epsilon ** (4 / 7)
        return X, T

    def ensure_family(self, x, t: float, dT: float = 0.05) -> P12Family:
        """Build (or reuse) a P_I² family covering the T values needed at (x, t)."""
        _, T = self.scaled_coords(x, t)
        lo, hi = float(np.min(T)), float(np.max(T))
        if self.family is not None:
            f0, f1 = self.family.T_range
            if f0 - 1e-9 <= lo and hi <= f1 + 1e-9:
                return self.family
            lo, hi = min(lo, f0), max(hi, f1)
        lo, hi = lo - dT, hi + dT
        lo = np.floor(lo / dT) * dT
        hi = np.ceil(hi / dT) * dT
        self.family = P12Family(lo, hi, dT)
        return self.family


def _check_generic_hyperbolic(frame: LocalFrame):
    if not frame.hyperbolic:
        raise ValueError("P_I² asymptotics need a hyperbolic frame")
    if not frame.constants.generic:
        raise ValueError("non-generic break-up (a constant vanishes): no P_I² asymptotics")
    if frame.cp.which_invariant_breaks != MINUS:
        raise ValueError("formula is written for a break of the minus invariant; use the mirrored data")


def p12_approx(frame: LocalFrame, x, t: float) -> RiemannPair:
    """Riemann invariants from the P_I² formula at real points x and time t."""
    _check_generic_hyperbolic(frame)
    c = frame.constants
    eps = frame.epsilon
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xp, _ = frame.characteristic_coords(x, t)
    X, T = frame.scaled_coords(x, t)
    fam = frame.ensure_family(x, t)
    U = np.empty_like(X)
    Uxx = np.empty_like(X)
    for i in range(len(X)):
        vals = fam.evaluate(X[i:i + 1], float(T[i]))
        U[i] = vals[0, 0]
        Uxx[i] = vals[2, 0]
    rm = frame.cp.r_minus0 + c.nu_plus * eps ** (2 / 7) / (c.beta * c.nu_minus) * U
    rp = frame.cp.r_plus0 + np.real(xp) / c.alpha - eps ** (4 / 7) * c.sigma * c.nu_plus * c.nu_minus / c.beta * Uxx
    return RiemannPair(rp, rm, HYPERBOLIC, rp, rm)


def normal_form_r_minus(frame: LocalFrame, x, t: float):
    """Root R of x− = β x+ R − (γ/6) R³ continuing the large-|X| branch (dispersionless limit)."""
    c = frame.constants
    xp, xm = frame.characteristic_coords(x, t)
    out = np.empty(np.shape(xm))
    for i, (a, b) in enumerate(zip(np.ravel(np.real(xp)), np.ravel(np.real(xm)))):
        roots = np.roots([-c.gamma / 6, 0.0, c.beta * a, -b])
        real = roots[np.abs(roots.imag) < 1e-9 * (1 + np.abs(roots))].real
        if len(real) == 0:
            real = roots.real[[np.argmin(np.abs(roots.imag))]]
        # the branch with R of the sign of −x−·γ (outer branch of the cubic)
        out.flat[i] = real[np.argmax(np.abs(real))] if len(real) > 1 else real[0]
    return frame.cp.r_minus0 + out


# ---------------------------------------------------------------- elliptic

def _model_factors(frame: LocalFrame):
    cp = frame.cp
    case = frame.case
    s = case.power_s if case is not None else 1
    u0 = cp.u0
    vp = u0 ** (s - 1)
    vpp = (s - 1) * u0 ** (s - 2) if s > 1 else 0.0
    ceta = 1.0 + 4.0 * case.eta * u0 if (case is not None and case.eta) else 1.0
    return u0, vp, vpp, ceta


def _root5(modulus: float, phase: float) -> complex:
    return modulus ** 0.2 * np.exp(1j * phase / 5)


def p1_variable(frame: LocalFrame, x, t: float):
    """ξ(x, t) of the tritronquée formula."""
    if frame.hyperbolic:
        raise ValueError("tritronquée asymptotics need an elliptic frame")
    c = frame.constants
    u0, vp, vpp, ceta = _model_factors(frame)
    k = (u0 / vp) * (3 * vp + u0 * vpp) ** 2 * c.r_mod / (3 * ceta**2 * frame.epsilon**4)
    pref = -1j * _root5(k, c.psi_arg)
    xp, _ = frame.characteristic_coords(x, t)
    return pref * xp


def p1_approx(frame: LocalFrame, x, t: float):
    """Complex increment v − v0 + i√(V'0/u0)(u − u0) from the tritronquée formula."""
    c = frame.constants
    u0, vp, vpp, ceta = _model_factors(frame)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xi = p1_variable(frame, x, t)
    k1 = frame.epsilon**2 * ceta * c.r_mod**2 / (9 * np.sqrt(u0 / vp) * (3 * vp + u0 * vpp))
    amp = 6j * _root5(k1, 2 * c.psi_arg)
    om, _, _ = p1_on_line(xi)
    return amp * om


def p1_leading(frame: LocalFrame, x, t: float):
    """Increment with Ω replaced by its far-field −√(ξ/6) (elliptic square-root normal form)."""
    c = frame.constants
    u0, vp, vpp, ceta = _model_factors(frame)
    xi = p1_variable(frame, np.atleast_1d(np.asarray(x, dtype=float)), t)
    k1 = frame.epsilon**2 * ceta * c.r_mod**2 / (9 * np.sqrt(u0 / vp) * (3 * vp + u0 * vpp))
    return 6j * _root5(k1, 2 * c.psi_arg) * (-np.sqrt(xi / 6))


def p1_state(frame: LocalFrame, x, t: float) -> MadelungState:
    """(u, v) from the tritronquée increment."""
    inc = p1_approx(frame, x, t)
    u0, vp, _, _ = _model_factors(frame)
    u = u0 + np.imag(inc) / np.sqrt(vp / u0)
    v = frame.cp.v0 + np.real(inc)
    return MadelungState(np.maximum(u, 0.0), v)


# ---------------------------------------------------------------- matching

@dataclass(frozen=True)
class MatchReport:
    window: tuple
    sup_diff_semiclassical: float
    sup_diff_painleve: float
    crossover: Optional[tuple]
    sign_changes: int

    def __post_init__(self):
        if self.crossover is not None and self.crossover[0] > self.crossover[1]:
            raise ValueError("crossover bounds out of order")

    @property
    def half_width(self) -> float:
        if self.crossover is None:
            return 0.0
        return 0.5 * (self.crossover[1] - self.crossover[0])

    def as_text(self) -> str:
        lines = [f"window = {self.window[0]:.12g} {self.window[1]:.12g}",
                 f"sup_diff_semiclassical = {self.sup_diff_semiclassical:.12g}",
                 f"sup_diff_painleve = {self.sup_diff_painleve:.12g}",
                 f"sign_changes = {self.sign_changes}"]
        if self.crossover is None:
            lines.append("crossover = none")
        else:
            lines.append(f"crossover = {self.crossover[0]:.12g} {self.crossover[1]:.12g}")
            lines.append(f"half_width = {self.half_width:.12g}")
        return "\n".join(lines) + "\n"


def _as_field(f, name: str):
    if isinstance(f, MadelungState):
        return getattr(f, name)
    if isinstance(f, RiemannPair):
        return getattr(f, name)
    return np.asarray(f)


def matching_zone(nls, semi, pain, x, window, field_name: str = "u", center: Optional[float] = None) -> MatchReport:
    """Compare NLS with semiclassical and Painlevé fields on a window.

    The crossover is the span between the outermost points where the
    Painlevé error is the smaller one; inner sign changes are only counted.
    """
    x = np.asarray(x, dtype=float)
    a = _as_field(nls, field_name)
    e_s = np.abs(a - _as_field(semi, field_name))
    e_p = np.abs(a - _as_field(pain, field_name))
    sel = (x >= window[0]) & (x <= window[1])
    if not np.any(sel):
        raise ValueError("window contains no grid points")
    xs, ds = x[sel], (e_s - e_p)[sel]
    better = ds > 0
    changes = int(np.count_nonzero(np.diff(np.sign(ds)) != 0))
    if np.any(better):
        idx = np.flatnonzero(better)
        cross = (float(xs[idx[0]]), float(xs[idx[-1]]))
    else:
        cross = None
    return MatchReport((float(window[0]), float(window[1])), float(e_s[sel].max()), float(e_p[sel].max()),
                       cross, changes)


def matching_table(x, nls, semi, pain, field_name: str = "u"):
    """Columns x, |nls − semi|, |nls − pain|."""
    a = _as_field(nls, field_name)
    return np.column_stack([x, np.abs(a - _as_field(semi, field_name)), np.abs(a - _as_field(pain, field_name))])
