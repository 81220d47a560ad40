"""Madelung variables, Riemann invariants and the catalogue of initial data."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import Chebyshev
from scipy import fft
from scipy.interpolate import BarycentricInterpolator

from .model import DEFOCUSING, FOCUSING, NlsModel
from .spectral import PeriodicGrid, WaveField, spectral_derivative

VACUUM_THRESHOLD = 1e-10
HYPERBOLIC = "hyperbolic"
ELLIPTIC = "elliptic"

# name -> (power_s, sign, nonlocal)
CASES = {
    "cubic_defoc_sech": (1, DEFOCUSING, False),
    "quintic_defoc_sech": (2, DEFOCUSING, False),
    "quintic_defoc_symmetric": (2, DEFOCUSING, False),
    "quintic_defoc_dark": (2, DEFOCUSING, False),
    "cubic_foc_sech": (1, FOCUSING, False),
    "quintic_foc_sech": (2, FOCUSING, False),
    "quintic_foc_asym": (2, FOCUSING, False),
    "quintic_foc_dark": (2, FOCUSING, False),
    "nonlocal_defoc_sech": (1, DEFOCUSING, True),
    "nonlocal_foc_sech": (1, FOCUSING, True),
}


@dataclass(frozen=True)
class MadelungState:
    """Density u = |ψ|² and velocity v on a set of nodes."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if u.shape != v.shape:
            raise ValueError("u and v must have the same shape")
        if np.any(u < 0):
            raise ValueError("density u must be non-negative")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)


@dataclass(frozen=True)
class RiemannPair:
    """Riemann invariants and characteristic speeds (r_t + λ r_x = 0)."""

    r_plus: np.ndarray
    r_minus: np.ndarray
    branch: str
    lambda_plus: Optional[np.ndarray] = None
    lambda_minus: Optional[np.ndarray] = None


@dataclass(frozen=True)
class InitialDataCase:
    """One of the initial-data families.

    ``A`` is the amplitude parameter (a, A or A0), ``B`` the second parameter of
    the symmetric and dark families, ``alpha`` the asymmetry and ``eta`` the
    nonlocal length.
    """

    name: str
    A: float = 1.0
    B: Optional[float] = None
    alpha: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        if self.name not in CASES:
            raise ValueError(f"unknown case {self.name!r}; expected one of {sorted(CASES)}")
        if not self.A > 0:
            raise ValueError("amplitude A must be positive")
        if self.B is None:
            object.__setattr__(self, "B", 1.0 if self.name.endswith("dark") else 0.0)
        if self.name == "quintic_defoc_symmetric" and not (0 <= self.B <= self.A):
            raise ValueError("symmetric data require 0 <= B <= A")
        if self.name.endswith("dark") and not self.B > 0:
            raise ValueError("dark data require B > 0")
        if self.name == "quintic_foc_asym" and not 0 <= self.alpha < 0.5:
            raise ValueError("asymmetric data require 0 <= alpha < 1/2")
        if self.eta < 0:
            raise ValueError("eta must be non-negative")
        if self.eta > 0 and not CASES[self.name][2]:
            raise ValueError(f"case {self.name} does not take eta")

    @property
    def power_s(self) -> int:
        return CASES[self.name][0]

    @property
    def sign(self) -> str:
        return CASES[self.name][1]

    @property
    def elliptic(self) -> bool:
        return self.sign == FOCUSING

    def model(self, epsilon: float) -> NlsModel:
        return NlsModel(self.power_s, self.sign, self.eta if CASES[self.name][2] else 0.0, epsilon)

    def uv(self, x) -> MadelungState:
        """Closed-form (u, v) at t = 0; the asymmetric case is solved numerically."""
        x = np.asarray(x, dtype=float)
        A, B = self.A, self.B
        name = self.name
        if name in ("cubic_defoc_sech", "cubic_foc_sech", "quintic_defoc_sech", "quintic_foc_sech",
                    "nonlocal_defoc_sech", "nonlocal_foc_sech"):
            return MadelungState(A**2 / np.cosh(x) ** 2, np.zeros_like(x))
        if name == "quintic_defoc_symmetric":
            return MadelungState(A / np.cosh(x) ** 2, -B * np.tanh(x) ** 2)
        if name == "quintic_defoc_dark":
            return MadelungState(A * np.tanh(x / B) ** 4, np.zeros_like(x))
        if name == "quintic_foc_dark":
            return MadelungState(np.tanh(x) ** 4, np.zeros_like(x))
        r = asym_initial_invariant(x, self.alpha)
        return MadelungState(r.imag, r.real)


def _q(u, s):
    return 2.0 * u ** (0.5 * s) / s


def riemann_invariants(state: MadelungState, model: NlsModel) -> RiemannPair:
    """r± = v ± Q(u) (defocusing) or v ± iQ(u) (focusing), Q' = √(V'/u).

    The nonlocal model shares the cubic dispersionless limit.
    """
    u, v = state.u, state.v
    s = model.power_s
    c = np.sqrt(u * model.dV(u))
    if model.sign == DEFOCUSING:
        if np.any(u <= 0):
            raise ValueError("hyperbolic invariants need u > 0 at every node")
        q = _q(u, s)
        return RiemannPair(v + q, v - q, HYPERBOLIC, v + c, v - c)
    q = _q(u, s)
    rp = v + 1j * q
    return RiemannPair(rp, np.conj(rp), ELLIPTIC, v + 1j * c, v - 1j * c)


def uv_from_riemann(pair: RiemannPair, model: NlsModel) -> MadelungState:
    """Inverse of :func:`riemann_invariants`."""
    s = model.power_s
    if pair.branch == HYPERBOLIC:
        v = 0.5 * (pair.r_plus + pair.r_minus)
        q = 0.5 * (pair.r_plus - pair.r_minus)
    else:
        v = np.real(pair.r_plus)
        q = np.imag(pair.r_plus)
    q = np.maximum(q, 0.0)
    return MadelungState((0.5 * s * q) ** (2.0 / s), v)


def uv_from_psi(psi: WaveField, model: NlsModel, threshold: float = VACUUM_THRESHOLD) -> MadelungState:
    """u = |ψ|², v = ε Im(ψ_x/ψ), with v = 0 where u < threshold."""
    vals = psi.values
    u = np.abs(vals) ** 2
    psi_x = spectral_derivative(psi, 1).values
    v = np.zeros_like(u)
    ok = u >= threshold
    v[ok] = model.epsilon * np.imag(psi_x[ok] / vals[ok])
    return MadelungState(u, v)


def psi_from_uv(state: MadelungState, grid: PeriodicGrid, model: NlsModel,
                x_anchor: Optional[float] = None, v_integral: Optional[np.ndarray] = None,
                seam_tol: float = 1e-8) -> WaveField:
    """ψ = √u exp(i Φ/ε) with Φ the antiderivative of v vanishing at ``x_anchor``.

    Φ is the spectral antiderivative of the mean-free part of v plus the linear
    mean term, unless ``v_integral`` supplies it directly. A phase jump across
    the periodic seam that is not a multiple of 2π triggers a warning.
    """
    x = grid.nodes
    if x_anchor is None:
        x_anchor = x[0]
    eps = model.epsilon
    if v_integral is None:
        v = state.v
        vhat = fft.fft(v)
        mean = vhat[0].real / grid.n_modes
        k = grid.wavenumbers
        ihat = np.zeros_like(vhat)
        nz = k != 0
        ihat[nz] = vhat[nz] / (1j * k[nz])
        if grid.n_modes % 2 == 0:
            ihat[grid.n_modes // 2] = 0.0
        phi = fft.ifft(ihat).real + mean * x
        phi_anchor = np.interp(x_anchor, x, phi)
        phi = phi - phi_anchor
        jump = mean * grid.length / eps
        mismatch = abs(jump - 2 * np.pi * np.round(jump / (2 * np.pi)))
    else:
        phi = np.asarray(v_integral, dtype=float) - np.interp(x_anchor, x, v_integral)
        mismatch = 0.0
    if mismatch > seam_tol:
        warnings.warn(f"phase of v/eps is not periodic on the grid (seam mismatch {mismatch:.3e} rad)",
                      stacklevel=2)
    return WaveField.from_values(grid, np.sqrt(state.u) * np.exp(1j * phi / eps))


# ---------------------------------------------------------------- asymmetric data

def asym_F(r):
    """F(r) = log(i(1−r)) − log(1+r)."""
    return np.log(1j * (1 - r)) - np.log(1 + r)


def asym_calF(r):
    """Antiderivative of F: (r−1)log(i(1−r)) − (1+r)log(1+r)."""
    return (r - 1) * np.log(1j * (1 - r)) - (1 + r) * np.log(1 + r)


def asym_dF(r):
    return -2.0 / (1 - r**2)


def asym_tail(x, alpha):
    """Two-term exponential expansions of the asymmetric invariant for |x| large."""
    x = np.asarray(x, dtype=float)
    a = alpha
    out = np.empty(x.shape, dtype=complex)
    p = x >= 0
    xp = x[p]
    c1 = (2j) ** (1 - 2 * a)
    c2 = (2j) ** (2 - 4 * a)
    out[p] = -1 + c1 * np.exp(-xp) + c2 * np.exp(-2 * xp) * (-0.5 + 2 * a**2 * np.log(2j) + a + a * xp)
    xm = x[~p]
    d2 = 2 ** (2 + 4 * a)
    out[~p] = 1 + 1j * np.exp(xm) * 2 ** (1 + 2 * a) + d2 * np.exp(2 * xm) * (
        -0.5 + 2 * a**2 * np.log(2) + a * xm - a)
    return out


def _asym_tail_integral(x, alpha, x_cut):
    """∫ Re r dx from ±x_cut outward to x, using the tail expansions."""
    a = alpha
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    p = x > x_cut
    if np.any(p):
        c1 = (2j) ** (1 - 2 * a)
        c2 = (2j) ** (2 - 4 * a)
        b0 = c2 * (-0.5 + 2 * a**2 * np.log(2j) + a)
        b1 = c2 * a

        def prim(s):
            return -s - c1 * np.exp(-s) - np.exp(-2 * s) * (b0 / 2 + b1 * (s / 2 + 0.25))

        out[p] = np.real(prim(x[p]) - prim(x_cut))
    m = x < -x_cut
    if np.any(m):
        d1 = 1j * 2 ** (1 + 2 * a)
        d = 2 ** (2 + 4 * a)
        e0 = d * (-0.5 + 2 * a**2 * np.log(2) - a)
        e1 = d * a

        def prim(s):
            return s + d1 * np.exp(s) + np.exp(2 * s) * (e0 / 2 + e1 * (s / 2 - 0.25))

        out[m] = np.real(prim(x[m]) - prim(-x_cut))
    return out


def solve_asym_pointwise(x, alpha, guess=None, tol=1e-14, maxit=50):
    """Complex Newton for x = F(r) + αℱ(r) at t = 0, seeded by the α = 0 solution."""
    x = np.asarray(x, dtype=float)
    if guess is None:
        e = np.exp(np.clip(x, -700, 700))
        r = (1 + 1j * e) / (1 - 1j * e)
    else:
        r = np.array(guess, dtype=complex)
    steps = [alpha] if guess is not None or alpha == 0 else np.linspace(0, alpha, 5)[1:]
    for a in steps:
        for _ in range(maxit):
            g = asym_F(r) + a * asym_calF(r) - x
            dg = asym_dF(r) + a * asym_F(r)
            d = g / dg
            r = r - d
            if np.max(np.abs(d)) < tol:
                break
    return r


def asym_residuals(u, v, x, t, alpha):
    """Real and imaginary parts of r t + F(r) + αℱ(r) − x with r = v + iu.

    These are the two real hodograph equations of the asymmetric family, taken
    on the principal branch of the complex logarithms.
    """
    r = np.asarray(v) + 1j * np.asarray(u)
    g = r * t + asym_F(r) + alpha * asym_calF(r) - x
    return g.real, g.imag


@dataclass(frozen=True)
class AsymData:
    """Asymmetric invariant r on Chebyshev nodes of [−x_cut, x_cut]."""

    alpha: float
    x_cut: float
    nodes: np.ndarray = field(repr=False)
    r: np.ndarray = field(repr=False)
    residual: float = 0.0

    def invariant(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape, dtype=complex)
        inside = np.abs(x) <= self.x_cut
        if np.any(inside):
            re = BarycentricInterpolator(self.nodes, self.r.real)(x[inside])
            im = BarycentricInterpolator(self.nodes, self.r.imag)(x[inside])
            out[inside] = re + 1j * im
        if np.any(~inside):
            out[~inside] = asym_tail(x[~inside], self.alpha)
        return out

    def v_integral(self, x):
        """∫_{−x_cut}^{x} v dx: Chebyshev integral inside, analytic tails outside."""
        x = np.asarray(x, dtype=float)
        n = len(self.nodes) - 1
        # nodes ascend, so reverse to the cos(πj/n) ordering of the DCT
        vals = self.r.real[::-1]
        coef = fft.dct(vals, type=1) / n
        coef[0] /= 2
        coef[-1] /= 2
        cheb = Chebyshev(coef, domain=[-self.x_cut, self.x_cut]).integ(lbnd=-self.x_cut)
        out = np.empty(x.shape)
        inside = np.abs(x) <= self.x_cut
        out[inside] = cheb(x[inside])
        right = x > self.x_cut
        out[right] = cheb(self.x_cut) + _asym_tail_integral(x[right], self.alpha, self.x_cut)
        left = x < -self.x_cut
        out[left] = _asym_tail_integral(x[left], self.alpha, self.x_cut)
        return out


def solve_asym_data(alpha: float, n_cheb: int = 512, x_cut: float = 13.0,
                    tol: float = 1e-10) -> AsymData:
    """Solve the t = 0 asymmetric hodograph equation on Chebyshev nodes."""
    j = np.arange(n_cheb + 1)
    nodes = -x_cut * np.cos(np.pi * j / n_cheb)
    r = solve_asym_pointwise(nodes, alpha)
    e1, e2 = asym_residuals(r.imag, r.real, nodes, 0.0, alpha)
    res = float(max(np.max(np.abs(e1)), np.max(np.abs(e2))))
    if not np.all(np.isfinite(r)) or res > tol:
        raise RuntimeError(f"asymmetric data Newton did not converge (residual {res:.3e})")
    return AsymData(alpha, x_cut, nodes, r, res)


def asym_initial_invariant(x, alpha: float) -> np.ndarray:
    return solve_asym_data(alpha).invariant(x)


def build_initial_data(case: InitialDataCase, grid: PeriodicGrid, model: NlsModel,
                       edge_tol: float = 1e-10) -> WaveField:
    """Sample the case on the grid and convert to ψ.

    Warns when the field at the domain edges exceeds ``edge_tol`` relative to
    its far-field value, which means the grid is too short for the case.
    """
    x = grid.nodes
    if case.name == "quintic_foc_asym":
        data = solve_asym_data(case.alpha)
        r = data.invariant(x)
        state = MadelungState(np.maximum(r.imag, 0.0), r.real)
        phi = data.v_integral(x)
        psi = psi_from_uv(state, grid, model, v_integral=phi)
    else:
        state = case.uv(x)
        if np.all(state.v == 0):
            psi = WaveField.from_values(grid, np.sqrt(state.u).astype(complex))
        else:
            psi = psi_from_uv(state, grid, model)
    with np.errstate(over="ignore"):
        far = case.uv(np.array([-1e3, 1e3])) if case.name != "quintic_foc_asym" else None
    if far is not None:
        edge = np.abs(np.sqrt(state.u[[0, -1]]) - np.sqrt(far.u))
        if np.max(edge) > edge_tol:
            warnings.warn(f"grid edge differs from the far field by {np.max(edge):.2e}", stacklevel=2)
    return psi
