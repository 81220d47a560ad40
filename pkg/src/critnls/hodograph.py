"""Dispersionless solutions, break-up points and the constants of the local asymptotics.

Conventions: Riemann invariants obey r_t + λ(r) r_x = 0 with λ± = v ± √(uV'(u))
(times i in the elliptic case); hodograph solutions read x = λ t + μ(r).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

from .madelung import (
    InitialDataCase,
    MadelungState,
    RiemannPair,
    ELLIPTIC,
    HYPERBOLIC,
    asym_F,
    asym_calF,
    asym_dF,
    solve_asym_pointwise,
)

PLUS = "plus"
MINUS = "minus"


# ---------------------------------------------------------------- data types

@dataclass(frozen=True)
class CriticalPoint:
    x0: float
    t0: float
    u0: float
    v0: float
    r_plus0: complex
    r_minus0: complex
    lambda_plus0: complex
    lambda_minus0: complex
    which_invariant_breaks: str
    xi0: complex = 0.0

    def __post_init__(self):
        if self.which_invariant_breaks == ELLIPTIC:
            if abs(self.lambda_minus0 - np.conj(self.lambda_plus0)) > 1e-12 * (1 + abs(self.lambda_plus0)):
                raise ValueError("elliptic critical point needs conjugate speeds")
        elif self.lambda_plus0 == self.lambda_minus0:
            raise ValueError("hyperbolic critical point needs distinct speeds")


@dataclass(frozen=True)
class HyperbolicConstants:
    alpha: float
    beta: float
    gamma: float
    rho: float
    sigma: float
    nu_plus: float
    nu_minus: float
    generic: bool = True


@dataclass(frozen=True)
class EllipticConstants:
    a_plus: complex
    c_plus_plus: complex
    lambda_pp0: complex
    r_mod: float
    psi_arg: float

    def __post_init__(self):
        if self.a_plus == 0:
            raise ValueError("a_plus vanishes: degenerate elliptic point")


class MultivaluedError(ValueError):
    """Raised for requests past the gradient catastrophe."""


# ---------------------------------------------------------------- vectorized Newton

def solve_hodograph_newton(system: Callable, guess, x, t: float, maxit: int = 50,
                           tol: float = 1e-13, rescue: bool = True):
    """Per-node Newton for S_i(y; x, t) = 0.

    ``system(y, x, t)`` returns residuals of shape (n, k) and Jacobians (n, k, k)
    for unknowns y of shape (n, k); real or complex. Nodes that fail are
    re-seeded from their nearest converged neighbour and retried once.
    Returns (y, residual_max_per_node, converged_mask).
    """
    x = np.asarray(x, dtype=float)
    y = np.array(guess, copy=True)
    if y.ndim == 1:
        y = y[:, None]

    def run(y, idx):
        ok = np.zeros(len(idx), dtype=bool)
        res = np.full(len(idx), np.inf)
        yy = y[idx].copy()
        xx = x[idx]
        for _ in range(maxit):
            F, J = system(yy, xx, t)
            res = np.max(np.abs(F), axis=1)
            ok = np.isfinite(res) & (res < tol * (1 + np.abs(xx)))
            if np.all(ok | ~np.isfinite(res)):
                break
            act = ~ok & np.isfinite(res)
            try:
                d = np.linalg.solve(J[act], F[act][..., None])[..., 0]
            except np.linalg.LinAlgError:
                d = np.array([np.linalg.lstsq(Ji, Fi, rcond=None)[0] for Ji, Fi in zip(J[act], F[act])])
            yy[act] = yy[act] - d
        F, _ = system(yy, xx, t)
        res = np.max(np.abs(F), axis=1)
        ok = np.isfinite(res) & (res < 1e3 * tol * (1 + np.abs(xx)))
        return yy, res, ok

    idx = np.arange(len(x))
    y_new, res, ok = run(y, idx)
    y[idx] = y_new
    if rescue and not np.all(ok) and np.any(ok):
        good = np.flatnonzero(ok)
        for i in np.flatnonzero(~ok):
            j = good[np.argmin(np.abs(good - i))]
            seed = y.copy()
            seed[i] = y[j]
            yi, ri, oi = run(seed, np.array([i]))
            if oi[0]:
                y[i], res[i], ok[i] = yi[0], ri[0], True
    return (y[:, 0] if np.ndim(guess) == 1 else y), res, ok


# ---------------------------------------------------------------- quintic profiles

def _sech2_derivs(z):
    S = 1.0 / np.cosh(z) ** 2
    T = np.tanh(z)
    return [S, -2 * S * T, 4 * S * T**2 - 2 * S**2, -8 * S * T**3 + 16 * S**2 * T]


def _tanh4_derivs(z):
    S = 1.0 / np.cosh(z) ** 2
    T = np.tanh(z)
    return [T**4, 4 * T**3 * S, 12 * T**2 * S**2 - 8 * T**4 * S,
            24 * T * S**3 - 80 * T**3 * S**2 + 16 * T**5 * S]


def quintic_profile(case: InitialDataCase, which: str, xi):
    """[φ, φ', φ'', φ'''] of the initial invariant r_which(ξ, 0); complex ξ allowed."""
    name = case.name
    A, B = case.A, case.B
    sgn = 1 if which == PLUS else -1
    if name in ("quintic_defoc_sech", "quintic_defoc_symmetric"):
        Au = A**2 if name == "quintic_defoc_sech" else A
        Bv = 0.0 if name == "quintic_defoc_sech" else B
        c = Au + Bv if which == PLUS else Bv - Au
        d = _sech2_derivs(xi)
        return [c * d[0] - Bv] + [c * dk for dk in d[1:]]
    if name == "quintic_defoc_dark":
        d = _tanh4_derivs(np.asarray(xi) / B)
        return [sgn * A * dk / B**k for k, dk in enumerate(d)]
    # r− is the Schwarz reflection of r+: r−(ξ) = conj(r+(conj ξ))
    z = xi if which == PLUS else np.conj(xi)
    if name == "quintic_foc_sech":
        out = [1j * A**2 * dk for dk in _sech2_derivs(z)]
    elif name == "quintic_foc_dark":
        out = [1j * dk for dk in _tanh4_derivs(z)]
    else:
        raise ValueError(f"no closed-form profile for case {name}")
    return out if which == PLUS else [np.conj(o) for o in out]


def _profile_scale(case: InitialDataCase) -> float:
    return case.B if case.name == "quintic_defoc_dark" else 1.0


def _solve_xi_real(case, which, x, t, maxit=200):
    """Monotone x = φ(ξ)t + ξ for real ξ (t at or before break-up), safeguarded Newton."""
    L = 40.0 * _profile_scale(case)
    grid = np.linspace(-L, L, 8001)
    xg = quintic_profile(case, which, grid)[0] * t + grid
    if np.any(np.diff(xg) < -1e-12):
        raise MultivaluedError("characteristics cross: time is past the break-up")
    xi = np.interp(x, xg, grid)
    lo = np.interp(x, xg, grid, left=-2 * L, right=grid[0])
    idx = np.clip(np.searchsorted(xg, x), 1, len(grid) - 1)
    lo = grid[idx - 1]
    hi = grid[idx]
    outside = (x < xg[0]) | (x > xg[-1])
    xi[outside] = x[outside] - quintic_profile(case, which, np.sign(x[outside]) * L)[0] * t
    for _ in range(maxit):
        p = quintic_profile(case, which, xi)
        g = p[0] * t + xi - x
        dg = p[1] * t + 1.0
        inside = ~outside
        lo = np.where(inside & (g < 0), np.maximum(lo, xi), lo)
        hi = np.where(inside & (g > 0), np.minimum(hi, xi), hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = g / dg
        new = xi - step
        bad = inside & (~np.isfinite(new) | (new <= lo) | (new >= hi))
        new = np.where(bad, 0.5 * (lo + hi), new)
        if np.all(np.abs(new - xi) < 1e-15 * (1 + np.abs(xi))):
            xi = new
            break
        xi = new
    return xi


def _solve_xi_complex(case, which, x, t, n_cont=None, maxit=80):
    """Complex ξ with x = φ(ξ)t + ξ, continued in time from ξ = x at t = 0."""
    x = np.asarray(x, dtype=float)
    xi = x.astype(complex)
    if t == 0:
        return xi
    n_cont = n_cont or 40
    for tk in np.linspace(0, t, n_cont + 1)[1:]:
        for _ in range(maxit):
            p = quintic_profile(case, which, xi)
            g = p[0] * tk + xi - x
            dg = p[1] * tk + 1.0
            d = g / dg
            xi = xi - d
            if np.max(np.abs(g)) < 1e-14 * (1 + np.max(np.abs(x))):
                break
    return xi


# ---------------------------------------------------------------- asymmetric r-form

def asym_G(r, alpha, k=0):
    """k-th derivative of G = F + αℱ."""
    if k == 0:
        return asym_F(r) + alpha * asym_calF(r)
    if k == 1:
        return asym_dF(r) + alpha * asym_F(r)
    if k == 2:
        return -4 * r / (1 - r**2) ** 2 + alpha * asym_dF(r)
    if k == 3:
        return -4 * (1 + 3 * r**2) / (1 - r**2) ** 3 - 4 * alpha * r / (1 - r**2) ** 2
    raise ValueError("k must be 0..3")


def _solve_asym_r(alpha, x, t, n_cont=40, maxit=80):
    r = solve_asym_pointwise(x, alpha)
    if t == 0:
        return r
    for tk in np.linspace(0, t, n_cont + 1)[1:]:
        for _ in range(maxit):
            g = r * tk + asym_G(r, alpha) - x
            d = g / (tk + asym_G(r, alpha, 1))
            r = r - d
            if np.max(np.abs(g)) < 1e-13:
                break
    return r


# ---------------------------------------------------------------- cubic defocusing (sech² data)

def tian_ye_mu(r_plus, r_minus, case: InitialDataCase):
    """Closed-form μ± for u(x,0) = a² sech²x, v = 0 on the left monotone region."""
    if case.name not in ("cubic_defoc_sech", "nonlocal_defoc_sech"):
        raise ValueError("closed-form μ± exist only for cubic defocusing sech data")
    a = case.A
    if np.isrealobj(r_plus) and np.isrealobj(r_minus):
        if np.any(np.abs(r_plus) >= 2 * a) or np.any(np.abs(r_minus) >= 2 * a):
            raise ValueError("invariants outside (−2a, 2a)")
    return _tian_ye_raw(r_plus, r_minus, a)


def _tian_ye_raw(rp, rm, a):
    spp, spm = np.sqrt(2 * a + rp), np.sqrt(2 * a + rm)
    smp, smm = np.sqrt(2 * a - rp), np.sqrt(2 * a - rm)
    base = -np.log(spp + spm) - np.log(smp + smm) + np.log(rp - rm)
    corr = (spp * spm - smp * smm) / (rp - rm)
    return base + corr, base - corr


def tian_ye_theta_prime(tau, a: float = 1.0):
    """θ'(τ) = ½ log((4a² − τ²)/τ²) for sech² data."""
    return 0.5 * np.log((4 * a**2 - tau**2) / tau**2)


def tian_ye_mu_quadrature(r_plus: float, r_minus: float, a: float = 1.0,
                          theta_prime: Optional[Callable] = None, tol: float = 1e-12):
    """Quadrature form of μ±: −(2/(π(r+ − r−))) ∫_{r−}^{r+} √((τ−r∓)/(r±−τ)) θ'(τ) dτ.

    The overall sign follows x = λt + μ with physical speeds. The substitution
    τ = r− + (r+ − r−) sin²φ removes the endpoint square roots; the log
    singularity of θ' at τ = 0 is split off explicitly.
    """
    tp = theta_prime or (lambda tau: tian_ye_theta_prime(tau, a))
    d = r_plus - r_minus
    pts = []
    if r_minus < 0 < r_plus:
        pts = [np.arcsin(np.sqrt(-r_minus / d))]

    def tau(phi):
        return r_minus + d * np.sin(phi) ** 2

    kw = dict(epsabs=tol, epsrel=tol, limit=400)
    if pts:
        kw["points"] = pts
    mp = integrate.quad(lambda p: np.sin(p) ** 2 * tp(tau(p)), 0, np.pi / 2, **kw)[0]
    mm = integrate.quad(lambda p: np.cos(p) ** 2 * tp(tau(p)), 0, np.pi / 2, **kw)[0]
    return -4 / np.pi * mp, -4 / np.pi * mm


def _cstep(f, z, h=1e-30):
    """First derivative of a real-analytic function by the complex step."""
    return np.imag(f(z + 1j * h)) / h


def tian_ye_derivative(case, r_plus, r_minus, which: str, wrt: str, order: int = 1, h: float = 1e-3):
    """∂^order μ_which / ∂r_wrt^order; order 1 by complex step, higher by Richardson-extrapolated differences."""
    k = 0 if which == PLUS else 1

    def f(z):
        if wrt == PLUS:
            return _tian_ye_raw(z, r_minus + 0 * z, case.A)[k]
        return _tian_ye_raw(r_plus + 0 * z, z, case.A)[k]

    z0 = r_plus if wrt == PLUS else r_minus
    if order == 1:
        return _cstep(f, z0)

    def g(z):
        return _cstep(f, z)

    def fd(hh):
        if order == 2:
            return (g(z0 + hh) - g(z0 - hh)) / (2 * hh)
        return (g(z0 + hh) - 2 * g(z0) + g(z0 - hh)) / hh**2

    if order not in (2, 3):
        raise ValueError("order must be 1, 2 or 3")
    return (4 * fd(h / 2) - fd(h)) / 3


def tian_ye_mu_minus_rrr(case, r_plus, r_minus):
    """Closed-form ∂³μ−/∂r−³ for sech² data."""
    a = case.A
    rp, rm = r_plus, r_minus
    poly1 = 48 * a**2 + 1.5 * rp**2 + 17.5 * rm**2 - 7 * rm * rp - 56 * a * rm + 8 * a * rp
    poly2 = 48 * a**2 + 1.5 * rp**2 + 17.5 * rm**2 - 7 * rm * rp + 56 * a * rm - 8 * a * rp
    den = 2 * (rm - rp) ** 4
    return (np.sqrt((2 * a - rp) ** 3 / (2 * a - rm) ** 5) * poly1
            - np.sqrt((2 * a + rp) ** 3 / (2 * a + rm) ** 5) * poly2) / den


def _cubic_defoc_system(case):
    a = case.A

    def system(y, x, t):
        rp, rm = y[:, 0], y[:, 1]
        with np.errstate(invalid="ignore", divide="ignore"):
            mp, mm = _tian_ye_raw(rp, rm, a)
            h = 1e-30
            dpp, dmp = (np.imag(m) / h for m in _tian_ye_raw(rp + 1j * h, rm + 0j, a))
            dpm, dmm = (np.imag(m) / h for m in _tian_ye_raw(rp + 0j, rm + 1j * h, a))
        F = np.stack([(3 * rp + rm) / 4 * t + mp - x, (rp + 3 * rm) / 4 * t + mm - x], axis=1)
        J = np.empty((len(x), 2, 2))
        J[:, 0, 0] = 3 * t / 4 + dpp
        J[:, 0, 1] = t / 4 + dpm
        J[:, 1, 0] = t / 4 + dmp
        J[:, 1, 1] = 3 * t / 4 + dmm
        return F, J

    return system


def _solve_cubic_defoc(case, x, t, n_cont=20):
    """Left region via the closed form; the right region by the x → −x, v → −v mirror."""
    a = case.A
    x = np.asarray(x, dtype=float)
    rp = np.empty_like(x)
    rm = np.empty_like(x)
    left = x <= 0
    for mask, sgn in ((left, 1.0), (~left, -1.0)):
        if not np.any(mask):
            continue
        xs = sgn * x[mask]
        s = 1 / np.cosh(xs)
        y = np.stack([2 * a * s, -2 * a * s], axis=1)
        system = _cubic_defoc_system(case)
        for tk in np.linspace(0, t, n_cont + 1)[1:]:
            y_new, res, ok = solve_hodograph_newton(system, y, xs, tk, maxit=60, tol=1e-14)
            if not np.all(ok) or np.any(np.abs(y_new) >= 2 * a):
                raise ValueError("point lies in the middle region between the humps, "
                                 "which the closed form does not cover")
            y = y_new
        if sgn > 0:
            rp[mask], rm[mask] = y[:, 0], y[:, 1]
        else:
            rp[mask], rm[mask] = -y[:, 1], -y[:, 0]
    return rp, rm


# ---------------------------------------------------------------- cubic focusing (sech data)

def _cubic_foc_system(A0):
    @np.errstate(divide="ignore", invalid="ignore")
    def system(y, x, t):
        # the initial guess hits w² + u = 0 at x = 0; Newton's rescue step handles those nodes
        u, v = y[:, 0], y[:, 1]
        w = -0.5 * v + 1j * A0
        su = np.sqrt(u)
        z = w / su
        root1 = np.sqrt(1 + z**2)
        s2 = np.sqrt(w**2 + u)
        e1 = v * t + np.real(np.arcsinh(z)) - x
        e2 = t * u - np.real(s2)
        dz_du = -0.5 * w / u**1.5
        dz_dv = -0.5 / su
        J = np.empty((len(x), 2, 2))
        J[:, 0, 0] = np.real(dz_du / root1)
        J[:, 0, 1] = t + np.real(dz_dv / root1)
        J[:, 1, 0] = t - np.real(0.5 / s2)
        J[:, 1, 1] = -np.real(-0.5 * w / s2)
        return np.stack([e1, e2], axis=1), J

    return system


def cubic_foc_residual(u, v, x, t, A0=1.0):
    y = np.stack([np.atleast_1d(u), np.atleast_1d(v)], axis=1).astype(float)
    F, _ = _cubic_foc_system(A0)(y, np.atleast_1d(np.asarray(x, float)), t)
    return F


def _solve_cubic_foc(case, x, t, n_cont=40):
    A0 = case.A
    x = np.asarray(x, dtype=float)
    xs = np.abs(x)
    u = A0**2 / np.cosh(xs) ** 2
    v = np.zeros_like(xs)
    y = np.stack([u, v], axis=1)
    system = _cubic_foc_system(A0)
    if t > 0:
        for tk in np.linspace(0, t, n_cont + 1)[1:]:
            y, res, ok = solve_hodograph_newton(system, y, xs, tk, maxit=80, tol=1e-14)
            if not np.all(ok):
                raise RuntimeError("Newton failed for the focusing cubic hodograph system")
    u, v = y[:, 0], y[:, 1]
    return u, np.where(x < 0, -v, v)


# ---------------------------------------------------------------- break-up points

def _hyperbolic_quintic_cp(case, which=None):
    L = 30.0 * _profile_scale(case)
    grid = np.linspace(-L, L, 60001)
    cands = []
    for w in ([which] if which else [PLUS, MINUS]):
        d1 = quintic_profile(case, w, grid)[1]
        i = int(np.argmin(d1))
        if d1[i] >= 0:
            continue
        lo, hi = grid[max(i - 2, 0)], grid[min(i + 2, len(grid) - 1)]
        xi = optimize.brentq(lambda z: quintic_profile(case, w, z)[2], lo, hi, xtol=1e-15, rtol=1e-15)
        p = quintic_profile(case, w, xi)
        t0 = -1.0 / p[1]
        cands.append((t0, w, xi, p[0]))
    if not cands:
        raise ValueError("no gradient catastrophe for this case")
    # earliest break; a tie goes to the minus invariant
    cands.sort(key=lambda c: (round(c[0], 12), c[1] != MINUS))
    t0, w, xi, r0 = cands[0]
    x0 = r0 * t0 + xi
    other = MINUS if w == PLUS else PLUS
    eta = _solve_xi_real(case, other, np.array([x0]), t0)[0]
    r_other = quintic_profile(case, other, eta)[0]
    rp, rm = (r0, r_other) if w == PLUS else (r_other, r0)
    return CriticalPoint(float(x0), float(t0), float((rp - rm) / 2), float((rp + rm) / 2),
                         float(rp), float(rm), float(rp), float(rm), w, float(xi))


def _elliptic_quintic_cp(case):
    if case.name == "quintic_foc_asym":
        return _asym_cp(case.alpha)

    @np.errstate(all="ignore")
    def eqs(p):
        xi = p[0] + 1j * p[1]
        ph = quintic_profile(case, PLUS, xi)
        t = -1.0 / ph[1]
        x = ph[0] * t + xi
        return [np.imag(t), np.imag(x)]

    sols = []
    if case.name == "quintic_foc_sech":
        seeds = [(0.0, -0.65)]
    else:
        seeds = [(a, b) for a in np.linspace(-2.5, 2.5, 11) for b in np.linspace(-1.4, 1.4, 15) if abs(b) > 0.05]
    for s in seeds:
        # the seed scan crosses poles of the profile
        with np.errstate(all="ignore"):
            sol = optimize.root(eqs, s, method="hybr", tol=1e-15)
        if not np.all(np.isfinite(sol.x)) or np.max(np.abs(eqs(sol.x))) > 1e-12:
            continue
        xi = sol.x[0] + 1j * sol.x[1]
        if abs(xi.imag) >= np.pi / 2 * 0.98:
            continue
        ph = quintic_profile(case, PLUS, xi)
        t = np.real(-1.0 / ph[1])
        if t > 0 and np.imag(ph[0]) > 0:
            sols.append((t, xi))
    if not sols:
        raise RuntimeError("elliptic break-up point not found")
    t0, xi0 = min(sols, key=lambda s: s[0])
    ph = quintic_profile(case, PLUS, xi0)
    r0 = ph[0]
    x0 = float(np.real(r0 * t0 + xi0))
    u0, v0 = float(r0.imag), float(r0.real)
    if abs(x0) < 1e-14:
        x0 = 0.0
    return CriticalPoint(x0, float(t0), u0, v0, complex(r0), complex(np.conj(r0)),
                         complex(r0), complex(np.conj(r0)), ELLIPTIC, complex(xi0))


def _asym_cp(alpha):
    u0 = optimize.brentq(lambda u: 2 * u + (u * u + 1) * np.arctan((1 - u * u) / (2 * u)), 1.0 + 1e-9, 10.0,
                         xtol=1e-15)
    r = 1j * u0

    def eqs(p, a):
        rr = p[0] + 1j * p[1]
        t = -asym_G(rr, a, 1)
        x = rr * t + asym_G(rr, a)
        return [np.imag(t), np.imag(x)]

    p = np.array([r.real, r.imag])
    for a in np.linspace(0, alpha, max(2, int(np.ceil(abs(alpha) / 0.02)) + 1))[1:]:
        sol = optimize.root(eqs, p, args=(a,), method="hybr", tol=1e-15)
        p = sol.x
    rr = p[0] + 1j * p[1]
    t0 = float(np.real(-asym_G(rr, alpha, 1)))
    x0 = float(np.real(rr * t0 + asym_G(rr, alpha)))
    return CriticalPoint(x0, t0, float(rr.imag), float(rr.real), complex(rr), complex(np.conj(rr)),
                         complex(rr), complex(np.conj(rr)), ELLIPTIC, complex(rr))


def _cubic_defoc_cp(case):
    a = case.A

    def eqs(p):
        rp, rm, t, x = p
        e1 = 0.75 * t - (np.sqrt((2 * a + rp) ** 3 / (2 * a + rm)) - np.sqrt((2 * a - rp) ** 3 / (2 * a - rm))) / (rp - rm) ** 2
        e2 = (np.sqrt((2 * a + rp) ** 3 / (2 * a + rm) ** 3) * (8 * a + 5 * rm - rp)
              - np.sqrt((2 * a - rp) ** 3 / (2 * a - rm) ** 3) * (8 * a - 5 * rm + rp))
        mp, mm = _tian_ye_raw(rp, rm, a)
        e3 = (3 * rp + rm) / 4 * t + mp - x
        e4 = (rp + 3 * rm) / 4 * t + mm - x
        return [e1, e2, e3, e4]

    sol = optimize.root(eqs, [0.3 * a, -1.4 * a, 1.5 / a, -2.0], method="hybr", tol=1e-15)
    if not sol.success and np.max(np.abs(eqs(sol.x))) > 1e-12:
        raise RuntimeError("cubic defocusing break-up system did not converge")
    rp, rm, t0, x0 = sol.x
    return CriticalPoint(float(x0), float(t0), float(((rp - rm) / 4) ** 2), float((rp + rm) / 2),
                         float(rp), float(rm), float((3 * rp + rm) / 4), float((rp + 3 * rm) / 4), MINUS)


def _cubic_foc_cp(case):
    A0 = case.A

    def t_of_u(u):
        return np.sqrt(u - A0**2) / u

    u0 = optimize.brentq(lambda u: _cstep(t_of_u, u), 1.01 * A0**2, 10 * A0**2, xtol=1e-15, rtol=1e-15)
    t0 = float(t_of_u(u0))
    c = np.sqrt(u0)
    r0 = 2j * c
    return CriticalPoint(0.0, t0, float(u0), 0.0, complex(r0), complex(-r0), complex(1j * c), complex(-1j * c),
                         ELLIPTIC)


def find_critical_point(case: InitialDataCase, which: Optional[str] = None) -> CriticalPoint:
    """Locate the first gradient or elliptic umbilic catastrophe of the case.

    ``which`` selects the breaking invariant for hyperbolic quintic cases
    (default: the earliest break, ties going to the minus invariant).
    """
    name = case.name
    if name in ("cubic_defoc_sech", "nonlocal_defoc_sech"):
        return _cubic_defoc_cp(case)
    if name in ("cubic_foc_sech", "nonlocal_foc_sech"):
        return _cubic_foc_cp(case)
    if case.elliptic:
        return _elliptic_quintic_cp(case)
    return _hyperbolic_quintic_cp(case, which)


# ---------------------------------------------------------------- semiclassical evaluation

def solve_riemann_wave(case: InitialDataCase, x, t: float, cp: Optional[CriticalPoint] = None) -> RiemannPair:
    """Invariants of a quintic case by characteristics (t up to the break-up time)."""
    if case.power_s != 2:
        raise ValueError("characteristics are decoupled only for quintic cases")
    x = np.asarray(x, dtype=float)
    cp = cp or find_critical_point(case)
    if t > cp.t0 * (1 + 1e-12):
        raise MultivaluedError(f"t = {t} is past the break-up time t0 = {cp.t0:.12g}")
    if case.elliptic:
        if case.name == "quintic_foc_asym":
            rp = _solve_asym_r(case.alpha, x, t)
        else:
            xi = _solve_xi_complex(case, PLUS, x, t)
            rp = quintic_profile(case, PLUS, xi)[0]
        return RiemannPair(rp, np.conj(rp), ELLIPTIC, rp, np.conj(rp))
    out = []
    for w in (PLUS, MINUS):
        xi = _solve_xi_real(case, w, x, t)
        out.append(quintic_profile(case, w, xi)[0])
    return RiemannPair(out[0], out[1], HYPERBOLIC, out[0], out[1])


def quintic_hodograph_residual(case, pair: RiemannPair, x, t):
    """|x − r t − G(r)| of the characteristic relation, via the foot point ξ."""
    if case.name == "quintic_foc_asym":
        r = pair.r_plus
        return np.abs(r * t + asym_G(r, case.alpha) - x)
    res = []
    for w, r in ((PLUS, pair.r_plus), (MINUS, pair.r_minus)):
        xi = x - r * t
        res.append(np.abs(quintic_profile(case, w, xi)[0] - r))
    return np.maximum(*res)


def hodograph_residual(case: InitialDataCase, state: MadelungState, x, t: float):
    """Pointwise residual of the implicit equations defining the dispersionless solution."""
    from .madelung import riemann_invariants
    x = np.asarray(x, dtype=float)
    name = case.name
    if name in ("cubic_foc_sech", "nonlocal_foc_sech"):
        xs = np.abs(x)
        v = np.where(x < 0, -state.v, state.v)
        return np.max(np.abs(cubic_foc_residual(state.u, v, xs, t, case.A)), axis=1)
    pair = riemann_invariants(state, case.model(1.0))
    if case.power_s == 2:
        return quintic_hodograph_residual(case, pair, x, t)
    rp, rm = np.real(pair.r_plus), np.real(pair.r_minus)
    left = x <= 0
    rp_l = np.where(left, rp, -rm)
    rm_l = np.where(left, rm, -rp)
    xs = np.where(left, x, -x)
    mp, mm = _tian_ye_raw(rp_l, rm_l, case.A)
    return np.maximum(np.abs((3 * rp_l + rm_l) / 4 * t + mp - xs), np.abs((rp_l + 3 * rm_l) / 4 * t + mm - xs))


def eval_semiclassical(case: InitialDataCase, x, t: float, cp: Optional[CriticalPoint] = None) -> MadelungState:
    """Dispersionless (u, v) at time t ≤ t0."""
    x = np.asarray(x, dtype=float)
    cp = cp or find_critical_point(case)
    if t > cp.t0 * (1 + 1e-12):
        raise MultivaluedError(f"t = {t} is past the break-up time t0 = {cp.t0:.12g}")
    if t == 0:
        return case.uv(x)
    name = case.name
    if case.power_s == 2:
        pair = solve_riemann_wave(case, x, t, cp)
        if case.elliptic:
            return MadelungState(np.maximum(pair.r_plus.imag, 0.0), pair.r_plus.real)
        return MadelungState(np.maximum((pair.r_plus - pair.r_minus) / 2, 0.0), (pair.r_plus + pair.r_minus) / 2)
    if name in ("cubic_defoc_sech", "nonlocal_defoc_sech"):
        rp, rm = _solve_cubic_defoc(case, x, t)
        return MadelungState(((rp - rm) / 4) ** 2, (rp + rm) / 2)
    u, v = _solve_cubic_foc(case, x, t)
    return MadelungState(u, v)


def semiclassical_invariants(case: InitialDataCase, x, t: float, cp: Optional[CriticalPoint] = None) -> RiemannPair:
    from .madelung import riemann_invariants
    st = eval_semiclassical(case, x, t, cp)
    return riemann_invariants(st, case.model(1.0))


# ---------------------------------------------------------------- constants

def _root7(z):
    return np.sign(z) * np.abs(z) ** (1.0 / 7.0)


def hyperbolic_constants(case: InitialDataCase, cp: Optional[CriticalPoint] = None) -> HyperbolicConstants:
    """α, β, γ, ρ, σ and ν± for a break of the minus invariant (plus handled by symmetry)."""
    if case.elliptic:
        raise ValueError("hyperbolic constants need a defocusing case")
    cp = cp or find_critical_point(case)
    u0 = cp.u0
    name = case.name
    if name in ("cubic_defoc_sech", "nonlocal_defoc_sech"):
        if cp.which_invariant_breaks != MINUS:
            raise ValueError("cubic defocusing constants are for the minus break")
        rp, rm = cp.r_plus0, cp.r_minus0
        alpha = tian_ye_derivative(case, rp, rm, PLUS, PLUS, 1) + 0.75 * cp.t0
        gamma = -tian_ye_derivative(case, rp, rm, MINUS, MINUS, 3)
        beta = 0.75 / (cp.lambda_minus0 - cp.lambda_plus0)
        vp = 1.0
        rho = -(1.0 - 4.0 * case.eta * u0) / (16.0 * u0 * vp)
    else:
        w = cp.which_invariant_breaks
        other = PLUS if w == MINUS else MINUS
        xi_b = cp.xi0.real if isinstance(cp.xi0, complex) else cp.xi0
        pb = quintic_profile(case, w, xi_b)
        r_other = cp.r_plus0 if other == PLUS else cp.r_minus0
        eta = cp.x0 - r_other * cp.t0
        po = quintic_profile(case, other, eta)
        g1_other = 1.0 / po[1]
        g3_break = (3 * pb[2] ** 2 - pb[1] * pb[3]) / pb[1] ** 5
        alpha = g1_other + cp.t0
        gamma = -g3_break
        beta = 1.0 / (cp.lambda_minus0 - cp.lambda_plus0) if w == MINUS else 1.0 / (cp.lambda_plus0 - cp.lambda_minus0)
        rho = -1.0 / (16.0 * u0 * u0)
    sigma = -rho
    generic = all(abs(c) > 1e-12 for c in (alpha, beta, gamma)) and abs(rho) > 1e-12 / u0
    if generic:
        nu_m = _root7(beta**3 / (12**3 * rho**3 * gamma))
        nu_p = _root7(beta**9 / (12**2 * rho**2 * gamma**3))
    else:
        nu_m = nu_p = float("nan")
    return HyperbolicConstants(float(alpha), float(beta), float(gamma), float(rho), float(sigma),
                               float(nu_p), float(nu_m), bool(generic))


def nongeneric_eta(case: InitialDataCase, cp: Optional[CriticalPoint] = None) -> float:
    """η* = 1/(4u0) at which ρ vanishes for the nonlocal defocusing model."""
    if case.name not in ("nonlocal_defoc_sech", "cubic_defoc_sech"):
        raise ValueError("η* is defined for the nonlocal defocusing family")
    cp = cp or find_critical_point(case)
    return 1.0 / (4.0 * cp.u0)


def elliptic_constants(case: InitialDataCase, cp: Optional[CriticalPoint] = None) -> EllipticConstants:
    if not case.elliptic:
        raise ValueError("elliptic constants need a focusing case")
    cp = cp or find_critical_point(case)
    u0 = cp.u0
    name = case.name
    if name in ("cubic_foc_sech", "nonlocal_foc_sech"):
        a_plus = -1j * np.sqrt(u0) / (4 * case.A**3)
        c = (1 + 4 * case.eta * u0) / (8j * np.sqrt(u0))
        lam = -0.75
    else:
        if name == "quintic_foc_asym":
            a_plus = asym_G(cp.r_plus0, case.alpha, 2)
        else:
            p = quintic_profile(case, PLUS, cp.xi0)
            a_plus = -p[2] / p[1] ** 3
        c = 1.0 / (8j * u0)
        lam = -1.0
    re = -1j / a_plus
    return EllipticConstants(complex(a_plus), complex(c), complex(lam), float(abs(re)), float(np.angle(re)))


# ---------------------------------------------------------------- report

def _fmt(v):
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        if v.imag == 0:
            return f"{v.real:.12g}"
        return f"{v.real:.12g}{v.imag:+.12g}j"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def critical_point_report(case: InitialDataCase, cp: CriticalPoint, constants=None) -> str:
    """Key = value text with 12 significant digits."""
    lines = [f"case = {case.name}", f"A = {_fmt(case.A)}", f"B = {_fmt(case.B)}",
             f"alpha_asym = {_fmt(case.alpha)}", f"eta = {_fmt(case.eta)}"]
    for k, v in asdict(cp).items():
        lines.append(f"{k} = {_fmt(v)}")
    if constants is not None:
        for k, v in asdict(constants).items():
            lines.append(f"{k} = {_fmt(v)}")
    return "\n".join(lines) + "\n"
