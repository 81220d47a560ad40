"""Periodic Fourier grids, spectral differentiation, filtering and conserved functionals."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import fft

from .model import NlsModel


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid on [-length/2, length/2) with the matching FFT wavenumbers."""

    n_modes: int
    length: float
    nodes: np.ndarray = field(repr=False)
    wavenumbers: np.ndarray = field(repr=False)

    @property
    def dx(self) -> float:
        return self.length / self.n_modes

    @property
    def k_max(self) -> float:
        return np.pi * self.n_modes / self.length


def make_grid(n_modes: int, length: float) -> PeriodicGrid:
    n = int(n_modes)
    if n != n_modes or n < 8 or n & (n - 1):
        raise ValueError(f"n_modes must be a power of two >= 8, got {n_modes}")
    if not length > 0:
        raise ValueError(f"length must be positive, got {length}")
    x = -0.5 * length + length / n * np.arange(n)
    k = 2 * np.pi / length * fft.fftfreq(n, d=1.0 / n)
    x.setflags(write=False)
    k.setflags(write=False)
    return PeriodicGrid(n, float(length), x, k)


class WaveField:
    """Complex samples on a PeriodicGrid together with their Fourier amplitudes.

    ``coefficients`` are the DFT of ``values`` divided by ``n_modes``, so a unit
    plane wave has a unit coefficient.

    Build with :meth:`from_values` or :meth:`from_coefficients`; both arrays are
    read-only so a field can be shared freely.
    """

    __slots__ = ("grid", "values", "coefficients")

    def __init__(self, grid: PeriodicGrid, values: np.ndarray, coefficients: np.ndarray):
        values = np.asarray(values, dtype=complex)
        coefficients = np.asarray(coefficients, dtype=complex)
        if values.shape != (grid.n_modes,) or coefficients.shape != (grid.n_modes,):
            raise ValueError("field arrays must match the grid size")
        values.setflags(write=False)
        coefficients.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "coefficients", coefficients)

    def __setattr__(self, name, value):
        raise AttributeError("WaveField is immutable")

    @classmethod
    def from_values(cls, grid: PeriodicGrid, values) -> "WaveField":
        v = np.array(values, dtype=complex)
        return cls(grid, v, fft.fft(v) / grid.n_modes)

    @classmethod
    def from_coefficients(cls, grid: PeriodicGrid, coefficients) -> "WaveField":
        c = np.array(coefficients, dtype=complex)
        return cls(grid, fft.ifft(c) * grid.n_modes, c)

    def __repr__(self):
        return f"WaveField(n_modes={self.grid.n_modes}, length={self.grid.length})"


def spectral_derivative(f: WaveField, order: int = 1) -> WaveField:
    """Multiply the Fourier coefficients by (ik)^order."""
    if order < 1 or int(order) != order:
        raise ValueError("order must be a positive integer")
    k = f.grid.wavenumbers
    mult = (1j * k) ** order
    if order % 2 == 1:
        # the Nyquist mode has no odd derivative for real data
        mult = mult.copy()
        mult[f.grid.n_modes // 2] = 0.0
    return WaveField.from_coefficients(f.grid, f.coefficients * mult)


def krasny_filter(f: WaveField, threshold: float = 1e-12) -> WaveField:
    """Zero every coefficient whose modulus is below ``threshold``."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    c = f.coefficients
    small = np.abs(c) < threshold
    if not small.any():
        return f
    c = np.where(small, 0.0, c)
    return WaveField.from_coefficients(f.grid, c)


def resolution_tail(f: WaveField, fraction: float = 0.1) -> float:
    """Largest normalised coefficient modulus in the top ``fraction`` of wavenumbers."""
    c = np.abs(fft.fftshift(f.coefficients))
    n = f.grid.n_modes
    m = max(1, int(round(fraction * n / 2)))
    return float(max(c[:m].max(), c[n - m :].max()))


def mass(psi: WaveField) -> float:
    """∫|ψ|² dx with the periodic rectangle rule."""
    return float(np.sum(np.abs(psi.values) ** 2) * psi.grid.dx)


def nls_energy(psi: WaveField, model: NlsModel) -> float:
    """Conserved energy ∫ ε²/2 |ψ_x|² − ρ/(s(s+1)) |ψ|^{2s+2} dx.

    For the nonlocal model the potential part is ρ/2 ∫ θ |ψ|² dx.
    """
    eps = model.epsilon
    dx = psi.grid.dx
    psi_x = spectral_derivative(psi, 1).values
    kinetic = 0.5 * eps**2 * np.sum(np.abs(psi_x) ** 2) * dx
    u = np.abs(psi.values) ** 2
    if model.nonlocal_:
        theta = nonlocal_theta_values(u, psi.grid, model)
        potential = 0.5 * model.rho * np.sum(theta * u) * dx
    else:
        s = model.power_s
        potential = model.rho / (s * (s + 1)) * np.sum(u ** (s + 1)) * dx
    return float(kinetic - potential)


def nonlocal_theta_values(u: np.ndarray, grid: PeriodicGrid, model: NlsModel) -> np.ndarray:
    """Real solution θ of θ − ε²η θ_xx = u on the grid."""
    if model.eta == 0:
        return np.array(u, dtype=float)
    k2 = grid.wavenumbers**2
    return fft.ifft(fft.fft(u) / (1.0 + model.epsilon**2 * model.eta * k2)).real


def write_snapshot(path, psi: WaveField) -> None:
    """Tab separated table x, Re ψ, Im ψ with 17 significant digits."""
    data = np.column_stack([psi.grid.nodes, psi.values.real, psi.values.imag])
    np.savetxt(path, data, fmt="%.17g", delimiter="\t", header="x\tre_psi\timag_psi", comments="")


def read_snapshot(path) -> WaveField:
    data = np.loadtxt(path, skiprows=1, delimiter="\t", ndmin=2)
    x = data[:, 0]
    n = len(x)
    length = (x[1] - x[0]) * n
    grid = make_grid(n, length)
    return WaveField.from_values(grid, data[:, 1] + 1j * data[:, 2])
