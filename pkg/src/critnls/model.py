"""Model descriptor for the NLS family iε ψ_t + ε²/2 ψ_xx ± V(|ψ|²) ψ = 0."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

FOCUSING = "focusing"
DEFOCUSING = "defocusing"


@dataclass(frozen=True)
class NlsModel:
    """Power nonlinearity V(u) = u^s / s, optionally nonlocal.

    ``eta > 0`` replaces V(|ψ|²) by θ with θ − ε²η θ_xx = |ψ|² (cubic only).
    """

    power_s: int = 1
    sign: str = FOCUSING
    eta: float = 0.0
    epsilon: float = 0.1

    def __post_init__(self):
        if int(self.power_s) != self.power_s or self.power_s < 1:
            raise ValueError(f"power_s must be a positive integer, got {self.power_s}")
        if self.sign not in (FOCUSING, DEFOCUSING):
            raise ValueError(f"sign must be 'focusing' or 'defocusing', got {self.sign!r}")
        if self.eta < 0:
            raise ValueError("eta must be non-negative")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.eta > 0 and self.power_s != 1:
            raise ValueError("the nonlocal model is only defined for the cubic nonlinearity")
        if self.eta * self.epsilon**2 > 0.1:
            warnings.warn("eta*epsilon^2 > 0.1: nonlocal term is not a small correction", stacklevel=2)

    @property
    def rho(self) -> int:
        """+1 for focusing, -1 for defocusing."""
        return 1 if self.sign == FOCUSING else -1

    @property
    def nonlocal_(self) -> bool:
        return self.eta > 0

    def V(self, u):
        return u**self.power_s / self.power_s

    def dV(self, u):
        return u ** (self.power_s - 1)

    def d2V(self, u):
        s = self.power_s
        return (s - 1) * u ** (s - 2) if s > 1 else 0.0 * u
