"""Small-dispersion NLS toolkit: evolution, dispersionless limits, Painleve asymptotics."""

from .model import NlsModel
from .spectral import PeriodicGrid, WaveField, make_grid

__all__ = ["NlsModel", "PeriodicGrid", "WaveField", "make_grid"]
__version__ = "0.1.0"
