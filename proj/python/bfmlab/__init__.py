"""Bilinear Fourier multiplier laboratory: torus grids, symbol application,
wavelet decompositions, symbol norms, and scaling sweeps."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
