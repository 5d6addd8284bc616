"""Mass-preserving two-step Lagrange-Galerkin solver for convection-diffusion."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
