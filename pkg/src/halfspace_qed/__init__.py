"""Casimir-Polder shifts and decay-rate changes near an absorbing Lorentz half-space.

Natural units ``hbar = c = eps0 = 1`` throughout.  Geometry: vacuum for
``z > 0``, dielectric for ``z < 0``; the atom sits at height ``Z > 0``.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .medium import *  # noqa: F401,F403
from .optics import *  # noqa: F401,F403
from .quadrature import *  # noqa: F401,F403
from .propagator import *  # noqa: F401,F403
from .atom import *  # noqa: F401,F403
from .observables import *  # noqa: F401,F403
