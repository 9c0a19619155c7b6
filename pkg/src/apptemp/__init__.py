"""Apparent temperatures of quantum systems from their heat-exchange channels.

Submodules: :mod:`operators` (validated states and operators),
:mod:`eigenops` (Bohr frequencies and ladder operators), :mod:`thermo`
(apparent temperatures, spectral densities, heat flows), :mod:`dynamics`
(GKSL generators, steady states, collisional simulator), :mod:`models`
(concrete systems) and :mod:`experiments` (reproducible runs).
"""
__version__ = "0.1.0"

from .errors import ApptempError  # noqa: E402,F401
