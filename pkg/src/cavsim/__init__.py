"""Qualitative open-system model of the OH+ molecular ion in a single-mode cavity.

Submodules:

- ``qmath``: dense Hermitian eigensolver, propagators, density diagnostics
- ``model``: parameter records and Hamiltonians
- ``dynamics``: Lindblad channels and the split-step integrator
- ``analytic``: closed-form four-level solution
- ``scenario`` / ``cli``: JSON scenarios, presets, CSV/SVG output, sweeps
"""

from ._backend import BACKEND
from .errors import CavsimError, ConfigError, IntegrationError, ValidationError

__version__ = "0.1.0"

__all__ = ["BACKEND", "CavsimError", "ConfigError", "IntegrationError", "ValidationError"]
