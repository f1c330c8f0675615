"""Hulthen potential with position-dependent mass: closed-form bound states
from the Nikiforov-Uvarov method and a finite-difference oracle that checks them."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ComplexParameterError,
    DomainError,
    OracleNonConvergence,
    ParameterError,
    PDMError,
    QuantumNumberError,
)
from .model import REFERENCE, ModelParams  # noqa: E402
from .spectrum import bound_state, bound_state_count, bound_states, energy_level  # noqa: E402

__all__ = [
    "ComplexParameterError",
    "DomainError",
    "ModelParams",
    "OracleNonConvergence",
    "PDMError",
    "ParameterError",
    "QuantumNumberError",
    "REFERENCE",
    "bound_state",
    "bound_state_count",
    "bound_states",
    "energy_level",
]
