"""Single-track railway dispatching compiled to QUBO form."""

from ._railq import (
    CapacityError,
    DomainError,
    InfeasibleModelError,
    Instance,
    ModelError,
    ParameterError,
    Qubo,
    anneal,
    build_qubo,
    check,
    equivalent,
    objective,
    solve_reference,
    spectrum,
)

__all__ = [
    "CapacityError",
    "DomainError",
    "InfeasibleModelError",
    "Instance",
    "ModelError",
    "ParameterError",
    "Qubo",
    "anneal",
    "build_qubo",
    "check",
    "equivalent",
    "objective",
    "solve_reference",
    "spectrum",
]
