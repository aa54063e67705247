"""Static quasi-local mass of graphical manifolds over Kottler reference spaces."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CheckFailure,
    ConfigError,
    ConstraintError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    PreconditionError,
    SingularValueError,
    StaticMassError,
)
from .reference_geometry import ReferenceSpace  # noqa: E402
from .graph_manifold import (  # noqa: E402
    GraphManifold,
    SlopeProfile,
    build_constant_graph,
    build_custom_graph,
    build_kottler_schwarzschild_graph,
)
from .quasilocal_energy import brown_york_energy, energy_report, penrose_gap  # noqa: E402
from .stability_analysis import (  # noqa: E402
    StabilityConstants,
    convergence_experiment,
    stability_report,
)

__all__ = [
    "__version__",
    "CheckFailure",
    "ConfigError",
    "ConstraintError",
    "ConvergenceError",
    "DivergenceError",
    "DomainError",
    "PreconditionError",
    "SingularValueError",
    "StaticMassError",
    "ReferenceSpace",
    "GraphManifold",
    "SlopeProfile",
    "build_constant_graph",
    "build_custom_graph",
    "build_kottler_schwarzschild_graph",
    "brown_york_energy",
    "energy_report",
    "penrose_gap",
    "StabilityConstants",
    "convergence_experiment",
    "stability_report",
]
