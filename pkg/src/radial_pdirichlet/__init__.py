"""Radially symmetric minimizers of the weighted p-Dirichlet energy between annuli.

The energy of a map ``h: A(1, r) -> A(1, R)`` is ``int ||Dh||^p / |h|^p`` for
``1 <= p <= 2``; its minimizer among homeomorphisms is radial,
``h(t e^{i theta}) = H(t) e^{i theta}``. The package builds ``H``, evaluates
the energy and its sharp lower bound, and certifies minimality numerically.
"""

from __future__ import annotations

from .energy import EnergyReport, energy_report, grid_energy, lower_bound, radial_energy
from .errors import (
    AnnulusError,
    BracketError,
    DomainError,
    ExtrapolationError,
    NonexistenceError,
    PerturbationError,
    PrecisionError,
    QuadratureError,
    RegimeError,
    SingularityError,
)
from .geometry import AnnulusPair, PolarGridMap, invert_map, normalize_annuli, rescale_map
from .minimizer import RadialMinimizer, build_minimizer, p1_threshold
from .shooting import solve_tau
from .verify import PerturbationSpec, perturb_and_compare, symmetry_suite, verify_point

__version__ = "0.1.0"

__all__ = [
    "AnnulusError",
    "AnnulusPair",
    "BracketError",
    "DomainError",
    "EnergyReport",
    "ExtrapolationError",
    "NonexistenceError",
    "PerturbationError",
    "PerturbationSpec",
    "PolarGridMap",
    "PrecisionError",
    "QuadratureError",
    "RadialMinimizer",
    "RegimeError",
    "SingularityError",
    "build_minimizer",
    "energy_report",
    "grid_energy",
    "invert_map",
    "lower_bound",
    "normalize_annuli",
    "p1_threshold",
    "perturb_and_compare",
    "radial_energy",
    "rescale_map",
    "solve_tau",
    "symmetry_suite",
    "verify_point",
]
