"""Conservative minority algebras, tree representations and CSP solving over their structures."""

from __future__ import annotations

__version__ = "0.1.0"

from .algebra import FiniteAlgebra, congruence_lattice, is_conservative_minority, preserves  # noqa: E402
from .cmtree import CMTree, leaf_algebra, represent  # noqa: E402
from .errors import CapacityError, InconsistencyError  # noqa: E402
from .gdatalog import Database, eval_fixpoint, parse_program  # noqa: E402
from .pnk import pnk_algebra  # noqa: E402
from .relbasis import basis  # noqa: E402
from .solver import Instance, brute_force_oracle, solve  # noqa: E402

__all__ = [
    "__version__", "FiniteAlgebra", "congruence_lattice", "is_conservative_minority", "preserves",
    "CMTree", "leaf_algebra", "represent", "CapacityError", "InconsistencyError", "Database",
    "eval_fixpoint", "parse_program", "pnk_algebra", "basis", "Instance", "brute_force_oracle", "solve",
]
