"""Decision procedure, reductions and oracles for instances over the recursive structures."""

from __future__ import annotations

from .gf2 import Z2System, brute_force_gf2, gauss_gf2
from .generate import MODES, generate, instance_stream, seeded_instance
from .instance import (
    Instance,
    OuterInstance,
    components,
    inner_restriction,
    make_concise,
    make_transfer_compatible,
    outer_restriction,
    satisfies,
    source_components,
    uniform_product,
    violations,
)
from .level_one import (
    LinearInstance,
    arc_consistent_domains,
    literal_equation_system,
    solve_level_one,
    solve_linear_exact,
    solve_linear_literal,
    solve_perm_system,
    to_linear_instance,
)
from .oracle import all_solutions, brute_force_oracle, exhaustive_oracle
from .reduce import (
    ReduceResult,
    SolveResult,
    lift_solution,
    project_solution,
    reduce_instance,
    reduce_level_one,
    solve,
)

__all__ = [
    "Z2System", "brute_force_gf2", "gauss_gf2", "MODES", "generate", "instance_stream", "seeded_instance", "Instance",
    "OuterInstance", "components", "inner_restriction", "make_concise", "make_transfer_compatible",
    "outer_restriction", "satisfies", "source_components", "uniform_product", "violations",
    "LinearInstance", "arc_consistent_domains", "literal_equation_system", "solve_level_one",
    "solve_linear_exact", "solve_linear_literal", "solve_perm_system", "to_linear_instance",
    "all_solutions", "brute_force_oracle", "exhaustive_oracle", "ReduceResult", "SolveResult",
    "lift_solution", "project_solution", "reduce_instance", "reduce_level_one", "solve",
]
