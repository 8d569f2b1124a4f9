"""Seeded random instance generators: planted, corrupted and unconstrained."""

from __future__ import annotations

import random
from functools import lru_cache

from .. import pnk
from ..signature import Symbol, random_symbol
from .instance import Instance

MODES = ("planted", "corrupted", "random")
ARITY_WEIGHTS = (0.3, 0.55, 0.15)


@lru_cache(maxsize=None)
def _tuples(n: int, sym: Symbol) -> tuple:
    return tuple(sorted(pnk.relation(n, sym)))


def _random_unary(n: int, k: int, rng: random.Random, keep=None) -> Symbol:
    lv = pnk.leaves(n, k)
    subset = {v for v in lv if rng.random() < 0.6}
    if keep is not None:
        subset.add(keep)
    return pnk.unary_symbol(n, k, frozenset(subset))


def _random_constraint(n: int, k: int, variables: list, rng: random.Random,
                       p_nonuniform: float) -> tuple[Symbol, tuple]:
    arity = rng.choices((1, 2, 3), ARITY_WEIGHTS)[0]
    if arity == 1:
        return _random_unary(n, k, rng), (rng.choice(variables),)
    sym = random_symbol(n, k, arity, rng, p_nonuniform)
    return sym, tuple(rng.choice(variables) for _ in range(arity))


def _planted_constraint(n: int, k: int, variables: list, plant: dict, by_value: dict,
                        rng: random.Random, p_nonuniform: float, attempts: int = 30):
    for _ in range(attempts):
        arity = rng.choices((1, 2, 3), ARITY_WEIGHTS)[0]
        if arity == 1:
            x = rng.choice(variables)
            return _random_unary(n, k, rng, keep=plant[x]), (x,)
        sym = random_symbol(n, k, arity, rng, p_nonuniform)
        rows = _tuples(n, sym)
        if not rows:
            continue
        for _ in range(4):
            row = rng.choice(rows)
            if all(v in by_value for v in row):
                return sym, tuple(rng.choice(by_value[v]) for v in row)
    return None


def generate(n: int, k: int, num_vars: int, num_constraints: int, mode: str = "planted",
             rng: random.Random | None = None, p_nonuniform: float = 0.3) -> tuple[Instance, dict | None]:
    """An instance and, in planted mode, the planted solution."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    rng = rng or random.Random(0)
    variables = [f"x{i}" for i in range(num_vars)]
    inst = Instance(n, k, variables)
    if not variables:
        return inst, ({} if mode == "planted" else None)
    if mode == "random":
        for _ in range(num_constraints):
            inst.add(*_random_constraint(n, k, variables, rng, p_nonuniform))
        return inst, None
    lv = pnk.leaves(n, k)
    plant = {x: rng.choice(lv) for x in variables}
    by_value: dict = {}
    for x, v in plant.items():
        by_value.setdefault(v, []).append(x)
    count = num_constraints - (1 if mode == "corrupted" else 0)
    for _ in range(max(count, 0)):
        c = _planted_constraint(n, k, variables, plant, by_value, rng, p_nonuniform)
        if c is not None:
            inst.add(*c)
    if mode == "corrupted":
        inst.add(*_random_constraint(n, k, variables, rng, p_nonuniform))
        return inst, None
    return inst, plant


def seeded_instance(n: int, k: int, seed: int, max_vars: int = 10, max_constraints: int = 25,
                    p_nonuniform: float = 0.3) -> tuple[Instance, dict | None]:
    """The instance for one seed; the mode cycles with the seed through the three modes."""
    rng = random.Random(seed)
    mode = MODES[seed % 3]
    nv = rng.randint(1, max_vars)
    nc = rng.randint(0, max_constraints)
    return generate(n, k, nv, nc, mode, rng, p_nonuniform)


def instance_stream(n: int, k: int, count: int, seed: int, max_vars: int = 10,
                    max_constraints: int = 25, p_nonuniform: float = 0.3):
    """Yield ``(seed, instance, planted)`` for ``count`` consecutive seeds."""
    for s in range(seed, seed + count):
        inst, plant = seeded_instance(n, k, s, max_vars, max_constraints, p_nonuniform)
        yield s, inst, plant


__all__ = ["MODES", "generate", "seeded_instance", "instance_stream"]
