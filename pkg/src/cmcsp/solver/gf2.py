"""Linear systems over GF(2) with int-bitset rows."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

import numpy as np


@dataclass
class Z2System:
    """Equations ``sum of variables in mask = rhs``; bit ``i`` of a mask is ``variables[i]``."""

    variables: list = field(default_factory=list)
    equations: list = field(default_factory=list)
    _index: dict = field(default_factory=dict, repr=False)

    def var(self, x: Hashable) -> int:
        i = self._index.get(x)
        if i is None:
            i = self._index[x] = len(self.variables)
            self.variables.append(x)
        return i

    def add(self, xs: Iterable[Hashable], rhs: int) -> None:
        mask = 0
        for x in xs:
            mask ^= 1 << self.var(x)
        self.equations.append((mask, rhs & 1))

    def holds(self, assignment: Mapping) -> bool:
        for mask, rhs in self.equations:
            total = 0
            i = 0
            while mask:
                if mask & 1:
                    total ^= assignment[self.variables[i]]
                mask >>= 1
                i += 1
            if total != rhs:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "variables": [str(v) for v in self.variables],
            "equations": [
                {"vars": [str(self.variables[i]) for i in range(mask.bit_length()) if mask >> i & 1], "rhs": rhs}
                for mask, rhs in self.equations
            ],
        }


def gauss_gf2(system: Z2System, stats: dict | None = None) -> dict | None:
    """A satisfying assignment (free variables set to 0), or ``None``.

    Rows are eliminated online, each kept with its lowest set bit as pivot.
    """
    start = time.perf_counter() if stats is not None else 0.0
    pivots: dict[int, tuple[int, int]] = {}
    result: dict | None = None
    for row, rhs in system.equations:
        while row:
            low = row & -row
            p = pivots.get(low)
            if p is None:
                pivots[low] = (row, rhs)
                break
            row ^= p[0]
            rhs ^= p[1]
        else:
            if rhs:
                break
    else:
        values = 0
        for low in sorted(pivots, reverse=True):
            row, rhs = pivots[low]
            if (bin(row & values & ~low).count("1") & 1) ^ rhs:
                values |= low
        result = {x: values >> i & 1 for i, x in enumerate(system.variables)}
    if stats is not None:
        stats["gauss_seconds"] = stats.get("gauss_seconds", 0.0) + time.perf_counter() - start
        stats["gauss_calls"] = stats.get("gauss_calls", 0) + 1
    return result


def _parity(x: np.ndarray) -> np.ndarray:
    for shift in (16, 8, 4, 2, 1):
        x = x ^ (x >> shift)
    return x & 1


def brute_force_gf2(system: Z2System) -> dict | None:
    """Exhaustive search over all assignments (test oracle); returns the least one as an integer."""
    m = len(system.variables)
    if m > 24:
        raise ValueError("too many variables for exhaustive search")
    candidates = np.arange(1 << m, dtype=np.uint32)
    for mask, rhs in system.equations:
        candidates = candidates[_parity(candidates & np.uint32(mask)) == rhs]
        if not len(candidates):
            return None
    values = int(candidates[0])
    return {x: values >> i & 1 for i, x in enumerate(system.variables)}


__all__ = ["Z2System", "gauss_gf2", "brute_force_gf2"]
