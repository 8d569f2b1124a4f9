"""Brute-force homomorphism search used as ground truth."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

from .. import pnk
from ..errors import CapacityError
from ..signature import Symbol
from .instance import Instance


@lru_cache(maxsize=None)
def _tables(n: int, sym: Symbol):
    """Index-level view: allowed set for unary, successor/predecessor maps for binary, tuples for ternary."""
    rel = pnk.relation_indices(n, sym)
    if sym.arity == 1:
        return frozenset(t[0] for t in rel)
    if sym.arity == 2:
        fwd: dict = {}
        bwd: dict = {}
        for a, b in rel:
            fwd.setdefault(a, set()).add(b)
            bwd.setdefault(b, set()).add(a)
        return ({a: frozenset(v) for a, v in fwd.items()}, {b: frozenset(v) for b, v in bwd.items()})
    return rel


class _Search:
    def __init__(self, inst: Instance) -> None:
        n, k = inst.n, inst.k
        self.leaves = pnk.leaves(n, k)
        every = frozenset(range(len(self.leaves)))
        self.vars = list(inst.variables)
        pos = {x: i for i, x in enumerate(self.vars)}
        m = len(self.vars)
        self.domains = [every] * m
        self.binary: list[list] = [[] for _ in range(m)]
        self.ternary: list[list] = [[] for _ in range(m)]
        degree = [0] * m
        for s, ts in inst.constraints.items():
            table = _tables(n, s)
            for t in ts:
                idx = [pos[x] for x in t]
                if s.arity == 1:
                    self.domains[idx[0]] = self.domains[idx[0]] & table
                elif s.arity == 2:
                    i, j = idx
                    fwd, bwd = table
                    self.binary[i].append((j, fwd))
                    self.binary[j].append((i, bwd))
                    degree[i] += 1
                    degree[j] += 1
                else:
                    for i in set(idx):
                        self.ternary[i].append((idx, table))
                        degree[i] += 1
        self.degree = degree

    def run(self, limit: int | None = 1) -> list[list[int]]:
        m = len(self.vars)
        found: list[list[int]] = []
        if any(not d for d in self.domains):
            return found
        assignment: list = [None] * m

        def consistent_ternary(i: int) -> bool:
            for idx, table in self.ternary[i]:
                vals = [assignment[j] for j in idx]
                if None not in vals and tuple(vals) not in table:
                    return False
            return True

        def pick(domains: list) -> int:
            best, best_key = -1, None
            for i in range(m):
                if assignment[i] is None:
                    key = (len(domains[i]), -self.degree[i])
                    if best_key is None or key < best_key:
                        best, best_key = i, key
            return best

        def rec(domains: list, depth: int) -> bool:
            if depth == m:
                found.append(list(assignment))
                return limit is not None and len(found) >= limit
            i = pick(domains)
            for a in sorted(domains[i]):
                assignment[i] = a
                if consistent_ternary(i):
                    new = list(domains)
                    new[i] = frozenset((a,))
                    ok = True
                    for j, table in self.binary[i]:
                        allowed = table.get(a, frozenset())
                        if assignment[j] is None:
                            nd = new[j] & allowed
                            if not nd:
                                ok = False
                                break
                            new[j] = nd
                        elif assignment[j] not in allowed:
                            ok = False
                            break
                    if ok and rec(new, depth + 1):
                        assignment[i] = None
                        return True
                assignment[i] = None
            return False

        rec(list(self.domains), 0)
        return found

    def decode(self, values: list[int]) -> dict:
        return {x: self.leaves[v] for x, v in zip(self.vars, values)}


def brute_force_oracle(inst: Instance) -> dict | None:
    """A homomorphism to the template as a variable-to-leaf map, or ``None``."""
    search = _Search(inst)
    found = search.run(limit=1)
    return search.decode(found[0]) if found else None


def all_solutions(inst: Instance, cap: int = 200_000) -> Iterator[dict]:
    search = _Search(inst)
    found = search.run(limit=cap + 1)
    if len(found) > cap:
        raise CapacityError(f"more than {cap} solutions")
    for values in found:
        yield search.decode(values)


def exhaustive_oracle(inst: Instance, max_assignments: int = 2_000_000) -> dict | None:
    """Plain enumeration of all assignments, no pruning."""
    from itertools import product

    leaves = pnk.leaves(inst.n, inst.k)
    if len(leaves) ** len(inst.variables) > max_assignments:
        raise CapacityError("too many assignments for exhaustive search")
    rels = [(pnk.relation(inst.n, s), ts) for s, ts in inst.constraints.items()]
    for values in product(leaves, repeat=len(inst.variables)):
        sol = dict(zip(inst.variables, values))
        if all(tuple(sol[x] for x in t) in rel for rel, ts in rels for t in ts):
            return sol
    return None


__all__ = ["brute_force_oracle", "all_solutions", "exhaustive_oracle"]
