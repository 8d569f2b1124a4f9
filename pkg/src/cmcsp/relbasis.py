"""Invariant relations of conservative minority algebras: kernels, critical relations and a finite basis.

Relations are frozensets of integer tuples over the algebra's element indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Iterable, Sequence

import numpy as np

from .algebra import (
    Congruence,
    FiniteAlgebra,
    canonical_table,
    congruence_lattice,
    is_congruence,
    is_subdirectly_irreducible,
    monolith,
    preserves,
    subalgebra,
)
from .errors import CapacityError, InconsistencyError

Relation = frozenset


# --- powers of an algebra ---------------------------------------------------------

class PowerAlgebra:
    """The ``arity``-th power, with tuples encoded as mixed-radix integers."""

    def __init__(self, alg: FiniteAlgebra, arity: int, max_codes: int = 216) -> None:
        d = alg.size
        self.alg, self.arity, self.d = alg, arity, d
        self.count = d ** arity
        if self.count > max_codes:
            raise CapacityError(f"{d}^{arity} tuples exceed the cap of {max_codes}")
        digits = np.array(list(product(range(d), repeat=arity)), dtype=np.int64).reshape(self.count, arity)
        self.digits = digits
        op = alg.array()
        table = np.zeros((self.count,) * 3, dtype=np.int16)
        weights = d ** np.arange(arity - 1, -1, -1)
        for i in range(arity):
            col = digits[:, i]
            table += (op[col[:, None, None], col[None, :, None], col[None, None, :]] * weights[i]).astype(np.int16)
        self.table = table
        self.weights = weights

    def encode(self, t: Sequence[int]) -> int:
        return int(sum(int(v) * int(w) for v, w in zip(t, self.weights)))

    def decode(self, code: int) -> tuple:
        return tuple(int(v) for v in self.digits[code])

    def closure_codes(self, codes: Iterable[int]) -> frozenset:
        cur = np.unique(np.fromiter(codes, dtype=np.int64))
        if cur.size == 0:
            return frozenset()
        new = cur
        while True:
            parts = [
                self.table[np.ix_(new, cur, cur)].ravel(),
                self.table[np.ix_(cur, new, cur)].ravel(),
                self.table[np.ix_(cur, cur, new)].ravel(),
            ]
            found = np.setdiff1d(np.unique(np.concatenate(parts)), cur)
            if found.size == 0:
                return frozenset(int(c) for c in cur)
            cur = np.union1d(cur, found)
            new = found

    def closure(self, tuples: Iterable[Sequence[int]]) -> Relation:
        return frozenset(self.decode(c) for c in self.closure_codes(self.encode(t) for t in tuples))


@lru_cache(maxsize=64)
def power(alg: FiniteAlgebra, arity: int) -> PowerAlgebra:
    return PowerAlgebra(alg, arity)


def generate(alg: FiniteAlgebra, tuples: Iterable[Sequence[int]], arity: int) -> Relation:
    """The invariant relation generated by ``tuples``."""
    return power(alg, arity).closure(tuples)


# --- basic relation operations ----------------------------------------------------------

def project(r: Iterable[Sequence[int]], coords: Sequence[int]) -> Relation:
    return frozenset(tuple(t[i] for i in coords) for t in r)


def is_functional(r: Relation) -> bool:
    if not r:
        return True
    m = len(next(iter(r)))
    for i in range(m):
        others = [j for j in range(m) if j != i]
        if len(project(r, others)) != len(r):
            return False
    return True


def is_bijection_graph(r: Relation) -> bool:
    return len({a for a, _ in r}) == len(r) == len({b for _, b in r})


def has_dummy_coordinate(r: Relation, domain: Sequence[int], arity: int) -> bool:
    for i in range(arity):
        others = [j for j in range(arity) if j != i]
        rest = project(r, others)
        if len(r) == len(rest) * len(domain):
            return True
    return False


# --- coordinate kernels and reduced representations ------------------------------------

@dataclass(frozen=True)
class Kernel:
    """A congruence on the projection ``elements`` of a relation, classes in original indices."""

    elements: tuple
    congruence: Congruence

    @property
    def classes(self) -> list[tuple]:
        return [tuple(self.elements[i] for i in c) for c in self.congruence.classes]

    def representative(self, a: int) -> int:
        i = self.elements.index(a)
        return self.elements[min(self.congruence.class_of(i))]


def coordinate_kernel(alg: FiniteAlgebra, r: Relation, i: int) -> Kernel:
    """``a ~ b`` iff some two tuples agree off coordinate ``i`` and carry ``a`` and ``b`` there."""
    if not r:
        raise ValueError("kernel of the empty relation")
    m = len(next(iter(r)))
    elements = tuple(sorted({t[i] for t in r}))
    pos = {a: j for j, a in enumerate(elements)}
    by_rest: dict = {}
    for t in r:
        by_rest.setdefault(t[:i] + t[i + 1:], []).append(pos[t[i]])
    parent = list(range(len(elements)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for group in by_rest.values():
        for b in group[1:]:
            ra, rb = find(group[0]), find(b)
            if ra != rb:
                parent[rb] = ra
    cong = Congruence.from_labels([find(x) for x in range(len(elements))])
    if not is_congruence(subalgebra(alg, elements), cong):
        raise InconsistencyError(f"coordinate kernel {i} of a relation of arity {m} is not a congruence")
    return Kernel(elements, cong)


@dataclass
class ReducedRepresentation:
    kernels: list
    reduced: Relation
    graphs: list

    def reconstruct(self) -> Relation:
        """Tuples ``x`` with some ``y`` in the reduced relation and ``(x_i, y_i)`` in every graph."""
        maps = [dict(g) for g in self.graphs]
        out = set()
        for x in product(*[sorted(m) for m in maps]):
            if tuple(m[v] for m, v in zip(maps, x)) in self.reduced:
                out.add(x)
        return frozenset(out)


def reduced_representation(alg: FiniteAlgebra, r: Relation) -> ReducedRepresentation:
    """Collapse each coordinate kernel onto its least-index transversal."""
    if not r:
        raise ValueError("empty relation")
    m = len(next(iter(r)))
    if m < 2:
        raise ValueError("reduced representation needs arity at least 2")
    kernels = [coordinate_kernel(alg, r, i) for i in range(m)]
    maps = [{a: k.representative(a) for a in k.elements} for k in kernels]
    reduced = frozenset(tuple(mp[v] for mp, v in zip(maps, t)) for t in r)
    graphs = [frozenset(mp.items()) for mp in maps]
    rep = ReducedRepresentation(kernels, reduced, graphs)
    if rep.reconstruct() != r:
        raise InconsistencyError("relation is not recovered from its reduced representation")
    return rep


# --- upper covers and critical relations -------------------------------------------------

def upper_cover(alg: FiniteAlgebra, r: Relation, arity: int) -> Relation | None:
    """Intersection of all invariant relations properly containing ``r`` (``None`` for the full power)."""
    if alg.size > 6 or arity > 3:
        raise CapacityError("upper cover limited to domain 6 and arity 3")
    pw = power(alg, arity)
    codes = frozenset(pw.encode(t) for t in r)
    if pw.closure_codes(codes) != codes:
        raise ValueError("relation is not invariant")
    missing = [c for c in range(pw.count) if c not in codes]
    if not missing:
        return None
    cover = None
    for c in missing:
        s = pw.closure_codes(codes | {c})
        cover = s if cover is None else cover & s
    return frozenset(pw.decode(c) for c in cover)


def approximations(r: Relation, s: tuple) -> list[list[tuple]]:
    """For each coordinate, the tuples of ``r`` agreeing with ``s`` elsewhere."""
    out = []
    for i in range(len(s)):
        out.append([t for t in r if all(t[j] == s[j] for j in range(len(s)) if j != i)])
    return out


def critical_tuples(alg: FiniteAlgebra, r: Relation, arity: int) -> list[tuple]:
    cover = upper_cover(alg, r, arity)
    if cover is None or cover == r:
        return []
    return sorted(s for s in cover - r if all(approximations(r, s)))


def is_critical(alg: FiniteAlgebra, r: Relation, arity: int) -> bool:
    cover = upper_cover(alg, r, arity)
    if cover is None or cover == r:
        return False
    return not has_dummy_coordinate(r, range(alg.size), arity)


def is_multisorted_critical(alg: FiniteAlgebra, r: Relation, sorts: Sequence[Sequence[int]], s: tuple) -> bool:
    """``r`` is maximal in the product of ``sorts`` avoiding ``s`` and ``s`` has all approximations."""
    arity = len(sorts)
    if s in r or not all(approximations(r, s)):
        return False
    pw = power(alg, arity)
    codes = frozenset(pw.encode(t) for t in r)
    target = pw.encode(s)
    for t in product(*sorts):
        c = pw.encode(t)
        if c not in codes and target not in pw.closure_codes(codes | {c}):
            return False
    return True


@dataclass(frozen=True)
class CriticalRelation:
    sorts: tuple
    relation: Relation
    critical_tuple: tuple


class _SortedProduct:
    """The product of subalgebras ``sorts`` of one algebra, tuples encoded by position."""

    def __init__(self, alg: FiniteAlgebra, sorts: Sequence[Sequence[int]]) -> None:
        self.sorts = [tuple(x) for x in sorts]
        self.tuples = list(product(*self.sorts))
        self.code = {t: i for i, t in enumerate(self.tuples)}
        m = len(self.sorts)
        n = len(self.tuples)
        code, tuples = self.code, self.tuples
        self.table = [[[code[tuple(alg(x[i], y[i], z[i]) for i in range(m))] for z in tuples]
                       for y in tuples] for x in tuples]
        self.keys = [[t[:i] + t[i + 1:] for t in tuples] for i in range(m)]
        self.size = n

    def extend(self, closed: Iterable[int], c: int, stop: int | None = None,
               functional: bool = False) -> frozenset | None:
        """Closure of ``closed`` plus ``c``, assuming ``closed`` is already invariant.

        Returns ``None`` as soon as ``stop`` appears or, with ``functional``,
        as soon as the closure stops being functional.
        """
        elems = list(closed)
        have = set(elems)
        keys = self.keys
        proj = [{key[x]: x for x in elems} for key in keys] if functional else None
        queue: list = []

        def add(x: int) -> bool:
            if x == stop:
                return False
            if proj is not None:
                for key, seen in zip(keys, proj):
                    if seen.setdefault(key[x], x) != x:
                        return False
            have.add(x)
            elems.append(x)
            queue.append(x)
            return True

        if c not in have and not add(c):
            return None
        table = self.table
        i = 0
        while i < len(queue):
            x = queue[i]
            i += 1
            tx = table[x]
            snap = list(elems)
            for y in snap:
                ty, txy, tyx = table[y], tx[y], table[y][x]
                for z in snap:
                    for w in (txy[z], tyx[z], ty[z][x]):
                        if w not in have and not add(w):
                            return None
        return frozenset(have)

    def functional_subuniverses(self, max_sets: int) -> list[frozenset]:
        """Every functional invariant subset, grown one generator at a time from the empty set."""
        seen = {frozenset()}
        frontier = [frozenset()]
        while frontier:
            nxt = []
            for cur in frontier:
                for c in range(self.size):
                    if c in cur:
                        continue
                    ext = self.extend(cur, c, functional=True)
                    if ext is not None and ext not in seen:
                        seen.add(ext)
                        nxt.append(ext)
                        if len(seen) > max_sets:
                            raise CapacityError("too many functional subuniverses")
            frontier = nxt
        return sorted(seen, key=lambda r: (len(r), sorted(r)))


def functional_critical_relations(alg: FiniteAlgebra, sorts: Sequence[Sequence[int]],
                                  max_sets: int = 200_000) -> list[CriticalRelation]:
    """All subdirect functional multisorted critical relations in the product of ``sorts``.

    Every functional subuniverse is reached by adding generators one at a time
    through functional subuniverses, since subsets of functional relations are
    functional.  ``R`` is maximal avoiding ``s`` iff ``s`` lies in the closure
    of ``R`` plus any other tuple.
    """
    prod = _SortedProduct(alg, sorts)
    arity = len(prod.sorts)
    sort_sets = [frozenset(x) for x in prod.sorts]
    tuples = prod.tuples
    found = []
    for codes in prod.functional_subuniverses(max_sets):
        rel = frozenset(tuples[c] for c in codes)
        if any({t[i] for t in rel} != sort_sets[i] for i in range(arity)):
            continue
        for s_code in range(prod.size):
            if s_code in codes:
                continue
            s = tuples[s_code]
            if not all(approximations(rel, s)):
                continue
            if all(c in codes or c == s_code or prod.extend(codes, c, stop=s_code) is None
                   for c in range(prod.size)):
                found.append(CriticalRelation(tuple(prod.sorts), rel, s))
    return found


@dataclass
class CriticalShape:
    """Structural facts about one functional multisorted critical relation."""

    sorts_si: bool
    blocks: tuple
    blocks_size_two: bool
    lin_part: bool
    disjoint_union: bool
    bijection_projections: bool
    no_crossing: bool
    sorts_isomorphic: bool

    @property
    def ok(self) -> bool:
        return all((self.sorts_si, self.blocks_size_two, self.lin_part, self.disjoint_union,
                    self.bijection_projections, self.no_crossing, self.sorts_isomorphic))

    def to_json(self) -> dict:
        out = {k: v for k, v in self.__dict__.items()}
        out["blocks"] = [list(b) for b in self.blocks]
        out["ok"] = self.ok
        return out


def critical_shape(alg: FiniteAlgebra, crit: CriticalRelation) -> CriticalShape:
    """Check block sizes, the linear part, the split ``R = R1 + R2`` and the outer projections."""
    sorts = crit.sorts
    rel = crit.relation
    m = len(sorts)
    subs = [subalgebra(alg, x) for x in sorts]
    sorts_si = all(len(x) >= 2 and is_subdirectly_irreducible(sub) for x, sub in zip(sorts, subs))
    blocks: list = []
    if sorts_si:
        for x, sub in zip(sorts, subs):
            cls = monolith(sub).nontrivial_classes()
            blocks.append(tuple(x[i] for i in cls[0]) if len(cls) == 1 else ())
    size_two = sorts_si and all(len(b) == 2 for b in blocks)
    lin_part = disjoint = bij = crossing_ok = False
    if size_two:
        inner = frozenset(t for t in rel if all(t[i] in blocks[i] for i in range(m)))
        outer = frozenset(t for t in rel if all(t[i] not in blocks[i] for i in range(m)))
        lin_part = any(
            inner == frozenset(tuple(lab[i][v] for i, v in enumerate(bits))
                               for bits in product((0, 1), repeat=m) if sum(bits) % 2 == 1)
            for lab in product(*[[b, b[::-1]] for b in blocks])
        )
        disjoint = rel == inner | outer
        bij = all(is_bijection_graph(project(outer, (i, j))) for i, j in combinations(range(m), 2))
        crossing_ok = all(
            all(t[j] in blocks[j] for j in range(m)) for t in rel if any(t[i] in blocks[i] for i in range(m))
        )
    iso = all(isomorphisms(alg, sorts[0], x) for x in sorts[1:])
    return CriticalShape(sorts_si, tuple(blocks), size_two, lin_part, disjoint, bij, crossing_ok, iso)


@dataclass
class SurveyEntry:
    """Critical relations over one sort triple, with their shape checks."""

    sorts_key: tuple
    sorts: tuple
    relations: list
    shapes: list

    @property
    def ok(self) -> bool:
        return all(sh.ok for sh in self.shapes)


def critical_survey(algebras: Iterable[FiniteAlgebra], arity: int = 3,
                    seen: set | None = None) -> list[SurveyEntry]:
    """Search every arity-``arity`` choice of SI sorts of each algebra, once per isomorphism type.

    The product of the sorts only depends on the sort subalgebras, so choices
    whose sorted canonical tables were already searched are skipped.
    """
    seen = set() if seen is None else seen
    out = []
    for alg in algebras:
        si = si_subalgebras(alg, min_size=2)
        keys = {x: canonical_table(subalgebra(alg, x)) for x in si}
        for sorts in combinations_with_replacement(si, arity):
            key = tuple(sorted(keys[x] for x in sorts))
            if key in seen:
                continue
            seen.add(key)
            rels = functional_critical_relations(alg, sorts)
            out.append(SurveyEntry(key, tuple(sorts), rels, [critical_shape(alg, c) for c in rels]))
    return out


# --- subalgebras and the basis catalog ------------------------------------------------------

def si_subalgebras(alg: FiniteAlgebra, min_size: int = 1) -> list[tuple]:
    """Subsets whose restriction is subdirectly irreducible (singletons included)."""
    out = []
    for size in range(max(min_size, 1), alg.size + 1):
        for subset in combinations(range(alg.size), size):
            if is_subdirectly_irreducible(subalgebra(alg, subset)):
                out.append(subset)
    return out


def isomorphisms(alg: FiniteAlgebra, a1: Sequence[int], a2: Sequence[int]) -> list[dict]:
    """All isomorphisms between the subalgebras on ``a1`` and ``a2``, by backtracking."""
    a1, a2 = list(a1), list(a2)
    if len(a1) != len(a2):
        return []
    out: list[dict] = []
    mapping: dict = {}
    used: set = set()

    def consistent(x: int) -> bool:
        # triples with x in some position; the others range over mapped elements
        fx = mapping[x]
        dom = list(mapping)
        for u in dom:
            fu = mapping[u]
            for v in dom:
                fv = mapping[v]
                for t, ft in (((x, u, v), (fx, fu, fv)), ((u, x, v), (fu, fx, fv)), ((u, v, x), (fu, fv, fx))):
                    y = alg(*t)
                    if y in mapping and mapping[y] != alg(*ft):
                        return False
        return True

    def rec(i: int) -> None:
        if i == len(a1):
            out.append(dict(mapping))
            return
        x = a1[i]
        for y in a2:
            if y in used:
                continue
            mapping[x] = y
            used.add(y)
            if consistent(x):
                rec(i + 1)
            del mapping[x]
            used.discard(y)

    rec(0)
    return out


def iso_invariant(alg: FiniteAlgebra, subset: Sequence[int]) -> tuple:
    """Per element, how often it is returned from each argument position on distinct triples; sorted."""
    b = np.asarray(subset, dtype=np.int64)
    sub = alg.array()[np.ix_(b, b, b)]
    m = len(b)
    i, j, k = np.meshgrid(np.arange(m), np.arange(m), np.arange(m), indexing="ij")
    distinct = (i != j) & (j != k) & (i != k)
    res = np.searchsorted(b, sub)
    counts = np.zeros((m, 3), dtype=np.int64)
    for pos, idx in enumerate((i, j, k)):
        hit = distinct & (res == idx)
        np.add.at(counts[:, pos], idx[hit], 1)
    return tuple(sorted(map(tuple, counts.tolist())))


def iso_graphs(alg: FiniteAlgebra, a1: Sequence[int], a2: Sequence[int]) -> list[Relation]:
    return [frozenset(m.items()) for m in isomorphisms(alg, a1, a2)]


@dataclass(frozen=True)
class TransversalEndoGraph:
    source: tuple
    target: tuple
    edges: Relation


def transversals(classes: Sequence[Sequence[int]]) -> Iterable[tuple]:
    return product(*classes)


def transversal_endo_graphs(alg: FiniteAlgebra, subsets: Iterable[Sequence[int]] | None = None,
                            all_transversals: bool = True) -> list[TransversalEndoGraph]:
    """Graphs ``a -> representative of its class`` for congruences with an SI quotient."""
    if subsets is None:
        subsets = [s for size in range(1, alg.size + 1) for s in combinations(range(alg.size), size)]
    out = []
    for b in subsets:
        b = tuple(b)
        sub = subalgebra(alg, b)
        for theta in congruence_lattice(sub):
            classes = [[b[i] for i in c] for c in theta.classes]
            reps_iter = transversals(classes) if all_transversals else [tuple(min(c) for c in classes)]
            for reps in reps_iter:
                target = tuple(sorted(reps))
                if not is_subdirectly_irreducible(subalgebra(alg, target)):
                    continue
                edges = frozenset((a, r) for c, r in zip(classes, reps) for a in c)
                out.append(TransversalEndoGraph(b, target, edges))
    return out


def lin_relation(alg: FiniteAlgebra, c: Sequence[int]) -> Relation:
    """Solutions of ``x+y+z=1`` on the 2-element monolith block of ``c`` plus the diagonal elsewhere."""
    c = tuple(c)
    sub = subalgebra(alg, c)
    mono = monolith(sub)
    blocks = mono.nontrivial_classes()
    if len(blocks) != 1 or len(blocks[0]) != 2:
        raise ValueError("monolith block must have exactly two elements")
    zero, one = (c[i] for i in blocks[0])
    label = {0: zero, 1: one}
    rel = {tuple(label[v] for v in t) for t in product((0, 1), repeat=3) if sum(t) % 2 == 1}
    rel |= {(x, x, x) for x in c if x not in (zero, one)}
    return frozenset(rel)


@dataclass
class BasisCatalog:
    unary: list = field(default_factory=list)
    endo_graphs: list = field(default_factory=list)
    iso_graphs: list = field(default_factory=list)
    lin: list = field(default_factory=list)

    def relations(self) -> list[tuple[str, int, Relation]]:
        out = [("unary", 1, frozenset((a,) for a in x)) for x in self.unary]
        out += [("endo", 2, g.edges) for g in self.endo_graphs]
        out += [("iso", 2, g) for g in self.iso_graphs]
        out += [("lin", 3, r) for r in self.lin]
        return out

    def to_json(self) -> dict:
        return {
            "unary": [list(x) for x in self.unary],
            "endo_graphs": [{"source": list(g.source), "target": list(g.target),
                             "edges": sorted(list(e) for e in g.edges)} for g in self.endo_graphs],
            "iso_graphs": [sorted(list(e) for e in g) for g in self.iso_graphs],
            "lin": [sorted(list(t) for t in r) for r in self.lin],
        }


def basis(alg: FiniteAlgebra, max_size: int = 8, verify: bool = True) -> BasisCatalog:
    """Unary relations, SI-target transversal graphs, SI isomorphism graphs and linear relations.

    With ``verify`` every relation is checked to be invariant before returning.
    """
    if alg.size > max_size:
        raise CapacityError(f"basis catalog limited to domain {max_size}")
    d = alg.size
    cat = BasisCatalog()
    cat.unary = [s for size in range(d + 1) for s in combinations(range(d), size)]
    si = si_subalgebras(alg)
    cat.endo_graphs = transversal_endo_graphs(alg)
    by_size: dict = {}
    for s in si:
        by_size.setdefault((len(s), iso_invariant(alg, s)), []).append(s)
    graphs: set = set()
    for group in by_size.values():
        for a1 in group:
            for a2 in group:
                graphs.update(iso_graphs(alg, a1, a2))
    cat.iso_graphs = sorted(graphs, key=sorted)
    for c in si:
        if len(c) < 2:
            continue
        blocks = monolith(subalgebra(alg, c)).nontrivial_classes()
        if len(blocks) == 1 and len(blocks[0]) == 2:
            cat.lin.append(lin_relation(alg, c))
    if verify:
        for _, arity, rel in cat.relations():
            if not preserves(alg, rel, arity):
                raise InconsistencyError("catalog relation is not invariant")
    return cat


# --- desk-scale invariant enumeration and pp-closure --------------------------------------------

def _mask_to_relation(mask: int, d: int, arity: int) -> Relation:
    tuples = list(product(range(d), repeat=arity))
    return frozenset(t for i, t in enumerate(tuples) if mask >> i & 1)


def _relation_to_mask(r: Iterable[Sequence[int]], d: int) -> int:
    mask = 0
    for t in r:
        code = 0
        for v in t:
            code = code * d + v
        mask |= 1 << code
    return mask


def inv_upto(alg: FiniteAlgebra, max_arity: int) -> list[Relation]:
    """Every invariant relation of arity exactly ``max_arity`` by vectorized brute force."""
    d = alg.size
    m = d ** max_arity
    if m > 16:
        raise CapacityError(f"{2 ** m} candidate relations exceed the 2^16 cap")
    pw = PowerAlgebra(alg, max_arity)
    masks = np.arange(1 << m, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(m)) & 1).astype(bool)
    ok = np.ones(1 << m, dtype=bool)
    table = pw.table
    for p, q, r in product(range(m), repeat=3):
        o = int(table[p, q, r])
        ok &= ~(bits[:, p] & bits[:, q] & bits[:, r] & ~bits[:, o])
    return [_mask_to_relation(int(x), d, max_arity) for x in masks[ok]]


def subuniverses(alg: FiniteAlgebra, arity: int) -> list[Relation]:
    """Every invariant relation of the given arity, by closing under one-tuple extensions."""
    pw = power(alg, arity)
    seen = {frozenset()}
    frontier = [frozenset()]
    while frontier:
        nxt = []
        for codes in frontier:
            for c in range(pw.count):
                if c in codes:
                    continue
                ext = pw.closure_codes(codes | {c})
                if ext not in seen:
                    seen.add(ext)
                    nxt.append(ext)
        frontier = nxt
    return [frozenset(pw.decode(c) for c in s) for s in seen]


class _Bin:
    """Binary relations on ``0..d-1`` as bitmasks with bit ``a*d+b``."""

    def __init__(self, d: int) -> None:
        self.d = d
        self.full = (1 << d * d) - 1
        self.row_mask = (1 << d) - 1

    def rows(self, r: int) -> list[int]:
        d = self.d
        return [(r >> (a * d)) & self.row_mask for a in range(d)]

    def from_rows(self, rows: Sequence[int]) -> int:
        out = 0
        for a, row in enumerate(rows):
            out |= row << (a * self.d)
        return out

    def compose(self, r: int, s: int) -> int:
        rs, ss = self.rows(r), self.rows(s)
        out = []
        for row in rs:
            acc = 0
            b = 0
            while row:
                if row & 1:
                    acc |= ss[b]
                row >>= 1
                b += 1
            out.append(acc)
        return self.from_rows(out)

    def converse(self, r: int) -> int:
        d = self.d
        out = 0
        for a in range(d):
            for b in range(d):
                if r >> (a * d + b) & 1:
                    out |= 1 << (b * d + a)
        return out

    def product(self, u: int, v: int) -> int:
        return self.from_rows([v if u >> a & 1 else 0 for a in range(self.d)])

    def first(self, r: int) -> int:
        return sum(1 << a for a, row in enumerate(self.rows(r)) if row)

    def diagonal(self, r: int) -> int:
        d = self.d
        return sum(1 << a for a in range(d) if r >> (a * d + a) & 1)


def pp_closure_upto(relations: Iterable[tuple[int, Relation]], d: int, max_arity: int = 2,
                    max_rounds: int = 50) -> dict[int, set[Relation]]:
    """Unary and binary relations reachable from ``relations`` by bounded pp-formulas.

    Binary steps are intersection, converse, composition and products of
    unaries; ternary inputs contribute ``{(x,y) : exists z. T(x,y,z) and U(z)}``
    and identified-coordinate restrictions, over every coordinate order.
    """
    if max_arity > 2:
        raise CapacityError("closure is computed for unary and binary relations only")
    bn = _Bin(d)
    unary: set[int] = {(1 << d) - 1}
    binary: set[int] = {_relation_to_mask(((a, a) for a in range(d)), d)}
    ternary: list[Relation] = []
    for arity, rel in relations:
        if arity == 1:
            unary.add(sum(1 << t[0] for t in rel))
        elif arity == 2:
            binary.add(_relation_to_mask(rel, d))
        elif arity == 3:
            for perm in permutations(range(3)):
                ternary.append(frozenset(tuple(t[i] for i in perm) for t in rel))
        else:
            raise CapacityError("inputs of arity above 3 are not supported")
    ternary = list(dict.fromkeys(ternary))

    def ternary_derived() -> set[int]:
        out = set()
        for t in ternary:
            for u in unary:
                out.add(_relation_to_mask({(x, y) for x, y, z in t if u >> z & 1}, d))
            out.add(_relation_to_mask({(x, z) for x, y, z in t if x == y}, d))
        return out

    for _ in range(max_rounds):
        before = (len(unary), len(binary))
        for r in list(binary):
            unary.add(bn.first(r))
            unary.add(bn.diagonal(r))
            binary.add(bn.converse(r))
        for u in list(unary):
            for v in list(unary):
                unary.add(u & v)
                binary.add(bn.product(u, v))
        binary |= ternary_derived()
        current = list(binary)
        for r in current:
            for s in current:
                binary.add(r & s)
                binary.add(bn.compose(r, s))
        if (len(unary), len(binary)) == before:
            break
    else:
        raise CapacityError("pp-closure did not stabilize")
    return {
        1: {_mask_to_relation(u, d, 1) for u in unary},
        2: {_mask_to_relation(r, d, 2) for r in binary},
    }


__all__ = [
    "Relation", "PowerAlgebra", "power", "generate", "project", "is_functional", "is_bijection_graph",
    "has_dummy_coordinate", "Kernel", "coordinate_kernel", "ReducedRepresentation",
    "reduced_representation", "upper_cover", "approximations", "critical_tuples", "is_critical",
    "is_multisorted_critical", "CriticalRelation", "functional_critical_relations", "CriticalShape",
    "critical_shape", "SurveyEntry", "critical_survey", "si_subalgebras",
    "isomorphisms", "iso_invariant", "iso_graphs", "TransversalEndoGraph", "transversals", "transversal_endo_graphs",
    "lin_relation", "BasisCatalog", "basis", "inv_upto", "subuniverses", "pp_closure_upto",
]
