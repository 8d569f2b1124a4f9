"""Finite algebras with a single ternary operation and their congruences."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import CapacityError, InconsistencyError


@dataclass(frozen=True)
class FiniteAlgebra:
    """Domain ``0..size-1`` with a flat ternary table ``table[a*d*d + b*d + c]``."""

    size: int
    table: tuple[int, ...]
    elements: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        d = self.size
        if d < 1:
            raise ValueError("domain must be nonempty")
        if len(self.table) != d ** 3:
            raise ValueError(f"table needs {d ** 3} entries, got {len(self.table)}")
        if any(not (0 <= v < d) for v in self.table):
            raise ValueError("table entry out of range")
        if not self.elements:
            object.__setattr__(self, "elements", tuple(str(i) for i in range(d)))
        elif len(self.elements) != d:
            raise ValueError("element name count does not match the domain")

    @classmethod
    def from_function(cls, size: int, fn: Callable[[int, int, int], int],
                      elements: Sequence[str] = ()) -> "FiniteAlgebra":
        table = tuple(fn(a, b, c) for a, b, c in product(range(size), repeat=3))
        return cls(size, table, tuple(elements))

    @classmethod
    def from_nested(cls, op: Sequence, elements: Sequence[str] = ()) -> "FiniteAlgebra":
        d = len(op)
        table = tuple(int(op[a][b][c]) for a, b, c in product(range(d), repeat=3))
        return cls(d, table, tuple(elements))

    def __call__(self, a: int, b: int, c: int) -> int:
        d = self.size
        return self.table[(a * d + b) * d + c]

    def nested(self) -> list:
        d = self.size
        return [[[self(a, b, c) for c in range(d)] for b in range(d)] for a in range(d)]

    def array(self) -> np.ndarray:
        d = self.size
        return np.asarray(self.table, dtype=np.int64).reshape(d, d, d)

    def to_json(self) -> dict:
        return {"elements": list(self.elements), "op": self.nested()}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteAlgebra":
        return cls.from_nested(data["op"], data.get("elements", ()))


def minority_projection(n: int) -> FiniteAlgebra:
    """The n-element minority algebra returning the middle argument on injective triples."""

    def p(a: int, b: int, c: int) -> int:
        if a == b:
            return c
        if a == c or b == c:
            return a if b == c else b
        return b

    return FiniteAlgebra.from_function(n, p)


# --- identities -------------------------------------------------------------

def check_flags(alg: FiniteAlgebra) -> dict[str, bool]:
    d = alg.size
    conservative = minority = maltsev = True
    for a, b, c in product(range(d), repeat=3):
        if alg(a, b, c) not in (a, b, c):
            conservative = False
            break
    for a, b in product(range(d), repeat=2):
        if alg(a, a, b) != b or alg(b, a, a) != b:
            maltsev = False
        if alg(a, a, b) != b or alg(a, b, a) != b or alg(b, a, a) != b:
            minority = False
    return {"conservative": conservative, "minority": minority, "maltsev": maltsev}


def is_conservative_minority(alg: FiniteAlgebra) -> bool:
    flags = check_flags(alg)
    return flags["conservative"] and flags["minority"]


# --- relations ----------------------------------------------------------------

def preserves(alg: FiniteAlgebra, tuples: Iterable[Sequence[int]], arity: int | None = None) -> bool:
    """Whether the operation applied coordinatewise keeps ``tuples`` closed."""
    rows = sorted({tuple(t) for t in tuples})
    if not rows:
        return True
    width = len(rows[0]) if arity is None else arity
    if any(len(t) != width for t in rows):
        raise ValueError("arity mismatch")
    d = alg.size
    r = np.asarray(rows, dtype=np.int64)
    m = len(rows)
    op = alg.array()
    codes = np.zeros(m, dtype=np.int64)
    for j in range(width):
        codes = codes * d + r[:, j]
    members = np.sort(codes)
    chunk = max(1, 2_000_000 // (m * m))
    for start in range(0, m, chunk):
        stop = min(m, start + chunk)
        out = np.zeros((stop - start, m, m), dtype=np.int64)
        for j in range(width):
            col = r[:, j]
            out = out * d + op[col[start:stop, None, None], col[None, :, None], col[None, None, :]]
        flat = out.ravel()
        pos = np.minimum(np.searchsorted(members, flat), m - 1)
        if not np.all(members[pos] == flat):
            return False
    return True


# --- congruences ----------------------------------------------------------------

@dataclass(frozen=True)
class Congruence:
    """A partition of ``0..size-1``; classes sorted by least element."""

    size: int
    classes: tuple[tuple[int, ...], ...]

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Congruence":
        groups: dict[int, list[int]] = {}
        for x, lab in enumerate(labels):
            groups.setdefault(lab, []).append(x)
        classes = sorted(tuple(g) for g in groups.values())
        return cls(len(labels), tuple(classes))

    @classmethod
    def from_classes(cls, size: int, classes: Iterable[Iterable[int]]) -> "Congruence":
        labels = list(range(size))
        seen: set[int] = set()
        for k, cl in enumerate(classes):
            for x in cl:
                if x in seen:
                    raise ValueError("classes overlap")
                seen.add(x)
                labels[x] = size + k
        return cls.from_labels(labels)

    @classmethod
    def equality(cls, size: int) -> "Congruence":
        return cls(size, tuple((x,) for x in range(size)))

    @classmethod
    def full(cls, size: int) -> "Congruence":
        return cls(size, (tuple(range(size)),))

    def labels(self) -> list[int]:
        out = [0] * self.size
        for k, cl in enumerate(self.classes):
            for x in cl:
                out[x] = k
        return out

    def related(self, a: int, b: int) -> bool:
        lab = self.labels()
        return lab[a] == lab[b]

    def class_of(self, a: int) -> tuple[int, ...]:
        for cl in self.classes:
            if a in cl:
                return cl
        raise KeyError(a)

    def nontrivial_classes(self) -> list[tuple[int, ...]]:
        return [cl for cl in self.classes if len(cl) > 1]

    @property
    def is_block(self) -> bool:
        return len(self.nontrivial_classes()) <= 1

    @property
    def is_equality(self) -> bool:
        return len(self.classes) == self.size

    @property
    def is_full(self) -> bool:
        return len(self.classes) == 1

    def leq(self, other: "Congruence") -> bool:
        lab = other.labels()
        return all(len({lab[x] for x in cl}) == 1 for cl in self.classes)

    def pairs(self) -> set[tuple[int, int]]:
        return {(a, b) for cl in self.classes for a in cl for b in cl}


class _UnionFind:
    def __init__(self, size: int) -> None:
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def generated_congruence(alg: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> Congruence:
    """Least congruence containing ``pairs``, by closing under basic translations."""
    d = alg.size
    uf = _UnionFind(d)
    work = [(a, b) for a, b in pairs if uf.union(a, b)]
    t = alg.table
    while work:
        u, v = work.pop()
        for c1 in range(d):
            for c2 in range(d):
                # the three basic translations with two constants
                for x, y in ((t[(u * d + c1) * d + c2], t[(v * d + c1) * d + c2]),
                             (t[(c1 * d + u) * d + c2], t[(c1 * d + v) * d + c2]),
                             (t[(c1 * d + c2) * d + u], t[(c1 * d + c2) * d + v])):
                    if x != y and uf.union(x, y):
                        work.append((x, y))
    return Congruence.from_labels([uf.find(x) for x in range(d)])


def principal_congruence(alg: FiniteAlgebra, a: int, b: int) -> Congruence:
    return generated_congruence(alg, [(a, b)])


def is_congruence(alg: FiniteAlgebra, theta: Congruence) -> bool:
    lab = theta.labels()
    d = alg.size
    for cl in theta.classes:
        for u in cl:
            for v in cl:
                if u >= v:
                    continue
                for c1 in range(d):
                    for c2 in range(d):
                        if lab[alg(u, c1, c2)] != lab[alg(v, c1, c2)]:
                            return False
                        if lab[alg(c1, u, c2)] != lab[alg(c1, v, c2)]:
                            return False
                        if lab[alg(c1, c2, u)] != lab[alg(c1, c2, v)]:
                            return False
    return True


def join(alg: FiniteAlgebra, a: Congruence, b: Congruence) -> Congruence:
    uf = _UnionFind(alg.size)
    for theta in (a, b):
        for cl in theta.classes:
            for x in cl[1:]:
                uf.union(cl[0], x)
    return Congruence.from_labels([uf.find(x) for x in range(alg.size)])


def meet(a: Congruence, b: Congruence) -> Congruence:
    la, lb = a.labels(), b.labels()
    return Congruence.from_labels([la[x] * (a.size + 1) + lb[x] for x in range(a.size)])


def congruence_lattice(alg: FiniteAlgebra) -> list[Congruence]:
    """All congruences, sorted by number of classes (finest last)."""
    d = alg.size
    found = {Congruence.equality(d)}
    principals = {principal_congruence(alg, a, b) for a in range(d) for b in range(a + 1, d)}
    found |= principals
    frontier = set(principals)
    while frontier:
        new = set()
        for x in frontier:
            for p in principals:
                j = join(alg, x, p)
                if j not in found:
                    new.add(j)
        found |= new
        frontier = new
    return sorted(found, key=lambda c: (len(c.classes), c.classes))


def block_congruences(alg: FiniteAlgebra, lattice: list[Congruence] | None = None) -> list[Congruence]:
    lattice = congruence_lattice(alg) if lattice is None else lattice
    blocks = [c for c in lattice if c.is_block]
    present = set(blocks)
    # every class of every congruence, taken alone, must again be a congruence
    for theta in lattice:
        for cl in theta.nontrivial_classes():
            derived = Congruence.from_classes(alg.size, [cl])
            if derived not in present:
                raise InconsistencyError(f"class {cl} does not give a block congruence")
    return blocks


def atoms(lattice: list[Congruence]) -> list[Congruence]:
    proper = [c for c in lattice if not c.is_equality]
    return [c for c in proper if not any(o != c and o.leq(c) for o in proper)]


def is_chain(lattice: list[Congruence]) -> bool:
    return all(a.leq(b) or b.leq(a) for a in lattice for b in lattice)


def is_subdirectly_irreducible(alg: FiniteAlgebra, lattice: list[Congruence] | None = None) -> bool:
    """Unique atom; one-element algebras count as irreducible by convention."""
    if alg.size == 1:
        return True
    lattice = congruence_lattice(alg) if lattice is None else lattice
    return len(atoms(lattice)) == 1


def monolith(alg: FiniteAlgebra, lattice: list[Congruence] | None = None) -> Congruence:
    if alg.size < 2:
        raise ValueError("monolith needs at least two elements")
    lattice = congruence_lattice(alg) if lattice is None else lattice
    found = atoms(lattice)
    if len(found) != 1:
        raise ValueError("algebra is not subdirectly irreducible")
    return found[0]


def max_proper_congruences(lattice: list[Congruence]) -> list[Congruence]:
    proper = [c for c in lattice if not c.is_full]
    return [c for c in proper if not any(o != c and c.leq(o) for o in proper)]


def max_proper_congruence(alg: FiniteAlgebra, lattice: list[Congruence] | None = None) -> Congruence:
    if alg.size < 2:
        raise ValueError("needs at least two elements")
    lattice = congruence_lattice(alg) if lattice is None else lattice
    found = max_proper_congruences(lattice)
    if len(found) != 1:
        raise InconsistencyError(f"{len(found)} maximal proper congruences")
    return found[0]


def is_simple(alg: FiniteAlgebra) -> bool:
    return alg.size == 1 or len(congruence_lattice(alg)) == 2


def quotient(alg: FiniteAlgebra, theta: Congruence) -> tuple[FiniteAlgebra, list[int]]:
    lab = theta.labels()
    reps = [cl[0] for cl in theta.classes]
    m = len(reps)
    table = []
    for a, b, c in product(range(m), repeat=3):
        table.append(lab[alg(reps[a], reps[b], reps[c])])
    q = FiniteAlgebra(m, tuple(table),
                      tuple("{" + ",".join(alg.elements[x] for x in cl) + "}" for cl in theta.classes))
    # well-definedness, checked on all representatives
    for a, b, c in product(range(alg.size), repeat=3):
        if lab[alg(a, b, c)] != q(lab[a], lab[b], lab[c]):
            raise ValueError("partition is not a congruence")
    return q, lab


def subalgebra(alg: FiniteAlgebra, subset: Iterable[int]) -> FiniteAlgebra:
    elems = sorted(set(subset))
    if not elems:
        raise ValueError("empty subset")
    pos = {x: i for i, x in enumerate(elems)}
    table = []
    for a, b, c in product(elems, repeat=3):
        v = alg(a, b, c)
        if v not in pos:
            raise ValueError("subset is not closed under the operation")
        table.append(pos[v])
    return FiniteAlgebra(len(elems), tuple(table), tuple(alg.elements[x] for x in elems))


def is_isomorphism(a1: FiniteAlgebra, a2: FiniteAlgebra, mapping: Sequence[int]) -> bool:
    if a1.size != a2.size or sorted(mapping) != list(range(a2.size)):
        return False
    return all(mapping[a1(a, b, c)] == a2(mapping[a], mapping[b], mapping[c])
               for a, b, c in product(range(a1.size), repeat=3))


def relabel(alg: FiniteAlgebra, perm: Sequence[int]) -> FiniteAlgebra:
    """The isomorphic copy with element ``a`` renamed ``perm[a]``."""
    d = alg.size
    inv = [0] * d
    for a, b in enumerate(perm):
        inv[b] = a
    table = tuple(perm[alg(inv[a], inv[b], inv[c])] for a, b, c in product(range(d), repeat=3))
    return FiniteAlgebra(d, table)


def canonical_table(alg: FiniteAlgebra, max_size: int = 6) -> tuple:
    """Least table over all relabelings; equal for isomorphic algebras."""
    if alg.size > max_size:
        raise CapacityError(f"canonical form limited to domain {max_size}")
    return min(relabel(alg, p).table for p in permutations(range(alg.size)))


# --- enumerating conservative minority algebras --------------------------------------

def _injective_triples(d: int) -> list[tuple[int, int, int]]:
    return [t for t in product(range(d), repeat=3) if len(set(t)) == 3]


def conservative_minority_from_choices(d: int, choices: Sequence[int]) -> FiniteAlgebra:
    """The conservative minority operation picking coordinate ``choices[i]`` on the i-th injective triple."""
    picked = dict(zip(_injective_triples(d), choices))

    def op(a: int, b: int, c: int) -> int:
        if a == b:
            return c
        if a == c:
            return b
        if b == c:
            return a
        return (a, b, c)[picked[(a, b, c)]]

    return FiniteAlgebra.from_function(d, op)


def all_conservative_minority(d: int, up_to_iso: bool = True,
                              max_count: int = 100_000) -> list[FiniteAlgebra]:
    """Every conservative minority algebra on ``d`` elements, optionally one per isomorphism type."""
    m = len(_injective_triples(d))
    if 3 ** m > max_count:
        raise CapacityError(f"{3 ** m} operations on {d} elements exceed the cap of {max_count}")
    out = []
    seen: set = set()
    for choices in product(range(3), repeat=m):
        alg = conservative_minority_from_choices(d, choices)
        if up_to_iso:
            key = canonical_table(alg)
            if key in seen:
                continue
            seen.add(key)
        out.append(alg)
    return out


def random_conservative_minority(d: int, rng) -> FiniteAlgebra:
    return conservative_minority_from_choices(d, [rng.randrange(3) for _ in _injective_triples(d)])


# --- clone search -------------------------------------------------------------

def derive_minority(alg: FiniteAlgebra, max_depth: int = 6, max_size: int = 5,
                    max_terms: int = 20000) -> FiniteAlgebra:
    """Find a conservative minority term operation of a conservative Maltsev algebra."""
    flags = check_flags(alg)
    if not (flags["conservative"] and flags["maltsev"]):
        raise ValueError("input must be a conservative Maltsev algebra")
    if flags["minority"]:
        return alg
    d = alg.size
    if d > max_size:
        raise CapacityError(f"clone search capped at domain size {max_size}")
    triples = np.array(list(product(range(d), repeat=3)), dtype=np.int64)
    op = alg.array()
    x, y, z = triples[:, 0], triples[:, 1], triples[:, 2]
    pair_a, pair_b = np.array(list(product(range(d), repeat=2)), dtype=np.int64).T

    def index(a, b, c):
        return (a * d + b) * d + c

    def is_minority(t: np.ndarray) -> bool:
        return (np.all(t[index(pair_a, pair_a, pair_b)] == pair_b)
                and np.all(t[index(pair_a, pair_b, pair_a)] == pair_b)
                and np.all(t[index(pair_b, pair_a, pair_a)] == pair_b))

    terms = [x.copy(), y.copy(), z.copy()]
    seen = {t.tobytes() for t in terms}
    old = 0
    for _ in range(max_depth):
        current = list(terms)
        new = []
        for i, t1 in enumerate(current):
            for j, t2 in enumerate(current):
                for k, t3 in enumerate(current):
                    if max(i, j, k) < old:
                        continue
                    t = op[t1, t2, t3]
                    key = t.tobytes()
                    if key in seen:
                        continue
                    seen.add(key)
                    if is_minority(t):
                        return FiniteAlgebra(d, tuple(int(v) for v in t), alg.elements)
                    new.append(t)
                    if len(seen) > max_terms:
                        raise CapacityError("clone search exceeded its term budget")
        if not new:
            raise InconsistencyError("clone closed without a minority term")
        old = len(current)
        terms = current + new
    raise CapacityError(f"no minority term up to composition depth {max_depth}")


__all__ = [
    "FiniteAlgebra", "Congruence", "minority_projection", "check_flags", "is_conservative_minority",
    "preserves", "generated_congruence", "principal_congruence", "is_congruence", "join", "meet",
    "congruence_lattice", "block_congruences", "atoms", "is_chain", "is_subdirectly_irreducible",
    "monolith", "max_proper_congruences", "max_proper_congruence", "is_simple", "quotient",
    "subalgebra", "is_isomorphism", "relabel", "canonical_table", "conservative_minority_from_choices",
    "all_conservative_minority", "random_conservative_minority", "derive_minority",
]
