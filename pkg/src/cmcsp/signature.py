"""Relation symbols of the recursive signatures and their s-expression form.

A symbol at level 0 is one of ``empty``, ``point``, ``eq2``, ``eq3``.  A
symbol at level k+1 is either a pair of a level-k symbol with an outer symbol
on the nonzero children, or one of the distinguished nonuniform symbols
``full``, ``transfer`` (both level-tagged), ``swap01`` and ``lin`` (level 1
only).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Iterator, Union


@dataclass(frozen=True)
class Base:
    name: str  # empty | point | eq2 | eq3

    def __post_init__(self) -> None:
        if self.name not in _BASE_ARITY:
            raise ValueError(f"unknown base symbol {self.name!r}")

    @property
    def level(self) -> int:
        return 0

    @property
    def arity(self) -> int:
        return _BASE_ARITY[self.name]

    def __str__(self) -> str:
        return self.name


_BASE_ARITY = {"empty": 1, "point": 1, "eq2": 2, "eq3": 3}


@dataclass(frozen=True)
class OSet:
    """Unary outer symbol: a subset of the nonzero children ``1..n-1``."""

    members: frozenset

    arity = 1

    def __str__(self) -> str:
        return "(set" + "".join(f" {c}" for c in sorted(self.members)) + ")"


@dataclass(frozen=True)
class OPerm:
    """Binary outer symbol: ``images[c-1]`` is the image of child ``c``."""

    images: tuple

    arity = 2

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(self.images)}: {self.images}")

    def __call__(self, c: int) -> int:
        return self.images[c - 1]

    @property
    def is_identity(self) -> bool:
        return all(v == i + 1 for i, v in enumerate(self.images))

    def __str__(self) -> str:
        return "(perm" + "".join(f" {c}" for c in self.images) + ")"


@dataclass(frozen=True)
class OEq3:
    arity = 3

    def __str__(self) -> str:
        return "eq3"


OSymbol = Union[OSet, OPerm, OEq3]


@dataclass(frozen=True)
class Pair:
    inner: "Symbol"
    outer: OSymbol

    def __post_init__(self) -> None:
        if self.inner.arity != self.outer.arity:
            raise ValueError("pair components differ in arity")

    @property
    def level(self) -> int:
        return self.inner.level + 1

    @property
    def arity(self) -> int:
        return self.outer.arity

    def __str__(self) -> str:
        return f"(pair {self.inner} {self.outer})"


@dataclass(frozen=True)
class Full:
    k: int
    arity = 2

    @property
    def level(self) -> int:
        return self.k

    def __str__(self) -> str:
        return f"(full {self.k})"


@dataclass(frozen=True)
class Transfer:
    """The canonical transfer relation at level ``k``."""

    k: int
    arity = 2

    @property
    def level(self) -> int:
        return self.k

    def __str__(self) -> str:
        return f"(transfer {self.k})"


@dataclass(frozen=True)
class Swap01:
    arity = 2
    level = 1

    def __str__(self) -> str:
        return "swap01"


@dataclass(frozen=True)
class Lin:
    arity = 3
    level = 1

    def __str__(self) -> str:
        return "lin"


Symbol = Union[Base, Pair, Full, Transfer, Swap01, Lin]

EMPTY, POINT, EQ2, EQ3 = Base("empty"), Base("point"), Base("eq2"), Base("eq3")
SWAP01, LIN, OEQ3 = Swap01(), Lin(), OEq3()


def is_uniform(sym: Symbol) -> bool:
    return isinstance(sym, (Pair, Base))


def identity_perm(n: int) -> OPerm:
    return OPerm(tuple(range(1, n)))


def eq_symbol(n: int, k: int, arity: int = 2) -> Symbol:
    """Equality of the given arity at level ``k``."""
    sym: Symbol = EQ2 if arity == 2 else EQ3
    outer: OSymbol = identity_perm(n) if arity == 2 else OEQ3
    for _ in range(k):
        sym = Pair(sym, outer)
    return sym


def sub_s(n: int, r: int, l: int) -> Symbol:
    """The derived transfer symbol: canonical transfer at level ``r`` wrapped ``l`` times."""
    if r < 1 or l < 0:
        raise ValueError("need r >= 1 and l >= 0")
    sym: Symbol = Transfer(r)
    for _ in range(l):
        sym = Pair(sym, identity_perm(n))
    return sym


def check_symbol(sym: Symbol, n: int, k: int) -> None:
    """Raise unless ``sym`` belongs to the level-k signature for ``n``."""
    if sym.level != k:
        raise ValueError(f"{sym} has level {sym.level}, expected {k}")
    s = sym
    while isinstance(s, Pair):
        o = s.outer
        if isinstance(o, OSet) and not o.members <= set(range(1, n)):
            raise ValueError(f"{o} is not a subset of 1..{n - 1}")
        if isinstance(o, OPerm) and len(o.images) != n - 1:
            raise ValueError(f"{o} is not a permutation of 1..{n - 1}")
        s = s.inner
    if isinstance(s, (Full, Transfer)) and s.k < 1:
        raise ValueError("nonuniform symbols start at level 1")


# --- parsing -----------------------------------------------------------------

def _tokens(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse_symbol(text: str) -> Symbol:
    toks = _tokens(text)
    pos = 0

    def expect(tok: str) -> None:
        nonlocal pos
        if pos >= len(toks) or toks[pos] != tok:
            raise ValueError(f"expected {tok!r} at token {pos} in {text!r}")
        pos += 1

    def outer() -> OSymbol:
        nonlocal pos
        if toks[pos] == "eq3":
            pos += 1
            return OEQ3
        expect("(")
        head = toks[pos]
        pos += 1
        items = []
        while toks[pos] != ")":
            items.append(int(toks[pos]))
            pos += 1
        expect(")")
        if head == "set":
            return OSet(frozenset(items))
        if head == "perm":
            return OPerm(tuple(items))
        raise ValueError(f"unknown outer symbol {head!r}")

    def symbol() -> Symbol:
        nonlocal pos
        tok = toks[pos]
        if tok != "(":
            pos += 1
            if tok in _BASE_ARITY:
                return Base(tok)
            if tok == "swap01":
                return SWAP01
            if tok == "lin":
                return LIN
            raise ValueError(f"unknown symbol {tok!r}")
        pos += 1
        head = toks[pos]
        pos += 1
        if head == "pair":
            inner = symbol()
            out = outer()
            expect(")")
            return Pair(inner, out)
        if head in ("full", "transfer"):
            level = int(toks[pos])
            pos += 1
            expect(")")
            return Full(level) if head == "full" else Transfer(level)
        raise ValueError(f"unknown symbol head {head!r}")

    sym = symbol()
    if pos != len(toks):
        raise ValueError(f"trailing tokens in {text!r}")
    return sym


# --- enumeration and sampling ----------------------------------------------------

def outer_symbols(n: int, arity: int) -> list[OSymbol]:
    others = list(range(1, n))
    if arity == 1:
        out = []
        for mask in range(1 << len(others)):
            out.append(OSet(frozenset(c for i, c in enumerate(others) if mask >> i & 1)))
        return out
    if arity == 2:
        return [OPerm(p) for p in permutations(others)]
    return [OEQ3]


@lru_cache(maxsize=None)
def _symbols(n: int, k: int, arity: int) -> tuple:
    if k == 0:
        return {1: (EMPTY, POINT), 2: (EQ2,), 3: (EQ3,)}[arity]
    out: list = [Pair(s, o) for s in _symbols(n, k - 1, arity) for o in outer_symbols(n, arity)]
    if arity == 2:
        out += [Full(k), Transfer(k)]
        if k == 1:
            out.append(SWAP01)
    if arity == 3 and k == 1:
        out.append(LIN)
    return tuple(out)


def symbols(n: int, k: int, arity: int | None = None) -> list[Symbol]:
    """Every symbol of the level-k signature (optionally of one arity)."""
    arities = (1, 2, 3) if arity is None else (arity,)
    return [s for a in arities for s in _symbols(n, k, a)]


def count_symbols(n: int, k: int, arity: int) -> int:
    return len(_symbols(n, k, arity))


def random_outer(n: int, arity: int, rng: random.Random) -> OSymbol:
    if arity == 1:
        return OSet(frozenset(c for c in range(1, n) if rng.random() < 0.5))
    if arity == 2:
        images = list(range(1, n))
        rng.shuffle(images)
        return OPerm(tuple(images))
    return OEQ3


def random_symbol(n: int, k: int, arity: int, rng: random.Random, p_nonuniform: float = 0.3) -> Symbol:
    """Sample a symbol without enumerating the signature."""
    if k == 0:
        return {1: (EMPTY, POINT)[rng.random() < 0.8], 2: EQ2, 3: EQ3}[arity]
    nonuniform: list[Symbol] = []
    if arity == 2:
        nonuniform = [Full(k), Transfer(k)] + ([SWAP01] if k == 1 else [])
    elif arity == 3 and k == 1:
        nonuniform = [LIN]
    if nonuniform and rng.random() < p_nonuniform:
        return rng.choice(nonuniform)
    return Pair(random_symbol(n, k - 1, arity, rng, p_nonuniform), random_outer(n, arity, rng))


def iter_nested(sym: Symbol) -> Iterator[Symbol]:
    while True:
        yield sym
        if not isinstance(sym, Pair):
            return
        sym = sym.inner


__all__ = [
    "Base", "OSet", "OPerm", "OEq3", "Pair", "Full", "Transfer", "Swap01", "Lin", "Symbol",
    "OSymbol", "EMPTY", "POINT", "EQ2", "EQ3", "SWAP01", "LIN", "OEQ3", "is_uniform",
    "identity_perm", "eq_symbol", "sub_s", "check_symbol", "parse_symbol", "outer_symbols",
    "symbols", "count_symbols", "random_outer", "random_symbol", "iter_nested",
]
