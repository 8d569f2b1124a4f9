"""Static checks: linearity and symmetry of rules."""

from __future__ import annotations

from .syntax import Atom, DatalogProgram, Rule


def idb_atoms(p: DatalogProgram, rule: Rule) -> list[Atom]:
    idb = p.idbs
    return [a for a in rule.body if a.pred in idb]


def check_linear(p: DatalogProgram) -> bool:
    """Every body holds at most one atom with an intensional predicate."""
    return all(len(idb_atoms(p, r)) <= 1 for r in p.rules)


def symmetric_rule(p: DatalogProgram, rule: Rule) -> Rule | None:
    """``Q(y) :- phi, P(x)`` for ``P(x) :- phi, Q(y)``; ``None`` without a body IDB."""
    idb = idb_atoms(p, rule)
    if len(idb) != 1:
        return None
    q = idb[0]
    rest = [a for a in rule.body if a is not q]
    return Rule(q, tuple(rest) + (rule.head,))


def _match(a: Atom, b: Atom, fwd: dict, bwd: dict) -> list | None:
    if a.pred != b.pred or len(a.args) != len(b.args):
        return None
    added = []
    for x, y in zip(a.args, b.args):
        fx, by = fwd.get(x), bwd.get(y)
        if fx is None and by is None:
            fwd[x], bwd[y] = y, x
            added.append(x)
        elif fx != y or by != x:
            for z in added:
                del bwd[fwd.pop(z)]
            return None
    return added


def rules_equivalent(r1: Rule, r2: Rule) -> bool:
    """Equal up to a bijective renaming of variables and reordering of body atoms."""
    if len(r1.body) != len(r2.body) or sorted(a.pred for a in r1.body) != sorted(a.pred for a in r2.body):
        return False
    fwd: dict = {}
    bwd: dict = {}
    if _match(r1.head, r2.head, fwd, bwd) is None:
        return False
    used = [False] * len(r2.body)

    def rec(i: int) -> bool:
        if i == len(r1.body):
            return True
        for j, b in enumerate(r2.body):
            if used[j]:
                continue
            added = _match(r1.body[i], b, fwd, bwd)
            if added is None:
                continue
            used[j] = True
            if rec(i + 1):
                return True
            used[j] = False
            for z in added:
                del bwd[fwd.pop(z)]
        return False

    return rec(0)


def _signature(rule: Rule) -> tuple:
    return (rule.head.pred, len(rule.head.args), tuple(sorted(a.pred for a in rule.body)))


def missing_symmetric_rules(p: DatalogProgram) -> list[Rule]:
    """Rules whose symmetric counterpart is absent."""
    by_sig: dict = {}
    for r in p.rules:
        by_sig.setdefault(_signature(r), []).append(r)
    missing = []
    for r in p.rules:
        sym = symmetric_rule(p, r)
        if sym is None:
            continue
        if not any(rules_equivalent(sym, c) for c in by_sig.get(_signature(sym), ())):
            missing.append(r)
    return missing


def check_symmetric(p: DatalogProgram) -> bool:
    """Linear, and every rule with a body IDB has its symmetric rule."""
    return check_linear(p) and not missing_symmetric_rules(p)


def symmetric_closure(p: DatalogProgram) -> DatalogProgram:
    """Add the missing symmetric counterparts of a linear program."""
    rules = list(p.rules)
    out = DatalogProgram(rules, p.goal, p.outputs)
    for r in missing_symmetric_rules(out):
        sym = symmetric_rule(out, r)
        if not any(rules_equivalent(sym, c) for c in rules):
            rules.append(sym)
    return out


__all__ = [
    "idb_atoms", "check_linear", "symmetric_rule", "rules_equivalent", "missing_symmetric_rules",
    "check_symmetric", "symmetric_closure",
]
