"""Datalog programs with the GF(2) equation predicates, and their text form.

Grammar::

    program := (rule | directive)*
    rule    := atom [":-" atom ("," atom)*] "."
    atom    := NAME ["(" term ("," term)* ")"] | term "=" term
    NAME    := identifier | "L[" k ";" a1 "," a2 "," a3 "," b "]"
    directive := "goal" NAME "." | "output" NAME ("," NAME)* "."

Lines starting with ``%`` are comments.  ``L[k;a1,a2,a3,b]`` has arity
``k+3`` and asks for ``a1*x_v1 + a2*x_v2 + a3*x_v3 = b`` per ``k``-prefix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

EQ = "="
LTOP, LBOT = "Ltop", "Lbot"

_LNAME = re.compile(r"L\[(\d+);([01]),([01]),([01]),([01])\]$")


class DatalogSyntaxError(ValueError):
    pass


def l_name(k: int, a1: int, a2: int, a3: int, b: int) -> str:
    return f"L[{k};{a1},{a2},{a3},{b}]"


def l_params(pred: str) -> tuple[int, int, int, int, int] | None:
    """``(k, a1, a2, a3, b)`` for an equation predicate, else ``None``."""
    m = _LNAME.match(pred)
    return tuple(int(g) for g in m.groups()) if m else None  # type: ignore[return-value]


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple

    def __str__(self) -> str:
        if self.pred == EQ:
            return f"{self.args[0]} = {self.args[1]}"
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(self.args)})"

    @property
    def variables(self) -> set:
        return set(self.args)


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(a) for a in self.body)}."


@dataclass
class DatalogProgram:
    rules: list = field(default_factory=list)
    goal: str | None = None
    outputs: tuple = ()

    @property
    def idbs(self) -> set:
        out = {r.head.pred for r in self.rules}
        if any(l_params(p) for p in out):
            out |= {LTOP, LBOT}
        return out

    @property
    def edbs(self) -> set:
        idb = self.idbs
        return {a.pred for r in self.rules for a in r.body if a.pred not in idb} - {EQ}

    @property
    def equation_arity(self) -> int | None:
        """The prefix length ``k`` shared by all equation predicates, if any."""
        ks = {l_params(r.head.pred)[0] for r in self.rules if l_params(r.head.pred)}
        if len(ks) > 1:
            raise DatalogSyntaxError(f"equation predicates with different prefix lengths {sorted(ks)}")
        return ks.pop() if ks else None

    def arities(self) -> dict:
        out: dict = {}
        for r in self.rules:
            for a in (r.head, *r.body):
                if out.setdefault(a.pred, len(a.args)) != len(a.args):
                    raise DatalogSyntaxError(f"{a.pred} used with arities {out[a.pred]} and {len(a.args)}")
        k = self.equation_arity
        if k is not None:
            out[LTOP] = out[LBOT] = k
        return out

    def validate(self) -> None:
        ar = self.arities()
        for r in self.rules:
            params = l_params(r.head.pred)
            if params and len(r.head.args) != params[0] + 3:
                raise DatalogSyntaxError(f"{r.head.pred} needs arity {params[0] + 3}")
            if r.head.pred in (LTOP, LBOT, EQ):
                raise DatalogSyntaxError(f"{r.head.pred} cannot be a rule head")
            bound = set().union(*(a.variables for a in r.body)) if r.body else set()
            if not r.head.variables <= bound:
                raise DatalogSyntaxError(f"unsafe variables in rule {r}")
        if self.goal is not None and self.goal not in ar and self.goal not in (LTOP, LBOT):
            raise DatalogSyntaxError(f"goal {self.goal} does not occur in the program")

    def __str__(self) -> str:
        return format_program(self)


def format_program(p: DatalogProgram) -> str:
    lines = [str(r) for r in p.rules]
    if p.goal is not None:
        lines.append(f"goal {p.goal}.")
    if p.outputs:
        lines.append(f"output {', '.join(p.outputs)}.")
    return "\n".join(lines) + "\n"


# --- parser --------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(L\[[^\]]*\])|([A-Za-z_][A-Za-z0-9_']*)|(:-)|([(),.=]))")


def _tokenize(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.split("%", 1)[0]
        pos = 0
        while pos < len(line):
            if line[pos:].strip() == "":
                break
            m = _TOKEN.match(line, pos)
            if not m:
                raise DatalogSyntaxError(f"unexpected text {line[pos:].strip()!r}")
            out.append(next(g for g in m.groups() if g is not None))
            pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str) -> None:
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise DatalogSyntaxError("unexpected end of input")
        if expected is not None and tok != expected:
            raise DatalogSyntaxError(f"expected {expected!r}, got {tok!r}")
        self.i += 1
        return tok

    def name(self) -> str:
        tok = self.take()
        if tok.startswith("L[") and l_params(tok) is None:
            raise DatalogSyntaxError(f"malformed equation predicate {tok!r}")
        if not (tok[0].isalpha() or tok[0] == "_"):
            raise DatalogSyntaxError(f"expected a name, got {tok!r}")
        return tok

    def atom(self) -> Atom:
        first = self.name()
        if self.peek() == EQ:
            self.take()
            return Atom(EQ, (first, self.name()))
        args: list = []
        if self.peek() == "(":
            self.take()
            args.append(self.name())
            while self.peek() == ",":
                self.take()
                args.append(self.name())
            self.take(")")
        return Atom(first, tuple(args))

    def program(self) -> DatalogProgram:
        prog = DatalogProgram()
        outputs: list = []
        while self.peek() is not None:
            if self.peek() in ("goal", "output") and self.i + 1 < len(self.toks) and self.toks[self.i + 1] not in ("(", ":-", "."):
                word = self.take()
                names = [self.name()]
                while self.peek() == ",":
                    self.take()
                    names.append(self.name())
                self.take(".")
                if word == "goal":
                    if len(names) != 1:
                        raise DatalogSyntaxError("one goal predicate expected")
                    prog.goal = names[0]
                else:
                    outputs.extend(names)
                continue
            head = self.atom()
            body: list = []
            if self.peek() == ":-":
                self.take()
                body.append(self.atom())
                while self.peek() == ",":
                    self.take()
                    body.append(self.atom())
            self.take(".")
            prog.rules.append(Rule(head, tuple(body)))
        prog.outputs = tuple(outputs)
        prog.validate()
        return prog


def parse_program(text: str) -> DatalogProgram:
    return _Parser(text).program()


__all__ = [
    "EQ", "LTOP", "LBOT", "DatalogSyntaxError", "l_name", "l_params", "Atom", "Rule",
    "DatalogProgram", "format_program", "parse_program",
]
