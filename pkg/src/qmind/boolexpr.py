"""Boolean expressions: AST, parser, evaluator and brute-force satisfiability.

The brute-force enumerator is the classical ground truth against which every
compiled circuit is checked.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence, Union

from .errors import ExpressionError, ParseError, UnboundVariableError

MAX_ENUMERATION_VARS = 24
CNF3_VARIABLES = ("A", "B", "C")


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ExpressionError("variable name must be nonempty")


@dataclass(frozen=True)
class Not:
    child: Expression


@dataclass(frozen=True)
class And:
    children: tuple[Expression, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ExpressionError("And needs at least two operands")


@dataclass(frozen=True)
class Or:
    children: tuple[Expression, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ExpressionError("Or needs at least two operands")


Expression = Union[Var, Not, And, Or]


def conj(*operands: Expression) -> Expression:
    """n-ary AND with nested ANDs flattened; a single operand is returned as is."""
    flat = []
    for e in operands:
        flat.extend(e.children if isinstance(e, And) else (e,))
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*operands: Expression) -> Expression:
    flat = []
    for e in operands:
        flat.extend(e.children if isinstance(e, Or) else (e,))
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def canonical(expr: Expression) -> Expression:
    """Flatten nested And/Or nodes of the same kind."""
    if isinstance(expr, Var):
        return expr
    if isinstance(expr, Not):
        return Not(canonical(expr.child))
    children = [canonical(c) for c in expr.children]
    return conj(*children) if isinstance(expr, And) else disj(*children)


def variables(expr: Expression) -> list[str]:
    """Variable names in order of first appearance."""
    seen: dict[str, None] = {}

    def walk(e):
        if isinstance(e, Var):
            seen.setdefault(e.name)
        elif isinstance(e, Not):
            walk(e.child)
        else:
            for c in e.children:
                walk(c)

    walk(expr)
    return list(seen)


def evaluate(expr: Expression, assignment: Mapping[str, bool]) -> bool:
    if isinstance(expr, Var):
        try:
            return bool(assignment[expr.name])
        except KeyError:
            raise UnboundVariableError(expr.name) from None
    if isinstance(expr, Not):
        return not evaluate(expr.child, assignment)
    if isinstance(expr, And):
        # evaluate every child so unbound variables are always reported
        return all([evaluate(c, assignment) for c in expr.children])
    if isinstance(expr, Or):
        return any([evaluate(c, assignment) for c in expr.children])
    raise ExpressionError(f"not an expression node: {expr!r}")


def assignments(var_order: Sequence[str]) -> Iterator[tuple[int, dict[str, bool]]]:
    """All ``2**n`` assignments as ``(index, mapping)``; bit ``k`` of index is ``var_order[k]``."""
    n = len(var_order)
    for index in range(1 << n):
        yield index, {v: bool(index >> k & 1) for k, v in enumerate(var_order)}


def satisfying_indices(expr: Expression, var_order: Sequence[str] | None = None) -> list[int]:
    if var_order is None:
        var_order = sorted(variables(expr))
    missing = set(variables(expr)) - set(var_order)
    if missing:
        raise UnboundVariableError(sorted(missing)[0])
    if len(var_order) > MAX_ENUMERATION_VARS:
        raise ExpressionError(
            f"{len(var_order)} variables exceeds the enumeration ceiling of {MAX_ENUMERATION_VARS}"
        )
    return [i for i, a in assignments(var_order) if evaluate(expr, a)]


def satisfying_assignments(expr: Expression, var_order: Sequence[str] | None = None) -> list[str]:
    """Satisfying assignments as bitstrings, ``var_order[0]`` rightmost, ascending."""
    if var_order is None:
        var_order = sorted(variables(expr))
    width = len(var_order)
    return [format(i, f"0{width}b") for i in satisfying_indices(expr, var_order)]


# -- text form ---------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_.]*)|(?P<op>[()¬~!∧&∨|]))"
)
_NOT = {"¬", "~", "!"}
_AND = {"∧", "&"}
_OR = {"∨", "|"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        value = m.group(m.lastgroup)
        if m.lastgroup == "ident" and value.lower() in ("and", "or", "not"):
            tokens.append(("op", {"and": "&", "or": "|", "not": "~"}[value.lower()], start))
        else:
            tokens.append((m.lastgroup, value, start))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def error(self, message):
        tok = self.peek()
        raise ParseError(message, tok[2] if tok else len(self.text))

    def parse(self):
        if not self.tokens:
            raise ParseError("empty expression", 0)
        expr = self.disjunction()
        if self.peek() is not None:
            self.error(f"unexpected {self.peek()[1]!r}")
        return expr

    def disjunction(self):
        parts = [self.conjunction()]
        while (tok := self.peek()) and tok[1] in _OR:
            self.i += 1
            parts.append(self.conjunction())
        return disj(*parts)

    def conjunction(self):
        parts = [self.unary()]
        while (tok := self.peek()) and tok[1] in _AND:
            self.i += 1
            parts.append(self.unary())
        return conj(*parts)

    def unary(self):
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of expression")
        kind, value, _ = tok
        if value in _NOT:
            self.i += 1
            return Not(self.unary())
        if value == "(":
            self.i += 1
            inner = self.disjunction()
            if (close := self.peek()) is None or close[1] != ")":
                self.error("expected ')'")
            self.i += 1
            return inner
        if kind == "ident":
            self.i += 1
            return Var(value)
        self.error(f"unexpected {value!r}")


def parse(text: str) -> Expression:
    """Parse infix notation; ``¬ ~ !`` bind tightest, then ``∧ &``, then ``∨ |``."""
    return _Parser(text).parse()


def format_expr(expr: Expression, ascii: bool = False) -> str:
    neg, and_, or_ = ("~", " & ", " | ") if ascii else ("¬", " ∧ ", " ∨ ")

    def fmt(e, parent):
        if isinstance(e, Var):
            return e.name
        if isinstance(e, Not):
            return neg + fmt(e.child, "not")
        if isinstance(e, And):
            body = and_.join(fmt(c, "and") for c in e.children)
            return f"({body})" if parent == "not" else body
        body = or_.join(fmt(c, "or") for c in e.children)
        return f"({body})" if parent in ("not", "and") else body

    return fmt(expr, None)


# -- the three-clause, two-literal format -------------------------------------


@dataclass(frozen=True)
class Literal:
    variable: str
    negated: bool = False

    def __post_init__(self):
        if self.variable not in CNF3_VARIABLES:
            raise ExpressionError(f"variable {self.variable!r} not in {CNF3_VARIABLES}")

    def to_expression(self) -> Expression:
        return Not(Var(self.variable)) if self.negated else Var(self.variable)

    def __str__(self):
        return ("¬" if self.negated else "") + self.variable


@dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, Literal]

    def __post_init__(self):
        lits = tuple(self.literals)
        if len(lits) != 2:
            raise ExpressionError(f"a clause has exactly 2 literals, got {len(lits)}")
        if lits[0].variable == lits[1].variable:
            raise ExpressionError(f"repeated variable {lits[0].variable} in clause")
        object.__setattr__(self, "literals", lits)

    def to_expression(self) -> Expression:
        return Or(tuple(l.to_expression() for l in self.literals))

    def __str__(self):
        return f"({self.literals[0]} ∨ {self.literals[1]})"


@dataclass(frozen=True)
class Cnf3Expression:
    clauses: tuple[Clause, Clause, Clause]

    def __post_init__(self):
        clauses = tuple(self.clauses)
        if len(clauses) != 3:
            raise ExpressionError(f"expected 3 clauses, got {len(clauses)}")
        object.__setattr__(self, "clauses", clauses)

    @classmethod
    def from_literals(cls, *pairs: tuple[str, str]) -> Cnf3Expression:
        """Build from literal strings such as ``("A", "~B")``."""
        def lit(s):
            s = s.strip()
            neg = s[:1] in _NOT
            return Literal(s[1:] if neg else s, neg)

        return cls(tuple(Clause((lit(a), lit(b))) for a, b in pairs))

    def to_expression(self) -> Expression:
        return And(tuple(c.to_expression() for c in self.clauses))

    def satisfying_indices(self) -> list[int]:
        return satisfying_indices(self.to_expression(), CNF3_VARIABLES)

    def __str__(self):
        return " ∧ ".join(str(c) for c in self.clauses)


def _literal_of(expr: Expression) -> Literal:
    if isinstance(expr, Var):
        return Literal(expr.name)
    if isinstance(expr, Not) and isinstance(expr.child, Var):
        return Literal(expr.child.name, True)
    raise ExpressionError(f"not a literal: {format_expr(expr)}")


def to_cnf3(expr: Expression | str) -> Cnf3Expression:
    if isinstance(expr, str):
        expr = parse(expr)
    expr = canonical(expr)
    if not isinstance(expr, And) or len(expr.children) != 3:
        count = len(expr.children) if isinstance(expr, And) else 1
        raise ExpressionError(f"expected 3 clauses, got {count}")
    clauses = []
    for child in expr.children:
        if not isinstance(child, Or) or len(child.children) != 2:
            raise ExpressionError(f"clause is not a 2-literal disjunction: {format_expr(child)}")
        clauses.append(Clause(tuple(_literal_of(c) for c in child.children)))
    return Cnf3Expression(tuple(clauses))


def all_clauses(ordered: bool = False) -> list[Clause]:
    """Every well-formed clause; with ``ordered`` the two literal orders count separately."""
    out = []
    pairs = (
        itertools.permutations(CNF3_VARIABLES, 2)
        if ordered
        else itertools.combinations(CNF3_VARIABLES, 2)
    )
    for a, b in pairs:
        for na, nb in itertools.product((False, True), repeat=2):
            out.append(Clause((Literal(a, na), Literal(b, nb))))
    return out


def all_cnf3(ordered: bool = False) -> Iterator[Cnf3Expression]:
    clauses = all_clauses(ordered)
    for triple in itertools.product(clauses, repeat=3):
        yield Cnf3Expression(triple)


def random_cnf3(rng) -> Cnf3Expression:
    """Draw a clause triple uniformly using a ``numpy.random.Generator``."""
    clauses = all_clauses(ordered=True)
    return Cnf3Expression(tuple(clauses[int(i)] for i in rng.integers(len(clauses), size=3)))
