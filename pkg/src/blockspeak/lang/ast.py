"""AST for the agent language: terms, literals, logic/arithmetic expressions,
plans and whole agent programs.

Everything here is an immutable value; instances can be shared freely across
threads. Source locations are carried on top-level constructs for diagnostics
but are excluded from equality, so structural comparison (and the
parse/print round-trip) ignores where a node came from.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union

ATOM_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
VAR_RE = re.compile(r"[A-Z_][A-Za-z0-9_]*\Z")
ACTION_ID_RE = re.compile(r"[a-z][A-Za-z0-9_]*(:[a-z][A-Za-z0-9_]*)?\Z")

# 'not' is a prefix operator in contexts; allowing it as a functor would make
# `not(p)` ambiguous.
RESERVED_NAMES = frozenset({"not"})


@dataclass(frozen=True)
class SourceLoc:
    line: int
    col: int


def _check_atom_name(name: str) -> None:
    if not ATOM_RE.match(name) or name in RESERVED_NAMES:
        raise ValueError(f"invalid atom/functor name: {name!r}")


def _check_var_name(name: str) -> None:
    if not VAR_RE.match(name):
        raise ValueError(f"invalid variable name: {name!r}")


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        _check_atom_name(self.name)


@dataclass(frozen=True)
class Str:
    text: str


@dataclass(frozen=True)
class Num:
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        if not math.isfinite(self.value):
            raise ValueError(f"numbers must be finite, got {self.value!r}")


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        _check_var_name(self.name)


@dataclass(frozen=True)
class ListTerm:
    items: tuple["Term", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True)
class Structure:
    functor: str
    args: tuple["Term", ...]

    def __post_init__(self):
        _check_atom_name(self.functor)
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("zero-arity structures must be Atoms")


Term = Union[Atom, Str, Num, Var, ListTerm, Structure]


@dataclass(frozen=True)
class Literal:
    """A predicate: belief, goal, or plan-trigger pattern.

    `negated` marks default negation and is legal only inside plan contexts;
    the parser always produces `Not(...)` nodes instead, keeping one canonical
    encoding, but compiled or hand-built contexts may carry the flag.
    """

    functor: str
    args: tuple[Term, ...] = ()
    negated: bool = False
    loc: Optional[SourceLoc] = field(default=None, compare=False)

    def __post_init__(self):
        _check_atom_name(self.functor)
        object.__setattr__(self, "args", tuple(self.args))

    def to_term(self) -> Term:
        return Structure(self.functor, self.args) if self.args else Atom(self.functor)

    @staticmethod
    def from_term(t: Term) -> "Literal":
        if isinstance(t, Atom):
            return Literal(t.name)
        if isinstance(t, Structure):
            return Literal(t.functor, t.args)
        raise ValueError(f"term is not literal-shaped: {t!r}")


# --- logic and arithmetic expressions -------------------------------------


@dataclass(frozen=True)
class Const:
    value: Num


@dataclass(frozen=True)
class VarRef:
    var: Var


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * /
    left: "ArithExpr"
    right: "ArithExpr"

    def __post_init__(self):
        if self.op not in ("+", "-", "*", "/"):
            raise ValueError(f"bad arithmetic operator: {self.op!r}")


ArithExpr = Union[Const, VarRef, BinOp]

REL_OPS = ("==", "\\==", "<", "<=", ">", ">=", "=")
NUMERIC_REL_OPS = frozenset({"<", "<=", ">", ">="})


@dataclass(frozen=True)
class Lit:
    literal: Literal


@dataclass(frozen=True)
class Not:
    expr: "LogicExpr"


@dataclass(frozen=True)
class And:
    left: "LogicExpr"
    right: "LogicExpr"


@dataclass(frozen=True)
class Or:
    left: "LogicExpr"
    right: "LogicExpr"


@dataclass(frozen=True)
class Rel:
    """Relational test. A side is a plain Term unless it actually contains an
    arithmetic operator (then it is an ArithExpr); the parser maintains this
    so every formula has exactly one representation."""

    op: str
    lhs: Union[Term, ArithExpr]
    rhs: Union[Term, ArithExpr]

    def __post_init__(self):
        if self.op not in REL_OPS:
            raise ValueError(f"bad relational operator: {self.op!r}")


LogicExpr = Union[Lit, Not, And, Or, Rel]


# --- plans -----------------------------------------------------------------


class TriggerKind(Enum):
    BELIEF_ADDED = "+"
    BELIEF_REMOVED = "-"
    GOAL_ADDED = "+!"


@dataclass(frozen=True)
class TriggerEvent:
    kind: TriggerKind
    pattern: Literal


@dataclass(frozen=True)
class AchieveSubgoal:
    goal: Literal


@dataclass(frozen=True)
class AddBelief:
    belief: Literal


@dataclass(frozen=True)
class RemoveBelief:
    belief: Literal


@dataclass(frozen=True)
class InternalAction:
    name: str
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        _check_atom_name(self.name)
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class EnvironmentAction:
    """An action handed to the environment dispatcher at run time. The id may
    be namespaced (`wot:readproperty`) to route to a specific dispatcher."""

    action_id: str
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        if not ACTION_ID_RE.match(self.action_id):
            raise ValueError(f"invalid action id: {self.action_id!r}")
        object.__setattr__(self, "args", tuple(self.args))


BodyStep = Union[AchieveSubgoal, AddBelief, RemoveBelief, InternalAction, EnvironmentAction]


@dataclass(frozen=True)
class Plan:
    trigger: TriggerEvent
    context: Optional[LogicExpr] = None
    body: tuple[BodyStep, ...] = ()
    loc: Optional[SourceLoc] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))


@dataclass(frozen=True)
class Rule:
    head: Literal
    body: LogicExpr
    loc: Optional[SourceLoc] = field(default=None, compare=False)

    def __post_init__(self):
        if self.head.negated:
            raise ValueError("rule heads must not be negated")


# --- whole programs --------------------------------------------------------

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class AgentProgram:
    name: str
    initial_beliefs: tuple[Literal, ...] = ()
    initial_goals: tuple[Literal, ...] = ()
    rules: tuple[Rule, ...] = ()
    plans: tuple[Plan, ...] = ()

    def __post_init__(self):
        if not IDENT_RE.match(self.name):
            raise ValueError(f"invalid agent name: {self.name!r}")
        for tup in ("initial_beliefs", "initial_goals", "rules", "plans"):
            object.__setattr__(self, tup, tuple(getattr(self, tup)))
        problems = check_program(self)
        if problems:
            raise ValueError("; ".join(problems))


def check_program(p: AgentProgram) -> list[str]:
    """All invariant violations of a program, as human-readable strings."""
    problems = []
    for b in p.initial_beliefs:
        if b.negated:
            problems.append(f"initial belief {b.functor} is negated")
        if not is_ground(b):
            problems.append(f"initial belief {b.functor}/{len(b.args)} is not ground")
    for plan in p.plans:
        problems.extend(check_plan_bindings(plan))
    return problems


# Argument positions that *bind* a fresh variable rather than use one:
# (kind, action name) -> index of the output argument; -1 means last.
_BINDING_POSITIONS = {
    ("internal", "json_get"): 2,
    ("internal", "json_build"): -1,
    ("environment", "wot:readproperty"): 2,
}


def step_binding_index(step: BodyStep) -> Optional[int]:
    if isinstance(step, InternalAction):
        idx = _BINDING_POSITIONS.get(("internal", step.name))
    elif isinstance(step, EnvironmentAction):
        idx = _BINDING_POSITIONS.get(("environment", step.action_id))
    else:
        idx = None
    if idx is None:
        return None
    if idx == -1:
        idx = len(step.args) - 1
    return idx if 0 <= idx < len(step.args) else None


def check_plan_bindings(plan: Plan) -> list[str]:
    """Enforce the plan invariant: every variable used in the body is bound by
    the trigger, the context, or an earlier binding step."""
    bound = set(var_names(plan.trigger.pattern))
    if plan.context is not None:
        bound |= set(var_names(plan.context))
    problems = []
    for step in plan.body:
        bind_idx = step_binding_index(step)
        args = _step_args(step)
        for i, arg in enumerate(args):
            used = set(var_names(arg))
            if bind_idx is not None and i == bind_idx:
                continue  # output position: checked below, then bound
            for v in sorted(used - bound):
                problems.append(f"unbound variable {v} in plan body")
        if bind_idx is not None:
            out = args[bind_idx]
            if isinstance(out, Var):
                bound.add(out.name)
            else:
                problems.append("output argument of a binding step must be a variable")
    return problems


def _step_args(step: BodyStep) -> tuple[Term, ...]:
    if isinstance(step, (AchieveSubgoal,)):
        return step.goal.args
    if isinstance(step, (AddBelief, RemoveBelief)):
        return step.belief.args
    return step.args


# --- traversal helpers ------------------------------------------------------

Node = Union[Term, Literal, LogicExpr, ArithExpr, BodyStep, TriggerEvent, Plan]


def subterms(node: Node) -> Iterator[Term]:
    """Depth-first, left-to-right iteration over every Term inside a node."""
    if isinstance(node, (Atom, Str, Num, Var)):
        yield node
    elif isinstance(node, ListTerm):
        yield node
        for it in node.items:
            yield from subterms(it)
    elif isinstance(node, Structure):
        yield node
        for a in node.args:
            yield from subterms(a)
    elif isinstance(node, Literal):
        for a in node.args:
            yield from subterms(a)
    elif isinstance(node, Lit):
        yield from subterms(node.literal)
    elif isinstance(node, Not):
        yield from subterms(node.expr)
    elif isinstance(node, (And, Or)):
        yield from subterms(node.left)
        yield from subterms(node.right)
    elif isinstance(node, Rel):
        yield from subterms(node.lhs)
        yield from subterms(node.rhs)
    elif isinstance(node, Const):
        yield node.value
    elif isinstance(node, VarRef):
        yield node.var
    elif isinstance(node, BinOp):
        yield from subterms(node.left)
        yield from subterms(node.right)
    elif isinstance(node, TriggerEvent):
        yield from subterms(node.pattern)
    elif isinstance(node, (AchieveSubgoal,)):
        yield from subterms(node.goal)
    elif isinstance(node, (AddBelief, RemoveBelief)):
        yield from subterms(node.belief)
    elif isinstance(node, (InternalAction, EnvironmentAction)):
        for a in node.args:
            yield from subterms(a)
    elif isinstance(node, Plan):
        yield from subterms(node.trigger)
        if node.context is not None:
            yield from subterms(node.context)
        for s in node.body:
            yield from subterms(s)
    else:  # pragma: no cover - defensive
        raise TypeError(f"cannot traverse {type(node).__name__}")


def var_names(node: Node) -> list[str]:
    """Variable names in first-occurrence order."""
    seen: dict[str, None] = {}
    for t in subterms(node):
        if isinstance(t, Var):
            seen.setdefault(t.name, None)
    return list(seen)


def is_ground(node: Node) -> bool:
    return not any(isinstance(t, Var) for t in subterms(node))
