"""Canonical, deterministic text rendering of agent programs.

Equal ASTs produce byte-identical text and the output re-parses to an equal
AST. Parentheses are emitted exactly where needed to preserve tree shape
(`&`/`|` associate right, arithmetic associates left), so no information is
lost on the round trip.
"""

from __future__ import annotations

from .ast import (
    AchieveSubgoal,
    AddBelief,
    AgentProgram,
    And,
    ArithExpr,
    Atom,
    BinOp,
    BodyStep,
    Const,
    EnvironmentAction,
    InternalAction,
    ListTerm,
    Lit,
    Literal,
    LogicExpr,
    Not,
    Num,
    Or,
    Plan,
    Rel,
    RemoveBelief,
    Rule,
    Str,
    Structure,
    Term,
    TriggerEvent,
    TriggerKind,
    Var,
    VarRef,
)

_TRIGGER_PREFIX = {
    TriggerKind.BELIEF_ADDED: "+",
    TriggerKind.BELIEF_REMOVED: "-",
    TriggerKind.GOAL_ADDED: "+!",
}


def print_num(value: float) -> str:
    if value.is_integer():
        return str(int(value))
    return repr(value)


def print_term(t: Term) -> str:
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, Str):
        escaped = t.text.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(t, Num):
        return print_num(t.value)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, ListTerm):
        return "[" + ", ".join(print_term(it) for it in t.items) + "]"
    if isinstance(t, Structure):
        return t.functor + "(" + ", ".join(print_term(a) for a in t.args) + ")"
    raise TypeError(f"not a term: {t!r}")


def print_literal(l: Literal) -> str:
    base = l.functor
    if l.args:
        base += "(" + ", ".join(print_term(a) for a in l.args) + ")"
    return ("not " + base) if l.negated else base


# connective binding strength; parenthesise when a child binds looser than
# its position requires
_LOGIC_LEVEL = {Or: 1, And: 2, Not: 3, Lit: 4, Rel: 4}
_ARITH_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _arith(e: ArithExpr, min_prec: int = 0) -> str:
    if isinstance(e, Const):
        return print_num(e.value.value)
    if isinstance(e, VarRef):
        return e.var.name
    prec = _ARITH_PREC[e.op]
    text = f"{_arith(e.left, prec)} {e.op} {_arith(e.right, prec + 1)}"
    return f"({text})" if prec < min_prec else text


def _rel_side(side) -> str:
    if isinstance(side, (Const, VarRef, BinOp)):
        return _arith(side)
    return print_term(side)


def print_expr(e: LogicExpr, min_level: int = 0) -> str:
    if isinstance(e, Lit):
        text = print_literal(e.literal)
    elif isinstance(e, Rel):
        text = f"{_rel_side(e.lhs)} {e.op} {_rel_side(e.rhs)}"
    elif isinstance(e, Not):
        text = "not " + print_expr(e.expr, 3)
    elif isinstance(e, And):
        text = f"{print_expr(e.left, 3)} & {print_expr(e.right, 2)}"
    elif isinstance(e, Or):
        text = f"{print_expr(e.left, 2)} | {print_expr(e.right, 1)}"
    else:
        raise TypeError(f"not a logic expression: {e!r}")
    if _LOGIC_LEVEL[type(e)] < min_level:
        return f"({text})"
    return text


def print_step(step: BodyStep) -> str:
    if isinstance(step, AchieveSubgoal):
        return "!" + print_literal(step.goal)
    if isinstance(step, AddBelief):
        return "+" + print_literal(step.belief)
    if isinstance(step, RemoveBelief):
        return "-" + print_literal(step.belief)
    if isinstance(step, InternalAction):
        args = "(" + ", ".join(print_term(a) for a in step.args) + ")" if step.args else ""
        return "." + step.name + args
    if isinstance(step, EnvironmentAction):
        args = "(" + ", ".join(print_term(a) for a in step.args) + ")" if step.args else ""
        return step.action_id + args
    raise TypeError(f"not a body step: {step!r}")


def print_trigger(t: TriggerEvent) -> str:
    return _TRIGGER_PREFIX[t.kind] + print_literal(t.pattern)


def print_plan(p: Plan) -> str:
    parts = [print_trigger(p.trigger)]
    if p.context is not None:
        parts.append(" : " + print_expr(p.context))
    if p.body:
        parts.append(" <- " + "; ".join(print_step(s) for s in p.body))
    parts.append(".")
    return "".join(parts)


def print_rule(r: Rule) -> str:
    return f"{print_literal(r.head)} :- {print_expr(r.body)}."


def print_agent(p: AgentProgram) -> str:
    """Render a whole program; a pure function of the AST."""
    lines = []
    for b in p.initial_beliefs:
        lines.append(print_literal(b) + ".")
    for g in p.initial_goals:
        lines.append("!" + print_literal(g) + ".")
    for r in p.rules:
        lines.append(print_rule(r))
    for plan in p.plans:
        lines.append(print_plan(plan))
    return "".join(line + "\n" for line in lines)
