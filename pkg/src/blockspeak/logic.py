"""Logical-consequence engine: backtracking resolution of plan contexts
against a belief base plus deductive rules.

Solutions are enumerated depth-first in a fixed order (fact insertion order,
then rule order, left-to-right through conjunctions), so repeated queries are
byte-for-byte reproducible. Negation is negation-as-failure and requires the
negated subgoal to be ground at evaluation time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import ArithEvalError, DepthLimitError, FlounderError, QueryError
from .lang.ast import (
    And,
    ArithExpr,
    BinOp,
    Const,
    Lit,
    Literal,
    LogicExpr,
    Not,
    Num,
    NUMERIC_REL_OPS,
    Or,
    Rel,
    Rule,
    Term,
    Var,
    VarRef,
    is_ground,
    var_names,
)
from .lang.printer import print_literal
from .lang.unify import EMPTY, Substitution, apply, unify

DEFAULT_DEPTH_CAP = 512


class BeliefBase:
    """Immutable snapshot of ground facts (insertion-ordered, set semantics)
    plus deductive rules. Mutation returns a new snapshot, so concurrent
    queries over a snapshot are always safe."""

    __slots__ = ("facts", "rules", "_index")

    def __init__(self, facts=(), rules=()):
        ordered: dict[Literal, None] = {}
        for f in facts:
            if f.negated:
                raise ValueError(f"belief base facts cannot be negated: {print_literal(f)}")
            if not is_ground(f):
                raise ValueError(f"belief base facts must be ground: {print_literal(f)}")
            ordered.setdefault(f, None)
        self.facts: tuple[Literal, ...] = tuple(ordered)
        self.rules: tuple[Rule, ...] = tuple(rules)
        self._index = frozenset(self.facts)

    def __contains__(self, fact: Literal) -> bool:
        return fact in self._index

    def __len__(self) -> int:
        return len(self.facts)

    def with_added(self, fact: Literal) -> "BeliefBase":
        if fact in self._index:
            return self
        bb = BeliefBase.__new__(BeliefBase)
        bb.facts = self.facts + (fact,)
        bb.rules = self.rules
        bb._index = self._index | {fact}
        return bb

    def with_removed(self, fact: Literal) -> "BeliefBase":
        if fact not in self._index:
            return self
        bb = BeliefBase.__new__(BeliefBase)
        bb.facts = tuple(f for f in self.facts if f != fact)
        bb.rules = self.rules
        bb._index = self._index - {fact}
        return bb


@dataclass(frozen=True)
class QuerySolution:
    substitution: Substitution


def solve(
    query: LogicExpr,
    bb: BeliefBase,
    depth_cap: int = DEFAULT_DEPTH_CAP,
) -> Iterator[QuerySolution]:
    """Enumerate the substitutions under which `query` follows from `bb`.

    Lazily yields one QuerySolution per distinct binding of the query's free
    variables. Raises QueryError subclasses for floundering negation,
    arithmetic faults and depth-cap overruns.
    """
    free = var_names(query)
    fresh = itertools.count()
    seen: set[Substitution] = set()
    for s in _solve(query, EMPTY, bb, 0, depth_cap, fresh):
        projected = s.restricted(free)
        if projected not in seen:
            seen.add(projected)
            yield QuerySolution(projected)


def _solve(expr, s, bb, depth, cap, fresh) -> Iterator[Substitution]:
    if isinstance(expr, Lit):
        if expr.literal.negated:
            yield from _solve_not(Lit(Literal(expr.literal.functor, expr.literal.args)),
                                  s, bb, depth, cap, fresh)
            return
        goal = expr.literal
        for fact in bb.facts:
            u = unify(goal, fact, s)
            if u is not None:
                yield u
        for rule in bb.rules:
            if depth + 1 > cap:
                raise DepthLimitError(
                    f"query exceeded rule-resolution depth cap ({cap})")
            head, body = _rename_rule(rule, fresh)
            u = unify(goal, head, s)
            if u is not None:
                yield from _solve(body, u, bb, depth + 1, cap, fresh)
    elif isinstance(expr, And):
        for s1 in _solve(expr.left, s, bb, depth, cap, fresh):
            yield from _solve(expr.right, s1, bb, depth, cap, fresh)
    elif isinstance(expr, Or):
        yield from _solve(expr.left, s, bb, depth, cap, fresh)
        yield from _solve(expr.right, s, bb, depth, cap, fresh)
    elif isinstance(expr, Not):
        yield from _solve_not(expr.expr, s, bb, depth, cap, fresh)
    elif isinstance(expr, Rel):
        result = _solve_rel(expr, s, bb)
        if result is not None:
            yield result
    else:
        raise QueryError(f"cannot solve {type(expr).__name__}")


def _solve_not(inner, s, bb, depth, cap, fresh) -> Iterator[Substitution]:
    grounded = apply(s, inner)
    if not is_ground(grounded):
        raise FlounderError(
            "negation applied to non-ground subgoal "
            f"(unbound: {', '.join(var_names(grounded))})")
    for _ in _solve(grounded, s, bb, depth, cap, fresh):
        return
    yield s


def _solve_rel(rel: Rel, s: Substitution, bb: BeliefBase) -> Optional[Substitution]:
    lhs = _eval_side(rel.lhs, s)
    rhs = _eval_side(rel.rhs, s)
    if rel.op == "=":
        return unify(lhs, rhs, s)
    if rel.op in NUMERIC_REL_OPS:
        a, b = _require_num(lhs, rel.op), _require_num(rhs, rel.op)
        ok = {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[rel.op]
        return s if ok else None
    equal = lhs == rhs
    if rel.op == "==":
        return s if equal else None
    return None if equal else s  # \==


def _eval_side(side, s: Substitution) -> Term:
    if isinstance(side, (Const, VarRef, BinOp)):
        return eval_arith(side, s)
    return apply(s, side)


def _require_num(t: Term, op: str) -> float:
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Var):
        raise ArithEvalError(f"unbound variable {t.name} in {op!r} comparison")
    raise ArithEvalError(f"{op!r} comparison requires numbers")


def _rename_rule(rule: Rule, fresh) -> tuple[Literal, LogicExpr]:
    names = set(var_names(rule.head)) | set(var_names(rule.body))
    if not names:
        return rule.head, rule.body
    n = next(fresh)
    renaming = Substitution({name: Var(f"_R{n}_{name}") for name in sorted(names)})
    return apply(renaming, rule.head), apply(renaming, rule.body)


def eval_arith(e: ArithExpr, s: Substitution) -> Num:
    """Evaluate an arithmetic expression under a substitution.

    Standard precedence and associativity are fixed by the tree shape; this
    only folds it. Unbound or non-numeric variables and division by zero
    raise ArithEvalError.
    """
    return Num(_eval(e, s))


def _eval(e: ArithExpr, s: Substitution) -> float:
    if isinstance(e, Const):
        return e.value.value
    if isinstance(e, VarRef):
        resolved = apply(s, e.var)
        if isinstance(resolved, Num):
            return resolved.value
        if isinstance(resolved, Var):
            raise ArithEvalError(f"unbound variable {resolved.name} in arithmetic")
        raise ArithEvalError(
            f"variable {e.var.name} is bound to a non-numeric term")
    if isinstance(e, BinOp):
        a, b = _eval(e.left, s), _eval(e.right, s)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0.0:
            raise ArithEvalError("division by zero")
        return a / b
    raise QueryError(f"cannot evaluate {type(e).__name__}")
