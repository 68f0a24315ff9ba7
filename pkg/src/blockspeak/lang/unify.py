"""Substitutions and Robinson unification (occurs check on).

Bindings may chain (X -> Y, Y -> a); `apply` resolves chains fully, so the
result of applying a substitution is always a fixpoint.
"""

from __future__ import annotations

from typing import Iterator, Mapping, Optional, Union

from .ast import (
    AchieveSubgoal,
    AddBelief,
    And,
    Atom,
    BinOp,
    Const,
    EnvironmentAction,
    InternalAction,
    ListTerm,
    Lit,
    Literal,
    Not,
    Num,
    Or,
    Rel,
    RemoveBelief,
    Str,
    Structure,
    Term,
    TriggerEvent,
    Var,
    VarRef,
)


class Substitution(Mapping[str, Term]):
    """Immutable map from variable names to terms."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Optional[Mapping[str, Term]] = None):
        self._bindings: dict[str, Term] = dict(bindings) if bindings else {}

    def __getitem__(self, name: str) -> Term:
        return self._bindings[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __eq__(self, other) -> bool:
        if isinstance(other, Substitution):
            return self._bindings == other._bindings
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._bindings.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{k} -> {v}" for k, v in sorted(self._bindings.items()))
        return "{" + inner + "}"

    def extended(self, name: str, term: Term) -> "Substitution":
        new = dict(self._bindings)
        new[name] = term
        return Substitution(new)

    def merged(self, other: "Substitution") -> "Substitution":
        new = dict(self._bindings)
        new.update(other._bindings)
        return Substitution(new)

    def restricted(self, names) -> "Substitution":
        """Projection onto `names`, with every kept value fully resolved."""
        keep = set(names)
        return Substitution(
            {k: apply(self, Var(k)) for k in self._bindings if k in keep}
        )


EMPTY = Substitution()


def _walk(t: Term, s: Substitution) -> Term:
    while isinstance(t, Var):
        bound = s.get(t.name)
        if bound is None:
            return t
        t = bound
    return t


def apply(s: Substitution, node):
    """Apply a substitution to any AST node, returning the same kind of node."""
    if isinstance(node, Var):
        resolved = _walk(node, s)
        if isinstance(resolved, Var):
            return resolved
        return apply(s, resolved)
    if isinstance(node, (Atom, Str, Num)):
        return node
    if isinstance(node, ListTerm):
        return ListTerm(tuple(apply(s, it) for it in node.items))
    if isinstance(node, Structure):
        return Structure(node.functor, tuple(apply(s, a) for a in node.args))
    if isinstance(node, Literal):
        return Literal(node.functor, tuple(apply(s, a) for a in node.args), node.negated)
    if isinstance(node, Lit):
        return Lit(apply(s, node.literal))
    if isinstance(node, Not):
        return Not(apply(s, node.expr))
    if isinstance(node, And):
        return And(apply(s, node.left), apply(s, node.right))
    if isinstance(node, Or):
        return Or(apply(s, node.left), apply(s, node.right))
    if isinstance(node, Rel):
        return Rel(node.op, apply(s, node.lhs), apply(s, node.rhs))
    if isinstance(node, Const):
        return node
    if isinstance(node, VarRef):
        resolved = apply(s, node.var)
        if isinstance(resolved, Var):
            return VarRef(resolved)
        if isinstance(resolved, Num):
            return Const(resolved)
        # A non-numeric binding inside arithmetic surfaces at evaluation time.
        return VarRef(node.var)
    if isinstance(node, BinOp):
        return BinOp(node.op, apply(s, node.left), apply(s, node.right))
    if isinstance(node, TriggerEvent):
        return TriggerEvent(node.kind, apply(s, node.pattern))
    if isinstance(node, AchieveSubgoal):
        return AchieveSubgoal(apply(s, node.goal))
    if isinstance(node, AddBelief):
        return AddBelief(apply(s, node.belief))
    if isinstance(node, RemoveBelief):
        return RemoveBelief(apply(s, node.belief))
    if isinstance(node, InternalAction):
        return InternalAction(node.name, tuple(apply(s, a) for a in node.args))
    if isinstance(node, EnvironmentAction):
        return EnvironmentAction(node.action_id, tuple(apply(s, a) for a in node.args))
    raise TypeError(f"cannot apply substitution to {type(node).__name__}")


def _occurs(name: str, t: Term, s: Substitution) -> bool:
    t = _walk(t, s)
    if isinstance(t, Var):
        return t.name == name
    if isinstance(t, ListTerm):
        return any(_occurs(name, it, s) for it in t.items)
    if isinstance(t, Structure):
        return any(_occurs(name, a, s) for a in t.args)
    return False


def _bind(v: Var, t: Term, s: Substitution) -> Optional[Substitution]:
    if _occurs(v.name, t, s):
        return None
    return s.extended(v.name, t)


def unify(
    a: Union[Term, Literal],
    b: Union[Term, Literal],
    seed: Optional[Substitution] = None,
) -> Optional[Substitution]:
    """Most general unifier extending `seed`, or None when none exists."""
    s = seed if seed is not None else EMPTY
    if isinstance(a, Literal) or isinstance(b, Literal):
        if not (isinstance(a, Literal) and isinstance(b, Literal)):
            return None
        if a.functor != b.functor or a.negated != b.negated or len(a.args) != len(b.args):
            return None
        return _unify_all(a.args, b.args, s)
    return _unify_terms(a, b, s)


def _unify_all(xs, ys, s: Substitution) -> Optional[Substitution]:
    for x, y in zip(xs, ys):
        result = _unify_terms(x, y, s)
        if result is None:
            return None
        s = result
    return s


def _unify_terms(a: Term, b: Term, s: Substitution) -> Optional[Substitution]:
    a = _walk(a, s)
    b = _walk(b, s)
    if isinstance(a, Var) and isinstance(b, Var) and a.name == b.name:
        return s
    if isinstance(a, Var):
        return _bind(a, b, s)
    if isinstance(b, Var):
        return _bind(b, a, s)
    if isinstance(a, Atom) and isinstance(b, Atom):
        return s if a.name == b.name else None
    if isinstance(a, Str) and isinstance(b, Str):
        return s if a.text == b.text else None
    if isinstance(a, Num) and isinstance(b, Num):
        return s if a.value == b.value else None
    if isinstance(a, ListTerm) and isinstance(b, ListTerm):
        if len(a.items) != len(b.items):
            return None
        return _unify_all(a.items, b.items, s)
    if isinstance(a, Structure) and isinstance(b, Structure):
        if a.functor != b.functor or len(a.args) != len(b.args):
            return None
        return _unify_all(a.args, b.args, s)
    return None
