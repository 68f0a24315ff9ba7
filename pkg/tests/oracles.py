"""Brute-force reference implementations used to check the engine.

Everything here is deliberately naive and independent of the production code
paths it validates: substitution and matching are reimplemented locally on
plain dicts, entailment is ground enumeration over the constant universe.
Only the shared AST value types are reused.
"""

from __future__ import annotations

import itertools

from blockspeak.lang import (
    And,
    Lit,
    Literal,
    ListTerm,
    Not,
    Rel,
    Structure,
    Term,
    Var,
)


def ground_subst(binding: dict, t):
    """Local substitution: replace every Var by its (ground) binding."""
    if isinstance(t, Var):
        return binding.get(t.name, t)
    if isinstance(t, ListTerm):
        return ListTerm(tuple(ground_subst(binding, x) for x in t.items))
    if isinstance(t, Structure):
        return Structure(t.functor, tuple(ground_subst(binding, a) for a in t.args))
    if isinstance(t, Literal):
        return Literal(t.functor, tuple(ground_subst(binding, a) for a in t.args), t.negated)
    return t


def term_vars(t) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, ListTerm):
        return set().union(*[term_vars(x) for x in t.items]) if t.items else set()
    if isinstance(t, (Structure, Literal)):
        return set().union(*[term_vars(a) for a in t.args]) if t.args else set()
    return set()


def all_ground_unifiers(a, b, constants: list[Term]) -> list[dict]:
    """Every total map vars(a, b) -> constants making a and b identical."""
    names = sorted(term_vars(a) | term_vars(b))
    unifiers = []
    for values in itertools.product(constants, repeat=len(names)):
        binding = dict(zip(names, values))
        if ground_subst(binding, a) == ground_subst(binding, b):
            unifiers.append(binding)
    return unifiers


def ground_match(pattern, ground) -> dict | None:
    """One-way structural match of a pattern against a ground term/literal."""

    def walk(p, g, binding):
        if isinstance(p, Var):
            if p.name in binding:
                return binding if binding[p.name] == g else None
            out = dict(binding)
            out[p.name] = g
            return out
        if isinstance(p, Literal) and isinstance(g, Literal):
            if p.functor != g.functor or len(p.args) != len(g.args) or p.negated != g.negated:
                return None
            for pa, ga in zip(p.args, g.args):
                binding = walk(pa, ga, binding)
                if binding is None:
                    return None
            return binding
        if isinstance(p, Structure) and isinstance(g, Structure):
            if p.functor != g.functor or len(p.args) != len(g.args):
                return None
            for pa, ga in zip(p.args, g.args):
                binding = walk(pa, ga, binding)
                if binding is None:
                    return None
            return binding
        if isinstance(p, ListTerm) and isinstance(g, ListTerm):
            if len(p.items) != len(g.items):
                return None
            for pa, ga in zip(p.items, g.items):
                binding = walk(pa, ga, binding)
                if binding is None:
                    return None
            return binding
        return binding if p == g else None

    return walk(pattern, ground, {})


# --- Datalog entailment by bottom-up grounding ------------------------------


def conjuncts(expr) -> list:
    if isinstance(expr, And):
        return conjuncts(expr.left) + conjuncts(expr.right)
    return [expr]


def datalog_model(facts, rules, constants: list[Term]) -> set[Literal]:
    """Least model of positive, non-recursive rules over ground facts,
    computed by exhaustive grounding to a fixpoint."""
    model = set(facts)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            body = conjuncts(rule.body)
            names = sorted(term_vars(rule.head) |
                           set().union(*[term_vars(c.literal) for c in body]))
            for values in itertools.product(constants, repeat=len(names)):
                binding = dict(zip(names, values))
                if all(ground_subst(binding, c.literal) in model for c in body):
                    head = ground_subst(binding, rule.head)
                    if head not in model:
                        model.add(head)
                        changed = True
    return model


def enumerate_query_solutions(query, model, constants: list[Term]) -> set[frozenset]:
    """All assignments of the query's variables to constants under which the
    grounded query holds in the model. Conjunctions of positive literals and
    ground-by-then negated literals are supported."""
    parts = conjuncts(query)
    names = sorted(set().union(*[term_vars(p.literal) for p in _normalise(parts)]))
    solutions = set()
    for values in itertools.product(constants, repeat=len(names)):
        binding = dict(zip(names, values))
        if all(_holds(p, binding, model) for p in parts):
            solutions.add(frozenset(binding.items()))
    return solutions


def _normalise(parts):
    out = []
    for p in parts:
        if isinstance(p, Not):
            out.append(Lit(p.expr.literal))
        else:
            out.append(p)
    return out


def _holds(part, binding, model) -> bool:
    if isinstance(part, Not):
        return ground_subst(binding, part.expr.literal) not in model
    if isinstance(part, Lit):
        return ground_subst(binding, part.literal) in model
    raise TypeError(f"oracle cannot evaluate {type(part).__name__}")


# --- plan applicability ------------------------------------------------------


def applicable_plans(plans, event_kind, event_content, facts) -> list[tuple[int, dict]]:
    """The full (plan index, bindings) applicability list, in the order the
    contract pins down: plan-library order, then context solutions found by
    nested fact iteration in insertion order, left to right.

    Contexts must be conjunctions of positive literals, optionally followed by
    numeric comparisons on bound variables (the shapes the oracle generator
    emits)."""
    out = []
    for idx, plan in enumerate(plans):
        if plan.trigger.kind != event_kind:
            continue
        theta = ground_match(plan.trigger.pattern, event_content)
        if theta is None:
            continue
        if plan.context is None:
            out.append((idx, theta))
            continue
        for sol in _context_solutions(conjuncts(plan.context), theta, facts):
            out.append((idx, sol))
    return out


def _context_solutions(parts, binding, facts):
    if not parts:
        yield binding
        return
    head, rest = parts[0], parts[1:]
    if isinstance(head, Lit):
        goal = ground_subst(binding, head.literal)
        for fact in facts:
            m = ground_match(goal, fact)
            if m is not None:
                merged = dict(binding)
                merged.update(m)
                yield from _context_solutions(rest, merged, facts)
    elif isinstance(head, Rel):
        lhs = ground_subst(binding, head.lhs)
        rhs = ground_subst(binding, head.rhs)
        if _rel_holds(head.op, lhs, rhs):
            yield from _context_solutions(rest, binding, facts)
    else:
        raise TypeError(f"oracle cannot evaluate context part {type(head).__name__}")


def _rel_holds(op, lhs, rhs) -> bool:
    if op == "==":
        return lhs == rhs
    if op == "\\==":
        return lhs != rhs
    a, b = lhs.value, rhs.value
    return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]
