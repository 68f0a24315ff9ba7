"""Agent language: AST, unification, parser and printer."""

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
    SourceLoc,
    Str,
    Structure,
    Term,
    TriggerEvent,
    TriggerKind,
    Var,
    VarRef,
    check_plan_bindings,
    check_program,
    is_ground,
    step_binding_index,
    subterms,
    var_names,
)
from .parser import parse_agent
from .printer import (
    print_agent,
    print_expr,
    print_literal,
    print_plan,
    print_step,
    print_term,
    print_trigger,
)
from .unify import EMPTY, Substitution, apply, unify

__all__ = [
    "AchieveSubgoal", "AddBelief", "AgentProgram", "And", "ArithExpr", "Atom",
    "BinOp", "BodyStep", "Const", "EnvironmentAction", "InternalAction",
    "ListTerm", "Lit", "Literal", "LogicExpr", "Not", "Num", "Or", "Plan",
    "Rel", "RemoveBelief", "Rule", "SourceLoc", "Str", "Structure", "Term",
    "TriggerEvent", "TriggerKind", "Var", "VarRef",
    "check_plan_bindings", "check_program", "is_ground", "step_binding_index",
    "subterms", "var_names",
    "parse_agent",
    "print_agent", "print_expr", "print_literal", "print_plan", "print_step",
    "print_term", "print_trigger",
    "EMPTY", "Substitution", "apply", "unify",
]
