import random

import pytest

from blockspeak.errors import AslSemanticError, AslSyntaxError
from blockspeak.lang import (
    EMPTY,
    AgentProgram,
    And,
    Atom,
    BinOp,
    Const,
    InternalAction,
    ListTerm,
    Lit,
    Literal,
    Not,
    Num,
    Or,
    Plan,
    Rel,
    Str,
    Structure,
    Substitution,
    TriggerEvent,
    TriggerKind,
    Var,
    VarRef,
    apply,
    parse_agent,
    print_agent,
    print_expr,
    print_literal,
    unify,
)

from generators import gen_program
from oracles import all_ground_unifiers


# --- unification -----------------------------------------------------------


def test_unify_binds_single_variable():
    s = unify(Literal("ping", (Var("X"),)), Literal("ping", (Atom("agent2"),)))
    assert s == Substitution({"X": Atom("agent2")})


def test_unify_ground_identical():
    s = unify(Literal("note", (Num(5),)), Literal("note", (Num(5),)))
    assert s == EMPTY


def test_unify_shared_variable_conflict():
    # brute force over {a, b}: no ground assignment makes f(X, X) equal f(a, b)
    a = Structure("f", (Var("X"), Var("X")))
    b = Structure("f", (Atom("a"), Atom("b")))
    assert all_ground_unifiers(a, b, [Atom("a"), Atom("b")]) == []
    assert unify(a, b) is None


def test_unify_occurs_check():
    assert unify(Var("X"), Structure("f", (Var("X"),))) is None


def test_unify_soundness_and_generality_random():
    rng = random.Random(7)
    constants = [Atom("a"), Atom("b"), Atom("c")]
    var_pool = ["X", "Y", "Z"]

    def small_term(depth):
        roll = rng.random()
        if depth == 0 or roll < 0.35:
            return rng.choice(constants)
        if roll < 0.6:
            return Var(rng.choice(var_pool))
        return Structure(rng.choice("fg"), tuple(
            small_term(depth - 1) for _ in range(rng.randrange(1, 3))))

    for _ in range(300):
        a, b = small_term(2), small_term(2)
        mgu = unify(a, b)
        brute = all_ground_unifiers(a, b, constants)
        if mgu is None:
            assert brute == []
            continue
        # soundness
        assert apply(mgu, a) == apply(mgu, b)
        # most general: every ground unifier factors through the mgu
        for candidate in brute:
            cs = Substitution(candidate)
            for name, value in candidate.items():
                assert apply(cs, apply(mgu, Var(name))) == value


def test_apply_identity_and_unbound():
    lit = Literal("f", (Var("Y"),))
    assert apply(EMPTY, lit) == lit
    assert apply(Substitution({"X": Atom("a")}), lit) == lit
    assert apply(Substitution({"X": Atom("a")}), Literal("ping", (Var("X"),))) == \
        Literal("ping", (Atom("a"),))


def test_apply_resolves_chains():
    s = Substitution({"X": Var("Y"), "Y": Atom("a")})
    assert apply(s, Var("X")) == Atom("a")


def test_apply_is_idempotent_on_result():
    s = Substitution({"X": Structure("f", (Var("Y"),)), "Y": Num(1)})
    t = Structure("g", (Var("X"), Var("Y"), Var("Z")))
    once = apply(s, t)
    assert apply(s, once) == once


# --- parsing ---------------------------------------------------------------


def test_parse_beliefs_and_goals():
    p = parse_agent("note(1000). !start.")
    assert p.initial_beliefs == (Literal("note", (Num(1000),)),)
    assert p.initial_goals == (Literal("start"),)
    assert p.rules == () and p.plans == ()


def test_parse_ping_plan():
    p = parse_agent(
        '+!start : note(W) <- .wait(W); .send(pong_agent, achieve, pong).')
    assert len(p.plans) == 1
    plan = p.plans[0]
    assert plan.trigger == TriggerEvent(TriggerKind.GOAL_ADDED, Literal("start"))
    assert plan.context == Lit(Literal("note", (Var("W"),)))
    assert plan.body == (
        InternalAction("wait", (Var("W"),)),
        InternalAction("send", (Atom("pong_agent"), Atom("achieve"), Atom("pong"))),
    )


def test_parse_syntax_error_position():
    with pytest.raises(AslSyntaxError) as e:
        parse_agent("+!g <- a(.")
    assert e.value.line == 1
    assert e.value.col == 10
    assert e.value.expected


def test_parse_rejects_non_ground_belief():
    with pytest.raises(AslSemanticError):
        parse_agent("note(W).")


def test_parse_rejects_unbound_body_variable():
    with pytest.raises(AslSemanticError) as e:
        parse_agent("+!g <- .wait(W).")
    assert "W" in str(e.value)


def test_parse_binding_steps_introduce_variables():
    p = parse_agent('+!g <- .json_get("{}", "a", V); .print(V).')
    assert p.plans[0].body[1] == InternalAction("print", (Var("V"),))


def test_parse_rejects_failure_trigger():
    with pytest.raises(AslSyntaxError):
        parse_agent("-!g <- .print(1).")


def test_parse_namespaced_environment_action():
    p = parse_agent('+!g <- wot:readproperty("http://h/p", "GET", D).')
    step = p.plans[0].body[0]
    assert step.action_id == "wot:readproperty"
    assert step.args[2] == Var("D")


def test_parse_rule_and_sourceloc():
    p = parse_agent("big(X) :- size(X) & X > 10.\n\nsize(12).")
    assert len(p.rules) == 1
    assert p.rules[0].loc.line == 1
    assert p.initial_beliefs[0].loc.line == 3


def test_parse_comments_and_whitespace():
    p = parse_agent("// a comment\nnote(1). // trailing\n!go.\n")
    assert len(p.initial_beliefs) == 1 and len(p.initial_goals) == 1


def test_parse_operator_precedence():
    p = parse_agent("+!g : a | b & c.")
    assert p.plans[0].context == Or(Lit(Literal("a")),
                                    And(Lit(Literal("b")), Lit(Literal("c"))))


def test_parse_arithmetic_in_context():
    p = parse_agent("+!g : note(W) & W > 2 + 3 * 4.")
    rel = p.plans[0].context.right
    assert rel == Rel(">", Var("W"),
                      BinOp("+", Const(Num(2)),
                            BinOp("*", Const(Num(3)), Const(Num(4)))))


def test_parse_parenthesised_logic_vs_arith():
    p = parse_agent("+!g : (a & b) | c.")
    assert isinstance(p.plans[0].context, Or)
    p = parse_agent("+!g : note(W) & (W + 1) * 2 > 4.")
    rel = p.plans[0].context.right
    assert rel.op == ">"
    assert rel.lhs == BinOp("*", BinOp("+", VarRef(Var("W")), Const(Num(1))),
                            Const(Num(2)))


def test_parse_string_escapes():
    p = parse_agent(r'msg("a \"quoted\" \\ backslash").')
    assert p.initial_beliefs[0].args[0] == Str('a "quoted" \\ backslash')


def test_parse_reserved_not():
    with pytest.raises(AslSyntaxError):
        parse_agent("not(1).")


# --- printing --------------------------------------------------------------


def test_print_single_belief():
    p = AgentProgram("a", initial_beliefs=(Literal("note", (Num(1000),)),))
    assert print_agent(p) == "note(1000).\n"


def test_print_empty_program():
    assert print_agent(AgentProgram("a")) == ""


def test_print_plan_without_context():
    plan = Plan(TriggerEvent(TriggerKind.GOAL_ADDED, Literal("start")),
                None, (InternalAction("print", (Str("hi"),)),))
    p = AgentProgram("a", plans=(plan,))
    text = print_agent(p)
    assert text == '+!start <- .print("hi").\n'
    assert ": true" not in text
    assert parse_agent(text, name="a") == p


def test_print_numbers():
    assert print_literal(Literal("n", (Num(5.0),))) == "n(5)"
    assert print_literal(Literal("n", (Num(2.5),))) == "n(2.5)"
    assert print_literal(Literal("n", (Num(-3),))) == "n(-3)"


def test_print_list_and_structure():
    t = Literal("p", (ListTerm((Atom("a"), Num(1))), Structure("f", (Var("X"),))))
    assert print_literal(t) == "p([a, 1], f(X))"


def test_print_preserves_logic_shape():
    left_nested = And(And(Lit(Literal("a")), Lit(Literal("b"))), Lit(Literal("c")))
    right_nested = And(Lit(Literal("a")), And(Lit(Literal("b")), Lit(Literal("c"))))
    assert print_expr(left_nested) == "(a & b) & c"
    assert print_expr(right_nested) == "a & b & c"
    assert print_expr(Not(And(Lit(Literal("a")), Lit(Literal("b"))))) == "not (a & b)"


def test_printer_is_deterministic():
    rng = random.Random(3)
    p = gen_program(rng)
    assert print_agent(p) == print_agent(p)


def test_parser_total_over_junk_input():
    # any input either parses or raises a positioned source error
    from blockspeak.errors import SourceError

    rng = random.Random(13)
    alphabet = 'ab XY()[]{}.,;:!+-*/<>=&|"\\\n\tnot0157_éλe9'
    for _ in range(600):
        junk = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 40)))
        try:
            parse_agent(junk)
        except SourceError as e:
            assert e.line >= 1 and e.col >= 1
        # anything else propagating would fail the test
    for nasty in ("p(1e999).", "p(λ).", "p(٣).", "+!g <- .wait(1e999)."):
        with pytest.raises(SourceError):
            parse_agent(nasty)


# --- round trip -------------------------------------------------------------


def test_roundtrip_seeded_sample():
    rng = random.Random(42)
    for _ in range(200):
        p = gen_program(rng)
        text = print_agent(p)
        again = parse_agent(text, name=p.name)
        assert again == p, text
        assert print_agent(again) == text


def test_roundtrip_handcrafted_corner_cases():
    sources = [
        "",
        "note(1000).\n",
        "!start.\n",
        'msg("").\n',
        "p([]).\n",
        "p([[], [a], 1]).\n",
        "big(X) :- size(X) & not small(X).\n",
        "+!g : (a | b) & not c <- !sub; +done; -pending.\n",
        "+b(X) : X \\== nothing <- .print(X).\n",
        "-gone(X) <- .print(X).\n",
        "+!calc : note(W) & W * 2 - 1 > 0 & 4 / 2 == 2 <- .wait(W).\n",
        "+!g <- act.\n",
        "+!g <- wot:invokeaction(\"http://h/a\", \"POST\").\n",
        "+!g : 2 - (3 - 1) == 0 <- .print(ok).\n",
    ]
    for src in sources:
        p = parse_agent(src)
        assert print_agent(p) == src
