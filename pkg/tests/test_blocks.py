import json
import random
from pathlib import Path

import pytest

from blockspeak.blocks import (
    Block,
    BlockCompileError,
    BlockDocumentError,
    BlockProgram,
    base_catalog,
    blocks_from_td,
    compile_blocks,
    document_to_json,
    parse_blocks_document,
    validate,
)
from blockspeak.lang import (
    And,
    Atom,
    EnvironmentAction,
    InternalAction,
    ListTerm,
    Lit,
    Literal,
    Num,
    Rel,
    Str,
    Structure,
    Var,
    parse_agent,
    print_agent,
)
from blockspeak.wot import parse_td

FIXTURES = Path(__file__).parent / "fixtures"
CATALOG = base_catalog()

_counter = iter(range(10 ** 6))


def blk(type_, fields=None, inputs=None, next_=None, mutation=None):
    return Block(id=f"b{next(_counter)}", type=type_, fields=fields or {},
                 inputs=inputs or {}, next=next_, mutation=mutation or {})


def atom(name):
    return blk("value_atom", fields={"NAME": name})


def num(value):
    return blk("value_number", fields={"NUM": value})


def var(name):
    return blk("value_variable", fields={"NAME": name})


def literal(functor, *args):
    return blk("literal", fields={"FUNCTOR": functor},
               mutation={"args": str(len(args))},
               inputs={f"ARG{i}": a for i, a in enumerate(args)})


def program(*tops, name="agent"):
    return BlockProgram(agent_name=name, top_blocks=list(tops))


def load_fixture(name):
    return parse_blocks_document((FIXTURES / name).read_text())


# --- documents ---------------------------------------------------------------


def test_document_requires_format_version():
    with pytest.raises(BlockDocumentError):
        parse_blocks_document('{"agentName": "a", "topBlocks": []}')
    with pytest.raises(BlockDocumentError):
        parse_blocks_document('{"formatVersion": 2, "agentName": "a", "topBlocks": []}')


def test_document_roundtrip_preserves_meta():
    bp = load_fixture("ping.blocks.json")
    again = parse_blocks_document(document_to_json(bp))
    assert document_to_json(again) == document_to_json(bp)
    assert bp.top_blocks[0].meta == {"x": 20, "y": 20}


def test_document_rejects_non_scalar_field():
    with pytest.raises(BlockDocumentError):
        parse_blocks_document(json.dumps({
            "formatVersion": 1, "agentName": "a",
            "topBlocks": [{"id": "x", "type": "value_atom", "fields": {"NAME": [1]}}],
        }))


# --- validation ---------------------------------------------------------------


def test_wellformed_ping_validates_clean():
    assert validate(load_fixture("ping.blocks.json"), CATALOG) == []


def test_number_in_statement_slot_is_type_mismatch():
    plan = blk("plan", fields={"TRIGGER_KIND": "wants"},
               inputs={"TRIGGER": atom("go"), "BODY": num(5)})
    diags = validate(program(plan), CATALOG)
    codes = {d.code for d in diags}
    assert "TypeMismatch" in codes
    bad = [d for d in diags if d.code == "TypeMismatch"][0]
    assert bad.block_id == plan.inputs["BODY"].id


def test_unbound_variable_diagnostic():
    plan = blk("plan", fields={"TRIGGER_KIND": "wants"},
               inputs={"TRIGGER": atom("go"),
                       "BODY": blk("act_wait", inputs={"TIME": var("W")})})
    diags = validate(program(plan), CATALOG)
    assert any(d.code == "UnboundVariable" and "W" in d.message for d in diags)


def test_unknown_block_type():
    diags = validate(program(blk("no_such_block")), CATALOG)
    assert any(d.code == "UnknownBlockType" for d in diags)


def test_duplicate_ids_detected():
    a = blk("init_goal", inputs={"GOAL": atom("g")})
    b = blk("init_goal", inputs={"GOAL": atom("h")})
    b.id = a.id
    diags = validate(program(a, b), CATALOG)
    assert any(d.code == "DuplicateId" for d in diags)


def test_missing_required_input():
    diags = validate(program(blk("init_goal")), CATALOG)
    assert any(d.code == "MissingInput" for d in diags)


def test_non_ground_initial_belief():
    top = blk("init_belief", inputs={"BELIEF": literal("note", var("W"))})
    diags = validate(program(top), CATALOG)
    assert any(d.code == "NonGroundBelief" for d in diags)


def test_value_block_at_top_level():
    diags = validate(program(num(1)), CATALOG)
    assert any(d.code == "BadTopLevel" for d in diags)


def test_not_a_literal_in_context():
    plan = blk("plan", fields={"TRIGGER_KIND": "wants"},
               inputs={"TRIGGER": atom("go"), "CONTEXT": num(3)})
    diags = validate(program(plan), CATALOG)
    assert any(d.code == "NotALiteral" for d in diags)


def test_undeclared_mutation_rejected():
    bad = blk("init_goal", inputs={"GOAL": atom("g")}, mutation={"href": "x"})
    diags = validate(program(bad), CATALOG)
    assert any(d.code == "BadMutation" for d in diags)


def test_list_cons_requires_list_tail():
    cons = blk("value_list_cons", inputs={"HEAD": num(1), "TAIL": num(2)})
    top = blk("init_belief", inputs={"BELIEF": literal("p", cons)})
    diags = validate(program(top), CATALOG)
    assert any(d.code == "BadListTail" for d in diags)


# --- compilation ---------------------------------------------------------------


def test_compile_single_goal():
    prog = compile_blocks(program(blk("init_goal", inputs={"GOAL": atom("start")})),
                          CATALOG)
    assert prog.initial_goals == (Literal("start"),)
    assert prog.initial_beliefs == () and prog.plans == ()


def test_compile_refuses_on_diagnostics():
    with pytest.raises(BlockCompileError) as e:
        compile_blocks(program(blk("init_goal")), CATALOG)
    assert e.value.diagnostics


def test_compile_ping_fixture_matches_reconstruction():
    prog = compile_blocks(load_fixture("ping.blocks.json"), CATALOG)
    golden = (FIXTURES / "ping.golden.asl").read_text()
    assert print_agent(prog) == golden
    assert parse_agent(golden, name="ping") == prog


def test_compile_lists_and_booleans():
    lst = blk("value_list_cons", inputs={
        "HEAD": blk("value_boolean", fields={"BOOL": "true"}),
        "TAIL": blk("value_list_cons", inputs={
            "HEAD": num(2), "TAIL": blk("value_empty_list")})})
    prog = compile_blocks(program(
        blk("init_belief", inputs={"BELIEF": literal("flags", lst)})), CATALOG)
    assert prog.initial_beliefs[0] == \
        Literal("flags", (ListTerm((Atom("true"), Num(2))),))


def test_compile_rule_and_operations():
    body = blk("op_and", inputs={
        "LEFT": literal("size", var("X")),
        "RIGHT": blk("op_compare", fields={"OP": ">"},
                     inputs={"LEFT": var("X"), "RIGHT": num(10)})})
    top = blk("init_rule", inputs={"HEAD": literal("big", var("X")), "BODY": body})
    prog = compile_blocks(program(top), CATALOG)
    assert prog.rules[0].head == Literal("big", (Var("X"),))
    assert prog.rules[0].body == And(Lit(Literal("size", (Var("X"),))),
                                     Rel(">", Var("X"), Num(10)))


def test_compile_arith_becomes_canonical_rel_side():
    cmp_block = blk("op_compare", fields={"OP": "=="}, inputs={
        "LEFT": blk("op_arith", fields={"OP": "+"},
                    inputs={"LEFT": num(1), "RIGHT": num(1)}),
        "RIGHT": num(2)})
    plan = blk("plan", fields={"TRIGGER_KIND": "wants"},
               inputs={"TRIGGER": atom("go"), "CONTEXT": cmp_block})
    prog = compile_blocks(program(plan), CATALOG)
    rel = prog.plans[0].context
    assert rel.op == "=="
    assert rel.rhs == Num(2)
    # generated text is always valid source (compile/parse agreement)
    assert parse_agent(print_agent(prog), name="agent") == prog


def test_compile_send_blocks():
    tell = blk("comm_tell", inputs={"RECEIVER": atom("peer"),
                                    "BELIEF": literal("note", num(1))})
    plan = blk("plan", fields={"TRIGGER_KIND": "wants"},
               inputs={"TRIGGER": atom("go"), "BODY": tell})
    prog = compile_blocks(program(plan), CATALOG)
    assert prog.plans[0].body[0] == InternalAction(
        "send", (Atom("peer"), Atom("tell"), Structure("note", (Num(1),))))


def test_compile_trigger_kinds():
    for kind_name, prefix in [("believes", "+"), ("stops_believing", "-"),
                              ("wants", "+!")]:
        plan = blk("plan", fields={"TRIGGER_KIND": kind_name},
                   inputs={"TRIGGER": atom("x")})
        prog = compile_blocks(program(plan), CATALOG)
        assert print_agent(prog).startswith(prefix + "x")


def test_compile_deterministic():
    raw = (FIXTURES / "ping.blocks.json").read_text()
    p1 = compile_blocks(parse_blocks_document(raw), CATALOG)
    p2 = compile_blocks(parse_blocks_document(raw), CATALOG)
    assert p1 == p2
    assert print_agent(p1) == print_agent(p2)


# --- TD-driven blocks ----------------------------------------------------------


def lamp_td():
    doc = {
        "id": "urn:example:lamp-1",
        "title": "lamp",
        "base": "http://lamp.local",
        "properties": {
            "on": {"type": "boolean", "forms": [{"href": "/properties/on"}]},
        },
        "actions": {
            "toggle": {"forms": [{"href": "/actions/toggle"}]},
        },
    }
    td, warnings = parse_td(json.dumps(doc))
    assert warnings == []
    return td


def test_blocks_from_lamp_td():
    category, warnings = blocks_from_td(lamp_td())
    assert warnings == []
    assert category.name == "lamp"
    assert [b.role for b in category.blocks] == \
        ["affordance_read", "affordance_write", "affordance_invoke"]
    read = category.blocks[0]
    assert read.mutation_defaults == {
        "href": "http://lamp.local/properties/on",
        "httpMethod": "GET",
        "affordanceKind": "readproperty",
        "thingId": "urn:example:lamp-1",
    }
    write = category.blocks[1]
    assert write.mutation_defaults["httpMethod"] == "PUT"
    invoke = category.blocks[2]
    assert invoke.mutation_defaults["httpMethod"] == "POST"


def test_blocks_from_td_counts():
    doc = {
        "id": "urn:example:multi",
        "title": "multi",
        "base": "http://m.local",
        "properties": {
            "a": {"forms": [{"href": "/p/a"}]},
            "b": {"forms": [{"href": "/p/b"}]},
            "c": {"readOnly": True, "forms": [{"href": "/p/c"}]},
        },
        "actions": {
            "x": {"forms": [{"href": "/a/x"}]},
            "y": {"forms": [{"href": "/a/y"}]},
        },
    }
    td, _ = parse_td(json.dumps(doc))
    category, warnings = blocks_from_td(td)
    assert len(category.blocks) == 7  # 3 reads + 2 writes + 2 invokes
    assert warnings == []


def test_blocks_from_td_count_formula_random():
    # blocks = #properties + #writable properties + #actions whenever every
    # affordance carries a usable form
    rng = random.Random(5)
    for round_no in range(30):
        properties = {}
        writable = 0
        for i in range(rng.randrange(0, 5)):
            read_only = rng.random() < 0.4
            writable += 0 if read_only else 1
            properties[f"p{i}"] = {"readOnly": read_only,
                                   "forms": [{"href": f"http://t{round_no}.local/p{i}"}]}
        actions = {f"a{i}": {"forms": [{"href": f"http://t{round_no}.local/a{i}"}]}
                   for i in range(rng.randrange(0, 4))}
        td, _ = parse_td(json.dumps({
            "id": f"urn:r{round_no}", "title": f"r{round_no}",
            "properties": properties, "actions": actions}))
        category, warnings = blocks_from_td(td)
        assert warnings == []
        assert len(category.blocks) == len(properties) + writable + len(actions)


def test_blocks_from_empty_td():
    td, _ = parse_td(json.dumps({"id": "urn:x", "title": "bare"}))
    category, warnings = blocks_from_td(td)
    assert category.name == "bare"
    assert category.blocks == ()
    assert warnings == []


def test_td_property_without_form_is_omitted_with_warning():
    doc = {
        "id": "urn:example:partial",
        "title": "partial",
        "properties": {
            "good": {"forms": [{"href": "http://h/p/good"}]},
            "bad": {},
        },
    }
    td, parse_warnings = parse_td(json.dumps(doc))
    assert any("bad" in w for w in parse_warnings)
    category, _ = blocks_from_td(td)
    assert len(category.blocks) == 2  # read + write for 'good' only


def test_invoke_block_with_object_schema():
    doc = {
        "id": "urn:example:dimmer",
        "title": "dimmer",
        "actions": {
            "fade": {
                "input": {"type": "object",
                          "properties": {"level": {"type": "number"},
                                         "duration": {"type": "number"}}},
                "forms": [{"href": "http://d.local/actions/fade"}],
            },
        },
    }
    td, _ = parse_td(json.dumps(doc))
    category, _ = blocks_from_td(td)
    invoke = category.blocks[0]
    assert [s.name for s in invoke.inputs] == ["level", "duration"]

    catalog = CATALOG.extended([category])
    step = blk(invoke.id, inputs={"level": num(80), "duration": num(2)},
               mutation=dict(invoke.mutation_defaults))
    plan = blk("plan", fields={"TRIGGER_KIND": "wants"},
               inputs={"TRIGGER": atom("go"), "BODY": step})
    prog = compile_blocks(program(plan), catalog)
    assert prog.plans[0].body[0] == EnvironmentAction(
        "wot:invokeaction",
        (Str("http://d.local/actions/fade"), Str("POST"),
         Str("level"), Num(80), Str("duration"), Num(2)))


def test_affordance_blocks_compile_without_the_thing_category():
    # the server never saw the TD: the instance's mutation carries the full
    # wiring, so validation and compilation still work on the base catalog
    category, _ = blocks_from_td(lamp_td())
    read = category.blocks[0]
    step = blk(read.id, inputs={"OUT": var("D")}, mutation=dict(read.mutation_defaults))
    step.next = blk("act_print", inputs={"VALUE": var("D")})
    plan = blk("plan", fields={"TRIGGER_KIND": "wants"},
               inputs={"TRIGGER": atom("go"), "BODY": step})
    bp = program(plan)
    assert validate(bp, CATALOG) == []
    with_plain = compile_blocks(bp, CATALOG)
    with_things = compile_blocks(bp, CATALOG.extended([category]))
    assert with_plain == with_things


def test_affordance_block_missing_wiring_is_unknown_type():
    step = blk("thing_lamp_read_on", inputs={"OUT": var("D")},
               mutation={"affordanceKind": "readproperty"})  # href missing
    plan = blk("plan", fields={"TRIGGER_KIND": "wants"},
               inputs={"TRIGGER": atom("go"), "BODY": step})
    diags = validate(program(plan), CATALOG)
    assert any(d.code == "UnknownBlockType" for d in diags)


def test_read_block_compiles_to_environment_action():
    category, _ = blocks_from_td(lamp_td())
    catalog = CATALOG.extended([category])
    read = category.blocks[0]
    step = blk(read.id, inputs={"OUT": var("D")}, mutation=dict(read.mutation_defaults))
    plan = blk("plan", fields={"TRIGGER_KIND": "wants"},
               inputs={"TRIGGER": atom("go"),
                       "BODY": step})
    step.next = blk("act_print", inputs={"VALUE": var("D")})
    prog = compile_blocks(program(plan), catalog)
    assert prog.plans[0].body[0] == EnvironmentAction(
        "wot:readproperty",
        (Str("http://lamp.local/properties/on"), Str("GET"), Var("D")))
    # the read binds D, so the following print passes the binding check
    assert prog.plans[0].body[1] == InternalAction("print", (Var("D"),))
