"""Validation and compilation of block programs to agent programs.

`analyze` walks the block tree once, collecting diagnostics and building the
AST as far as possible; `validate` returns just the diagnostics, `compile_blocks`
returns the program and refuses (raises) when any error diagnostic exists.
The mapping is deterministic: a byte-identical document always yields a
structurally identical program.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from ..errors import BlockspeakError
from ..lang import (
    AchieveSubgoal,
    AddBelief,
    AgentProgram,
    And,
    ArithExpr,
    Atom,
    BinOp,
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
    check_plan_bindings,
    is_ground,
)
from ..lang.ast import ATOM_RE, IDENT_RE, RESERVED_NAMES, VAR_RE
from .catalog import (
    AFFORDANCE_MUTATION_KEYS,
    VALUE_ONLY,
    BlockCatalog,
    BlockType,
    ConnectionType,
    SlotSpec,
)
from .document import Block, BlockProgram

TRIGGER_KIND_MAP = {
    "believes": TriggerKind.BELIEF_ADDED,
    "stops_believing": TriggerKind.BELIEF_REMOVED,
    "wants": TriggerKind.GOAL_ADDED,
}


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    block_id: Optional[str] = None

    def to_dict(self) -> dict:
        out = {"severity": self.severity, "code": self.code, "message": self.message}
        if self.block_id is not None:
            out["blockId"] = self.block_id
        return out


class BlockCompileError(BlockspeakError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        summary = "; ".join(d.message for d in self.diagnostics[:3])
        super().__init__(f"block program has {len(self.diagnostics)} problem(s): {summary}")


def validate(bp: BlockProgram, catalog: BlockCatalog) -> list[Diagnostic]:
    """Server-side re-enforcement of the editor's composition rules."""
    _, diags = analyze(bp, catalog)
    return diags


def compile_blocks(bp: BlockProgram, catalog: BlockCatalog) -> AgentProgram:
    program, diags = analyze(bp, catalog)
    errors = [d for d in diags if d.severity == "error"]
    if errors or program is None:
        raise BlockCompileError(errors or diags)
    return program


def analyze(bp: BlockProgram, catalog: BlockCatalog):
    return _Analysis(catalog).run(bp)


_AFFORDANCE_ROLES = {
    "readproperty": "affordance_read",
    "writeproperty": "affordance_write",
    "invokeaction": "affordance_invoke",
}


def synthesize_affordance_type(block: Block) -> Optional[BlockType]:
    """Reconstruct a thing-block type from a serialized instance.

    Affordance blocks carry their full wiring as mutation data precisely so
    code generation needs nothing beyond the block itself; that lets a
    catalog that never saw the originating TD (the server side) still
    validate and compile documents containing them."""
    role = _AFFORDANCE_ROLES.get(block.mutation.get("affordanceKind", ""))
    if role is None:
        return None
    if not block.mutation.get("href") or not block.mutation.get("httpMethod"):
        return None
    if role == "affordance_read":
        inputs = (SlotSpec("OUT", VALUE_ONLY, variable=True),)
    elif role == "affordance_write":
        inputs = (SlotSpec("VALUE", VALUE_ONLY),)
    else:
        # payload slots in document order; byte-identical documents keep
        # their argument order, so compilation stays deterministic
        inputs = tuple(SlotSpec(name, VALUE_ONLY) for name in block.inputs)
    return BlockType(
        id=block.type, role=role, label=block.type,
        output=ConnectionType.STATEMENT, inputs=inputs, has_next=True,
        mutation_keys=AFFORDANCE_MUTATION_KEYS)


class _Analysis:
    def __init__(self, catalog: BlockCatalog):
        self.catalog = catalog
        self.diags: list[Diagnostic] = []

    def error(self, code: str, message: str, block: Optional[Block] = None):
        self.diags.append(Diagnostic("error", code, message,
                                     block.id if block else None))

    def resolve(self, block: Block) -> Optional[BlockType]:
        bt = self.catalog.get(block.type)
        if bt is not None:
            return bt
        return synthesize_affordance_type(block)

    def run(self, bp: BlockProgram):
        if not IDENT_RE.match(bp.agent_name):
            self.error("BadAgentName", f"invalid agent name {bp.agent_name!r}")
        seen_ids: set[str] = set()
        for block in bp.iter_blocks():
            if block.id in seen_ids:
                self.error("DuplicateId", f"block id {block.id!r} is not unique", block)
            seen_ids.add(block.id)
            if self.resolve(block) is None:
                self.error("UnknownBlockType",
                           f"unknown block type {block.type!r}", block)

        beliefs: list[Literal] = []
        goals: list[Literal] = []
        rules: list[Rule] = []
        plans: list[Plan] = []
        for top in bp.top_blocks:
            bt = self.resolve(top)
            if bt is None:
                continue
            if bt.output is not ConnectionType.TOP_LEVEL:
                self.error("BadTopLevel",
                           f"{bt.id} blocks cannot sit at the top level", top)
                continue
            self.check_shape(top, bt)
            if bt.role == "init_belief":
                lit = self.literal_slot(top, bt, "BELIEF")
                if lit is not None:
                    if not is_ground(lit):
                        self.error("NonGroundBelief",
                                   "initial beliefs cannot contain placeholders", top)
                    else:
                        beliefs.append(lit)
            elif bt.role == "init_goal":
                lit = self.literal_slot(top, bt, "GOAL")
                if lit is not None:
                    goals.append(lit)
            elif bt.role == "init_rule":
                head = self.literal_slot(top, bt, "HEAD")
                body = self.logic_slot(top, bt, "BODY")
                if head is not None and body is not None:
                    rules.append(Rule(head, body))
            elif bt.role == "plan":
                plan = self.compile_plan(top, bt)
                if plan is not None:
                    plans.append(plan)
            else:  # pragma: no cover - all TOP_LEVEL roles handled above
                self.error("BadTopLevel", f"unhandled top-level role {bt.role}", top)

        if any(d.severity == "error" for d in self.diags):
            return None, self.diags
        program = AgentProgram(bp.agent_name, tuple(beliefs), tuple(goals),
                               tuple(rules), tuple(plans))
        return program, self.diags

    # -- structural checks ---------------------------------------------------

    def expected_inputs(self, block: Block, bt: BlockType) -> Optional[list[SlotSpec]]:
        slots = list(bt.inputs)
        if bt.variadic is not None:
            raw = block.mutation.get(bt.variadic.count_key, "0")
            try:
                count = int(raw)
                if count < 0:
                    raise ValueError
            except ValueError:
                self.error("BadMutation",
                           f"mutation {bt.variadic.count_key!r} must be a "
                           f"non-negative integer, got {raw!r}", block)
                return None
            for i in range(count):
                for prefix in bt.variadic.prefixes:
                    slots.append(SlotSpec(f"{prefix}{i}", bt.variadic.accepts,
                                          literal=bt.variadic.literal))
        return slots

    def check_shape(self, block: Block, bt: BlockType) -> None:
        """Fields, mutation keys, unknown inputs and next-linking."""
        declared = {f.name for f in bt.fields}
        for name in block.fields:
            if name not in declared:
                self.error("BadField", f"{bt.id} has no field {name!r}", block)
        for f in bt.fields:
            if f.name not in block.fields:
                self.error("BadField", f"{bt.id} is missing field {f.name!r}", block)
        allowed_mutation = set(bt.mutation_keys)
        for key in block.mutation:
            if key not in allowed_mutation:
                self.error("BadMutation", f"{bt.id} declares no mutation {key!r}", block)
        slots = self.expected_inputs(block, bt)
        if slots is not None:
            slot_names = {s.name for s in slots}
            for name in block.inputs:
                if name not in slot_names:
                    self.error("UnknownInput", f"{bt.id} has no input {name!r}", block)
        if block.next is not None and not bt.has_next:
            self.error("TypeMismatch",
                       f"{bt.id} blocks cannot be followed by another block", block)

    def slot_child(self, block: Block, bt: BlockType, slot: SlotSpec) -> Optional[Block]:
        child = block.inputs.get(slot.name)
        if child is None:
            if slot.required:
                self.error("MissingInput",
                           f"{bt.id} needs its {slot.name!r} input filled", block)
            return None
        ct = self.resolve(child)
        if ct is None:
            return None  # UnknownBlockType already reported
        if ct.output not in slot.accepts:
            self.error("TypeMismatch",
                       f"a {ct.id} block does not fit the {slot.name!r} slot of {bt.id}",
                       child)
            return None
        return child

    def named_slot(self, bt: BlockType, name: str) -> SlotSpec:
        slot = bt.input_spec(name)
        assert slot is not None, f"{bt.id} has no declared slot {name}"
        return slot

    # -- value compilation ------------------------------------------------------

    def compile_value(self, block: Block) -> Optional[Union[Term, ArithExpr]]:
        bt = self.resolve(block)
        if bt is None:
            return None
        self.check_shape(block, bt)
        role = bt.role
        if role == "value_atom":
            name = self.field_str(block, "NAME")
            if name is None:
                return None
            if not ATOM_RE.match(name) or name in RESERVED_NAMES:
                self.error("BadField", f"{name!r} is not a valid name "
                           "(lowercase letter, then letters/digits/underscores)", block)
                return None
            return Atom(name)
        if role == "value_string":
            text = block.fields.get("TEXT")
            return Str(str(text)) if text is not None else Str("")
        if role == "value_number":
            raw = block.fields.get("NUM")
            try:
                return Num(float(raw))
            except (TypeError, ValueError):
                self.error("BadField", f"{raw!r} is not a number", block)
                return None
        if role == "value_boolean":
            raw = self.field_str(block, "BOOL")
            if raw not in ("true", "false"):
                self.error("BadField", f"{raw!r} is not true/false", block)
                return None
            return Atom(raw)
        if role == "value_variable":
            name = self.field_str(block, "NAME")
            if name is None:
                return None
            if not VAR_RE.match(name):
                self.error("BadField", f"{name!r} is not a valid placeholder name "
                           "(must start with an uppercase letter)", block)
                return None
            return Var(name)
        if role == "value_empty_list":
            return ListTerm()
        if role == "value_list_cons":
            head = self.term_slot(block, bt, "HEAD")
            tail = self.term_slot(block, bt, "TAIL")
            if head is None or tail is None:
                return None
            if not isinstance(tail, ListTerm):
                self.error("BadListTail",
                           "the tail of a list must itself be a list block", block)
                return None
            return ListTerm((head,) + tail.items)
        if role == "literal":
            lit = self.compile_literal_block(block, bt)
            return lit.to_term() if lit is not None else None
        if role == "op_arith":
            left = self.operand_slot(block, bt, "LEFT")
            right = self.operand_slot(block, bt, "RIGHT")
            op = self.field_str(block, "OP")
            if left is None or right is None or op is None:
                return None
            la, ra = self.as_arith(left, block), self.as_arith(right, block)
            if la is None or ra is None:
                return None
            return BinOp(op, la, ra)
        self.error("TypeMismatch", f"a {bt.id} block cannot produce a value", block)
        return None

    def field_str(self, block: Block, name: str) -> Optional[str]:
        value = block.fields.get(name)
        if value is None:
            return None  # missing-field diagnostic comes from check_shape
        return str(value)

    def as_arith(self, side, block: Block) -> Optional[ArithExpr]:
        if isinstance(side, (Const, VarRef, BinOp)):
            return side
        if isinstance(side, Num):
            return Const(side)
        if isinstance(side, Var):
            return VarRef(side)
        self.error("NonNumericArith",
                   "only numbers and placeholders can appear in math", block)
        return None

    def term_slot(self, block: Block, bt: BlockType, name: str) -> Optional[Term]:
        child = self.slot_child(block, bt, self.named_slot(bt, name))
        if child is None:
            return None
        value = self.compile_value(child)
        if value is None:
            return None
        if isinstance(value, (Const, VarRef, BinOp)):
            self.error("TypeMismatch",
                       "a math expression cannot be used as a plain value here", child)
            return None
        return value

    def operand_slot(self, block: Block, bt: BlockType, name: str):
        child = self.slot_child(block, bt, self.named_slot(bt, name))
        return self.compile_value(child) if child is not None else None

    def variable_slot(self, block: Block, bt: BlockType, name: str) -> Optional[Var]:
        term = self.term_slot(block, bt, name)
        if term is None:
            return None
        if not isinstance(term, Var):
            self.error("NotAVariable",
                       f"the {name!r} slot needs a placeholder block", block)
            return None
        return term

    def literal_of(self, term: Term, block: Block) -> Optional[Literal]:
        if isinstance(term, (Atom, Structure)):
            return Literal.from_term(term)
        self.error("NotALiteral",
                   "expected a fact here (a name or a fact block)", block)
        return None

    def literal_slot(self, block: Block, bt: BlockType, name: str) -> Optional[Literal]:
        child = self.slot_child(block, bt, self.named_slot(bt, name))
        if child is None:
            return None
        term = self.compile_value(child)
        if term is None:
            return None
        if isinstance(term, (Const, VarRef, BinOp)):
            self.error("NotALiteral", "a math expression is not a fact", child)
            return None
        return self.literal_of(term, child)

    def compile_literal_block(self, block: Block, bt: BlockType) -> Optional[Literal]:
        functor = self.field_str(block, "FUNCTOR")
        if functor is None:
            return None
        if not ATOM_RE.match(functor) or functor in RESERVED_NAMES:
            self.error("BadField", f"{functor!r} is not a valid fact name", block)
            return None
        slots = self.expected_inputs(block, bt)
        if slots is None:
            return None
        args = []
        ok = True
        for slot in slots:
            child = block.inputs.get(slot.name)
            if child is None:
                self.error("MissingInput",
                           f"argument {slot.name!r} of the fact is empty", block)
                ok = False
                continue
            ct = self.resolve(child)
            if ct is None:
                ok = False
                continue
            if ct.output not in slot.accepts:
                self.error("TypeMismatch",
                           f"a {ct.id} block does not fit argument {slot.name!r}", child)
                ok = False
                continue
            value = self.compile_value(child)
            if value is None or isinstance(value, (Const, VarRef, BinOp)):
                if isinstance(value, (Const, VarRef, BinOp)):
                    self.error("TypeMismatch",
                               "a math expression cannot be a fact argument", child)
                ok = False
                continue
            args.append(value)
        if not ok:
            return None
        return Literal(functor, tuple(args))

    # -- logic compilation ---------------------------------------------------

    def compile_logic(self, block: Block) -> Optional[LogicExpr]:
        bt = self.resolve(block)
        if bt is None:
            return None
        if bt.output is ConnectionType.VALUE:
            term = self.compile_value(block)
            if term is None:
                return None
            if isinstance(term, (Const, VarRef, BinOp)):
                self.error("NotALiteral", "a math expression is not a condition", block)
                return None
            lit = self.literal_of(term, block)
            return Lit(lit) if lit is not None else None
        self.check_shape(block, bt)
        role = bt.role
        if role == "op_compare":
            left = self.operand_slot(block, bt, "LEFT")
            right = self.operand_slot(block, bt, "RIGHT")
            op = self.field_str(block, "OP")
            if left is None or right is None or op is None:
                return None
            return Rel(op, left, right)
        if role in ("op_and", "op_or"):
            left = self.logic_slot(block, bt, "LEFT")
            right = self.logic_slot(block, bt, "RIGHT")
            if left is None or right is None:
                return None
            return (And if role == "op_and" else Or)(left, right)
        if role == "op_not":
            inner = self.logic_slot(block, bt, "EXPR")
            return Not(inner) if inner is not None else None
        self.error("TypeMismatch", f"a {bt.id} block is not a condition", block)
        return None

    def logic_slot(self, block: Block, bt: BlockType, name: str) -> Optional[LogicExpr]:
        child = self.slot_child(block, bt, self.named_slot(bt, name))
        return self.compile_logic(child) if child is not None else None

    # -- plans -------------------------------------------------------------------

    def compile_plan(self, block: Block, bt: BlockType) -> Optional[Plan]:
        kind_raw = self.field_str(block, "TRIGGER_KIND")
        kind = TRIGGER_KIND_MAP.get(kind_raw or "")
        if kind is None:
            self.error("BadField", f"unknown trigger kind {kind_raw!r}", block)
            return None
        pattern = self.literal_slot(block, bt, "TRIGGER")
        context = None
        if block.inputs.get("CONTEXT") is not None:
            context = self.logic_slot(block, bt, "CONTEXT")
            if context is None:
                return None
        body = self.compile_body(block, bt)
        if pattern is None or body is None:
            return None
        plan = Plan(TriggerEvent(kind, pattern), context, tuple(body))
        for problem in check_plan_bindings(plan):
            self.error("UnboundVariable", problem, block)
        return plan

    def compile_body(self, block: Block, bt: BlockType) -> Optional[list]:
        first = block.inputs.get("BODY")
        if first is None:
            return []
        child = self.slot_child(block, bt, self.named_slot(bt, "BODY"))
        if child is None:
            return None
        steps = []
        ok = True
        for stmt in child.chain():
            step = self.compile_statement(stmt)
            if step is None:
                ok = False
            else:
                steps.append(step)
        return steps if ok else None

    def compile_statement(self, block: Block):
        bt = self.resolve(block)
        if bt is None:
            return None
        if bt.output is not ConnectionType.STATEMENT:
            self.error("TypeMismatch",
                       f"a {bt.id} block cannot be used as an instruction", block)
            return None
        self.check_shape(block, bt)
        role = bt.role
        if role == "act_add_belief":
            lit = self.literal_slot(block, bt, "BELIEF")
            return AddBelief(lit) if lit is not None else None
        if role == "act_remove_belief":
            lit = self.literal_slot(block, bt, "BELIEF")
            return RemoveBelief(lit) if lit is not None else None
        if role == "act_achieve":
            lit = self.literal_slot(block, bt, "GOAL")
            return AchieveSubgoal(lit) if lit is not None else None
        if role == "act_print":
            term = self.term_slot(block, bt, "VALUE")
            return InternalAction("print", (term,)) if term is not None else None
        if role == "act_wait":
            term = self.term_slot(block, bt, "TIME")
            return InternalAction("wait", (term,)) if term is not None else None
        if role == "act_json_get":
            doc = self.term_slot(block, bt, "DOC")
            path = self.term_slot(block, bt, "PATH")
            out = self.variable_slot(block, bt, "OUT")
            if doc is None or path is None or out is None:
                return None
            return InternalAction("json_get", (doc, path, out))
        if role == "act_json_build":
            slots = self.expected_inputs(block, bt)
            if slots is None:
                return None
            args = []
            ok = True
            for slot in slots:
                if slot.name == "OUT":
                    continue
                child = block.inputs.get(slot.name)
                if child is None:
                    self.error("MissingInput",
                               f"{slot.name!r} of the document builder is empty", block)
                    ok = False
                    continue
                value = self.compile_value(child)
                if value is None or isinstance(value, (Const, VarRef, BinOp)):
                    ok = False
                    continue
                args.append(value)
            out = self.variable_slot(block, bt, "OUT")
            if not ok or out is None:
                return None
            return InternalAction("json_build", tuple(args) + (out,))
        if role == "comm_tell":
            return self.compile_send(block, bt, "BELIEF", "tell")
        if role == "comm_achieve":
            return self.compile_send(block, bt, "GOAL", "achieve")
        if role == "affordance_read":
            wiring = self.affordance_wiring(block, bt)
            out = self.variable_slot(block, bt, "OUT")
            if wiring is None or out is None:
                return None
            href, method = wiring
            return EnvironmentAction("wot:readproperty", (Str(href), Str(method), out))
        if role == "affordance_write":
            wiring = self.affordance_wiring(block, bt)
            payload = self.term_slot(block, bt, "VALUE")
            if wiring is None or payload is None:
                return None
            href, method = wiring
            return EnvironmentAction("wot:writeproperty", (Str(href), Str(method), payload))
        if role == "affordance_invoke":
            wiring = self.affordance_wiring(block, bt)
            if wiring is None:
                return None
            href, method = wiring
            payload_args: list[Term] = []
            payload_slots = [s for s in bt.inputs]
            ok = True
            if len(payload_slots) == 1 and payload_slots[0].name == "PAYLOAD":
                value = self.term_slot(block, bt, "PAYLOAD")
                if value is None:
                    ok = False
                else:
                    payload_args.append(value)
            else:
                for slot in payload_slots:
                    value = self.term_slot(block, bt, slot.name)
                    if value is None:
                        ok = False
                        continue
                    payload_args.extend((Str(slot.name), value))
            if not ok:
                return None
            return EnvironmentAction(
                "wot:invokeaction", (Str(href), Str(method)) + tuple(payload_args))
        self.error("TypeMismatch", f"unhandled instruction block {bt.id}", block)
        return None

    def compile_send(self, block: Block, bt: BlockType, content_slot: str,
                     performative: str):
        receiver = self.term_slot(block, bt, "RECEIVER")
        content = self.literal_slot(block, bt, content_slot)
        if receiver is None or content is None:
            return None
        return InternalAction("send", (receiver, Atom(performative), content.to_term()))

    def affordance_wiring(self, block: Block, bt: BlockType):
        effective = {**bt.mutation_defaults, **block.mutation}
        href = effective.get("href")
        method = effective.get("httpMethod")
        if not href or not method:
            self.error("BadMutation",
                       f"{bt.id} is missing its affordance wiring (href/httpMethod)",
                       block)
            return None
        return href, method
