"""The block language: connection typing, block type definitions and the
catalog of categories (six static ones plus dynamic per-thing categories).

Each block type maps exactly one language concept; composition of typed
connections is what rules out ill-formed programs in the editor, and the
server-side validator re-enforces the same rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional


class ConnectionType(Enum):
    VALUE = "value"
    LOGIC_VALUE = "logic_value"
    STATEMENT = "statement"
    TOP_LEVEL = "top_level"


VALUE_ONLY = frozenset({ConnectionType.VALUE})
LOGIC_OR_VALUE = frozenset({ConnectionType.LOGIC_VALUE, ConnectionType.VALUE})
STATEMENT_ONLY = frozenset({ConnectionType.STATEMENT})


@dataclass(frozen=True)
class FieldSpec:
    name: str
    kind: str  # "text" | "number" | "choice" | "atom" | "variable"
    choices: tuple[str, ...] = ()


@dataclass(frozen=True)
class SlotSpec:
    name: str
    accepts: frozenset[ConnectionType]
    required: bool = True
    literal: bool = False   # must compile to a predicate (atom or structure)
    variable: bool = False  # must be a variable block (an output position)


@dataclass(frozen=True)
class VariadicSpec:
    """Mutation-driven repeated inputs: `count_key` in the block's mutation
    gives N, the block then has inputs `{prefix}{0..N-1}` per prefix."""

    count_key: str
    prefixes: tuple[str, ...]
    accepts: frozenset[ConnectionType]
    literal: bool = False


@dataclass(frozen=True)
class BlockType:
    id: str
    role: str  # compiler dispatch key; equals id for static blocks
    label: str
    output: ConnectionType
    fields: tuple[FieldSpec, ...] = ()
    inputs: tuple[SlotSpec, ...] = ()
    has_next: bool = False
    variadic: Optional[VariadicSpec] = None
    mutation_keys: frozenset[str] = frozenset()
    mutation_defaults: Mapping[str, str] = field(default_factory=dict)

    def input_spec(self, name: str) -> Optional[SlotSpec]:
        for slot in self.inputs:
            if slot.name == name:
                return slot
        return None


@dataclass(frozen=True)
class Category:
    name: str
    blocks: tuple[BlockType, ...]


class BlockCatalog:
    def __init__(self, categories):
        self.categories: tuple[Category, ...] = tuple(categories)
        self._by_id: dict[str, BlockType] = {}
        for cat in self.categories:
            for bt in cat.blocks:
                if bt.id in self._by_id:
                    raise ValueError(
                        f"block type {bt.id!r} appears in more than one category")
                self._by_id[bt.id] = bt

    def get(self, type_id: str) -> Optional[BlockType]:
        return self._by_id.get(type_id)

    def extended(self, extra_categories) -> "BlockCatalog":
        return BlockCatalog(self.categories + tuple(extra_categories))

    def __contains__(self, type_id: str) -> bool:
        return type_id in self._by_id


TRIGGER_CHOICES = ("believes", "stops_believing", "wants")
ARITH_CHOICES = ("+", "-", "*", "/")
COMPARE_CHOICES = ("==", "\\==", "<", "<=", ">", ">=", "=")

AFFORDANCE_MUTATION_KEYS = frozenset({"href", "httpMethod", "affordanceKind", "thingId"})


def _bt(id, label, output, **kw) -> BlockType:
    return BlockType(id=id, role=kw.pop("role", id), label=label, output=output, **kw)


def base_catalog() -> BlockCatalog:
    """The six static categories."""
    values = Category("Values", (
        _bt("value_atom", "name", ConnectionType.VALUE,
            fields=(FieldSpec("NAME", "atom"),)),
        _bt("value_string", "text", ConnectionType.VALUE,
            fields=(FieldSpec("TEXT", "text"),)),
        _bt("value_number", "number", ConnectionType.VALUE,
            fields=(FieldSpec("NUM", "number"),)),
        _bt("value_boolean", "truth", ConnectionType.VALUE,
            fields=(FieldSpec("BOOL", "choice", ("true", "false")),)),
        _bt("value_variable", "placeholder", ConnectionType.VALUE,
            fields=(FieldSpec("NAME", "variable"),)),
        _bt("value_empty_list", "empty list", ConnectionType.VALUE),
        _bt("value_list_cons", "list starting with", ConnectionType.VALUE,
            inputs=(SlotSpec("HEAD", VALUE_ONLY),
                    SlotSpec("TAIL", VALUE_ONLY))),
        _bt("literal", "fact", ConnectionType.VALUE,
            fields=(FieldSpec("FUNCTOR", "atom"),),
            variadic=VariadicSpec("args", ("ARG",), VALUE_ONLY),
            mutation_keys=frozenset({"args"})),
    ))
    operations = Category("Operations", (
        _bt("op_arith", "math", ConnectionType.VALUE,
            fields=(FieldSpec("OP", "choice", ARITH_CHOICES),),
            inputs=(SlotSpec("LEFT", VALUE_ONLY), SlotSpec("RIGHT", VALUE_ONLY))),
        _bt("op_compare", "compare", ConnectionType.LOGIC_VALUE,
            fields=(FieldSpec("OP", "choice", COMPARE_CHOICES),),
            inputs=(SlotSpec("LEFT", VALUE_ONLY), SlotSpec("RIGHT", VALUE_ONLY))),
        _bt("op_and", "both", ConnectionType.LOGIC_VALUE,
            inputs=(SlotSpec("LEFT", LOGIC_OR_VALUE, literal=True),
                    SlotSpec("RIGHT", LOGIC_OR_VALUE, literal=True))),
        _bt("op_or", "either", ConnectionType.LOGIC_VALUE,
            inputs=(SlotSpec("LEFT", LOGIC_OR_VALUE, literal=True),
                    SlotSpec("RIGHT", LOGIC_OR_VALUE, literal=True))),
        _bt("op_not", "it is not the case that", ConnectionType.LOGIC_VALUE,
            inputs=(SlotSpec("EXPR", LOGIC_OR_VALUE, literal=True),)),
    ))
    initialization = Category("Initialization", (
        _bt("init_belief", "your colleague starts out believing",
            ConnectionType.TOP_LEVEL,
            inputs=(SlotSpec("BELIEF", VALUE_ONLY, literal=True),)),
        _bt("init_goal", "your colleague starts out wanting",
            ConnectionType.TOP_LEVEL,
            inputs=(SlotSpec("GOAL", VALUE_ONLY, literal=True),)),
        _bt("init_rule", "your colleague concludes ... whenever",
            ConnectionType.TOP_LEVEL,
            inputs=(SlotSpec("HEAD", VALUE_ONLY, literal=True),
                    SlotSpec("BODY", LOGIC_OR_VALUE, literal=True))),
    ))
    plan_definition = Category("PlanDefinition", (
        _bt("plan", "when your colleague ...", ConnectionType.TOP_LEVEL,
            fields=(FieldSpec("TRIGGER_KIND", "choice", TRIGGER_CHOICES),),
            inputs=(SlotSpec("TRIGGER", VALUE_ONLY, literal=True),
                    SlotSpec("CONTEXT", LOGIC_OR_VALUE, required=False, literal=True),
                    SlotSpec("BODY", STATEMENT_ONLY, required=False))),
    ))
    agent_actions = Category("AgentActions", (
        _bt("act_add_belief", "start believing", ConnectionType.STATEMENT,
            inputs=(SlotSpec("BELIEF", VALUE_ONLY, literal=True),), has_next=True),
        _bt("act_remove_belief", "stop believing", ConnectionType.STATEMENT,
            inputs=(SlotSpec("BELIEF", VALUE_ONLY, literal=True),), has_next=True),
        _bt("act_achieve", "start wanting", ConnectionType.STATEMENT,
            inputs=(SlotSpec("GOAL", VALUE_ONLY, literal=True),), has_next=True),
        _bt("act_print", "write to the log", ConnectionType.STATEMENT,
            inputs=(SlotSpec("VALUE", VALUE_ONLY),), has_next=True),
        _bt("act_wait", "wait (milliseconds)", ConnectionType.STATEMENT,
            inputs=(SlotSpec("TIME", VALUE_ONLY),), has_next=True),
        _bt("act_json_get", "pick out of a document", ConnectionType.STATEMENT,
            inputs=(SlotSpec("DOC", VALUE_ONLY),
                    SlotSpec("PATH", VALUE_ONLY),
                    SlotSpec("OUT", VALUE_ONLY, variable=True)), has_next=True),
        _bt("act_json_build", "assemble a document", ConnectionType.STATEMENT,
            variadic=VariadicSpec("pairs", ("KEY", "VAL"), VALUE_ONLY),
            inputs=(SlotSpec("OUT", VALUE_ONLY, variable=True),),
            mutation_keys=frozenset({"pairs"}), has_next=True),
    ))
    communication = Category("Communication", (
        _bt("comm_tell", "tell a colleague about", ConnectionType.STATEMENT,
            inputs=(SlotSpec("RECEIVER", VALUE_ONLY),
                    SlotSpec("BELIEF", VALUE_ONLY, literal=True)), has_next=True),
        _bt("comm_achieve", "ask a colleague to achieve", ConnectionType.STATEMENT,
            inputs=(SlotSpec("RECEIVER", VALUE_ONLY),
                    SlotSpec("GOAL", VALUE_ONLY, literal=True)), has_next=True),
    ))
    return BlockCatalog((values, operations, initialization, plan_definition,
                         agent_actions, communication))
