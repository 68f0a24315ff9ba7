"""Block-language model: catalog, documents, validation and compilation."""

from .catalog import (
    AFFORDANCE_MUTATION_KEYS,
    BlockCatalog,
    BlockType,
    Category,
    ConnectionType,
    FieldSpec,
    SlotSpec,
    VariadicSpec,
    base_catalog,
)
from .compiler import (
    BlockCompileError,
    Diagnostic,
    analyze,
    compile_blocks,
    validate,
)
from .document import (
    FORMAT_VERSION,
    Block,
    BlockDocumentError,
    BlockProgram,
    block_to_json,
    document_to_json,
    parse_blocks_document,
)
from .from_td import blocks_from_td

__all__ = [
    "AFFORDANCE_MUTATION_KEYS", "Block", "BlockCatalog", "BlockCompileError",
    "BlockDocumentError", "BlockProgram", "BlockType", "Category",
    "ConnectionType", "Diagnostic", "FORMAT_VERSION", "FieldSpec", "SlotSpec",
    "VariadicSpec", "analyze", "base_catalog", "block_to_json",
    "blocks_from_td", "compile_blocks", "document_to_json",
    "parse_blocks_document", "validate",
]
