"""Block-language compiler, BDI agent runtime and Web of Things tooling."""

__version__ = "0.1.0"
