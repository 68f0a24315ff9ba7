"""HTTP services: the TD repository and the agent runtime API."""

from .common import (
    ConfigurationError,
    TemplateError,
    check_entries,
    compile_template,
    expand_entries,
    instantiate,
)
from .runtime_api import create_app as create_runtime_app
from .tdrepo import create_app as create_tdrepo_app

__all__ = [
    "ConfigurationError", "TemplateError", "check_entries", "compile_template",
    "create_runtime_app", "create_tdrepo_app", "expand_entries", "instantiate",
]
