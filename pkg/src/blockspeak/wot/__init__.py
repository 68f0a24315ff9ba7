"""Thing Description parsing and affordance invocation over HTTP."""

from .client import AffordanceError, RepositoryError, WotClient, json_type_of
from .mock_thing import MockLamp, RequestRecord
from .td import (
    ActionAffordance,
    EventAffordance,
    Form,
    PropertyAffordance,
    TdError,
    ThingDescription,
    parse_td,
)

__all__ = [
    "ActionAffordance", "AffordanceError", "EventAffordance", "Form",
    "MockLamp", "PropertyAffordance", "RepositoryError", "RequestRecord",
    "TdError", "ThingDescription", "WotClient", "json_type_of", "parse_td",
]
