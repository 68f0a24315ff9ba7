"""Multi-agent BDI runtime."""

from .actions import StepFailure, json_to_term, term_to_json
from .agent import AgentInstance, CycleReport, Event, Frame, Intention
from .container import (
    ActionDispatcher,
    MasContainer,
    Message,
    RunHandle,
    TracedMessage,
    UnknownReceiverError,
    WotActionDispatcher,
    run_mas,
)
from .log import RunLog

__all__ = [
    "ActionDispatcher", "AgentInstance", "CycleReport", "Event", "Frame",
    "Intention", "MasContainer", "Message", "RunHandle", "RunLog",
    "StepFailure", "TracedMessage", "UnknownReceiverError",
    "WotActionDispatcher", "json_to_term", "run_mas", "term_to_json",
]
