"""The multi-agent container: spawning, message routing, the WoT dispatcher
and the background execution loop behind `run_mas`.

Agents interact only through message queues; environment actions run on a
small thread pool so an in-flight HTTP call never stalls the cycle loop.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

from ..errors import BlockspeakError
from ..lang import AgentProgram, Literal, Str, Term, is_ground, print_term
from ..wot.client import WotClient
from .actions import COMPACT, StepFailure, term_to_json
from .agent import AgentInstance
from .log import RunLog

DEFAULT_CYCLE_RATE = 1000.0  # max reasoning cycles per second per agent


class UnknownReceiverError(BlockspeakError):
    pass


@dataclass(frozen=True)
class Message:
    sender: str
    receiver: str
    performative: str  # tell | achieve
    content: Literal

    def __post_init__(self):
        if self.performative not in ("tell", "achieve"):
            raise ValueError(f"bad performative {self.performative!r}")
        if not is_ground(self.content):
            raise ValueError("message content must be ground")


@dataclass(frozen=True)
class TracedMessage:
    at: float  # monotonic send time
    message: Message


class ActionDispatcher(Protocol):
    def dispatch(self, action_id: str, args: Sequence[Term]) -> Optional[Term]:
        """Carry out one environment action; returns the term to bind to the
        action's output variable (if it has one)."""


class WotActionDispatcher:
    """Routes `wot:*` environment actions to the WoT client, 1:1 with the
    read/write/invoke operations. Argument packing: [href, method, payload...]
    with the output variable already stripped by the runtime."""

    def __init__(self, client: Optional[WotClient] = None):
        self.client = client or WotClient()

    def dispatch(self, action_id: str, args: Sequence[Term]) -> Optional[Term]:
        if not action_id.startswith("wot:"):
            raise StepFailure(f"no handler for environment action {action_id!r}")
        kind = action_id[len("wot:"):]
        if kind not in ("readproperty", "writeproperty", "invokeaction"):
            raise StepFailure(f"unknown WoT operation {kind!r}")
        if len(args) < 2 or not isinstance(args[0], Str) or not isinstance(args[1], Str):
            raise StepFailure(f"{action_id} needs href and method string arguments")
        href, method = args[0].text, args[1].text
        payload = self._payload(kind, args[2:])
        result = self.client.perform(kind, href, method, payload=payload)
        if result is None:
            return None
        return Str(json.dumps(result, **COMPACT))

    def _payload(self, kind: str, extra: Sequence[Term]):
        if kind == "readproperty":
            return None
        if kind == "writeproperty":
            if len(extra) != 1:
                raise StepFailure("wot:writeproperty takes exactly one payload value")
            return term_to_json(extra[0])
        if not extra:
            return None
        if len(extra) == 1:
            return term_to_json(extra[0])
        if len(extra) % 2 != 0:
            raise StepFailure("object payloads need key/value pairs")
        obj = {}
        for key, value in zip(extra[0::2], extra[1::2]):
            if not isinstance(key, Str):
                raise StepFailure(f"payload keys must be strings, got {print_term(key)}")
            obj[key.text] = term_to_json(value)
        return obj


class MasContainer:
    def __init__(self, run_id: Optional[str] = None,
                 dispatcher: Optional[ActionDispatcher] = None,
                 log: Optional[RunLog] = None):
        self.run_id = run_id or uuid.uuid4().hex[:12]
        self.dispatcher = dispatcher
        self.log = log or RunLog(self.run_id)
        self.agents: dict[str, AgentInstance] = {}
        self.message_trace: list[TracedMessage] = []
        self._trace_lock = threading.Lock()
        self._agents_lock = threading.Lock()
        self._executor = ThreadPoolExecutor(
            max_workers=8, thread_name_prefix=f"env-{self.run_id}")
        self._closed = False

    def spawn_agent(self, name: str, program: AgentProgram) -> AgentInstance:
        with self._agents_lock:
            if name in self.agents:
                raise ValueError(f"agent name {name!r} already in use")
            agent = AgentInstance(name, program, self)
            self.agents[name] = agent
        self.log.info(name, "spawned")
        return agent

    def send(self, message: Message) -> None:
        receiver = self.agents.get(message.receiver)
        if receiver is None:
            raise UnknownReceiverError(f"unknown receiver {message.receiver!r}")
        receiver.deliver(message)
        with self._trace_lock:
            self.message_trace.append(TracedMessage(time.monotonic(), message))

    def submit(self, fn, *args):
        return self._executor.submit(fn, *args)

    def step_all(self, should_stop=None) -> None:
        """One reasoning cycle for every agent (spawn order)."""
        for agent in list(self.agents.values()):
            if should_stop is not None and should_stop():
                return
            if agent.status != "stopped":
                agent.cycle_step()

    def stop(self) -> None:
        if self._closed:
            return
        self._closed = True
        for agent in self.agents.values():
            agent.status = "stopped"
        self._executor.shutdown(wait=False, cancel_futures=True)


class RunHandle:
    """A running MAS. `stop()` may be called from any thread and halts the
    container within one cycle boundary."""

    def __init__(self, container: MasContainer,
                 max_cycle_rate: float = DEFAULT_CYCLE_RATE):
        self.container = container
        self.run_id = container.run_id
        self._stop = threading.Event()
        self._max_rate = max(1.0, max_cycle_rate)
        self._thread = threading.Thread(
            target=self._loop, name=f"mas-{self.run_id}", daemon=True)
        self._stopped = False

    def start(self) -> "RunHandle":
        self._thread.start()
        return self

    @property
    def status(self) -> str:
        return "stopped" if self._stopped else "running"

    def _loop(self) -> None:
        min_round = 1.0 / self._max_rate
        while not self._stop.is_set():
            began = time.monotonic()
            self.container.step_all(should_stop=self._stop.is_set)
            remaining = min_round - (time.monotonic() - began)
            if remaining > 0:
                self._stop.wait(remaining)

    def stop(self, timeout: float = 2.0) -> None:
        if self._stopped:
            return
        self._stop.set()
        if self._thread.is_alive():
            self._thread.join(timeout)
        self.container.stop()
        self._stopped = True

    def wait(self, timeout: float) -> None:
        """Block the calling thread while the run keeps cycling."""
        self._stop.wait(timeout)


def run_mas(programs: Sequence[tuple[str, AgentProgram]],
            dispatcher: Optional[ActionDispatcher] = None,
            run_id: Optional[str] = None,
            log: Optional[RunLog] = None,
            max_cycle_rate: float = DEFAULT_CYCLE_RATE) -> RunHandle:
    """Spawn all agents and start cycling them on a background thread.

    Any spawn error (duplicate names, invalid programs) aborts the whole run
    before anything starts executing.
    """
    names = [name for name, _ in programs]
    if len(set(names)) != len(names):
        raise ValueError("duplicate agent names in run configuration")
    container = MasContainer(run_id=run_id, dispatcher=dispatcher, log=log)
    try:
        for name, program in programs:
            container.spawn_agent(name, program)
    except Exception:
        container.stop()
        raise
    container.log.info("-", f"run started with {len(names)} agent(s)")
    return RunHandle(container, max_cycle_rate=max_cycle_rate).start()
