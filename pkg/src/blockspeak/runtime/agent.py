"""Per-agent BDI machinery: events, intentions and the reasoning cycle.

One cycle = drain the mailbox, handle one event (relevant plans by trigger
unification, applicable plans by context entailment, commit to the first),
then execute exactly one step of the next runnable intention, round-robin.
Once committed, an intention is never re-deliberated; a failing step drops
the whole intention with a logged warning and never crashes the container.
"""

from __future__ import annotations

import itertools
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from ..errors import QueryError
from ..lang import (
    AchieveSubgoal,
    AddBelief,
    AgentProgram,
    EnvironmentAction,
    InternalAction,
    Literal,
    Plan,
    RemoveBelief,
    Substitution,
    Term,
    TriggerKind,
    Var,
    apply,
    is_ground,
    print_literal,
    print_step,
    print_trigger,
    unify,
)
from ..logic import BeliefBase, solve
from .actions import StepFailure, run_internal

_TRIGGER_PREFIX = {
    TriggerKind.BELIEF_ADDED: "+",
    TriggerKind.BELIEF_REMOVED: "-",
    TriggerKind.GOAL_ADDED: "+!",
}


@dataclass
class Event:
    kind: TriggerKind
    content: Literal
    origin: Optional["Intention"] = None  # set for subgoal events

    def describe(self) -> str:
        return _TRIGGER_PREFIX[self.kind] + print_literal(self.content)


@dataclass
class Frame:
    plan: Plan
    index: int
    bindings: dict[str, Term]

    @property
    def steps(self):
        return self.plan.body

    def exhausted(self) -> bool:
        return self.index >= len(self.plan.body)


class Intention:
    _ids = itertools.count(1)

    def __init__(self, frame: Frame):
        self.id = next(Intention._ids)
        self.frames: list[Frame] = [frame]
        self.alive = True
        self.wake_at: Optional[float] = None      # .wait suspension
        self.pending = None                       # in-flight environment action
        self.pending_bind: Optional[tuple[Frame, str]] = None
        self.waiting_subgoal = False              # achieve event not yet handled

    def runnable(self, now: float) -> bool:
        if not self.alive or self.waiting_subgoal or self.pending is not None:
            return False
        if self.wake_at is not None:
            if now < self.wake_at:
                return False
            self.wake_at = None
        return True


@dataclass
class CycleReport:
    event: Optional[Event] = None
    selected_plan: Optional[int] = None  # index into the plan library
    selected_bindings: Optional[Substitution] = None
    executed_intention: Optional[int] = None
    executed_step: Optional[str] = None
    warnings: list[str] = field(default_factory=list)
    idle: bool = False


class AgentInstance:
    """A live agent. The belief base is only ever mutated from inside the
    agent's own cycle; other agents reach it through messages alone."""

    def __init__(self, name: str, program: AgentProgram, container):
        self.name = name
        self.program = program
        self.container = container
        self.belief_base = BeliefBase(facts=program.initial_beliefs,
                                      rules=program.rules)
        # initial beliefs do not fire +belief events; initial goals enqueue
        # one +!goal event each, in program order
        self.event_queue: deque[Event] = deque(
            Event(TriggerKind.GOAL_ADDED, g) for g in program.initial_goals)
        self.intentions: list[Intention] = []
        self.mailbox: deque = deque()
        self._mail_lock = threading.Lock()
        self.status = "running"
        self._rr = 0

    # -- logging ---------------------------------------------------------

    def log_info(self, message: str) -> None:
        self.container.log.info(self.name, message)

    def log_warning(self, message: str) -> None:
        self.container.log.warning(self.name, message)

    # -- message and belief entry points -----------------------------------

    def deliver(self, message) -> None:
        """Called by the container (any thread); FIFO per sender."""
        with self._mail_lock:
            self.mailbox.append(message)

    def belief_update(self, add: bool, lit: Literal) -> bool:
        """Add/remove one ground fact. Returns True when the belief base
        changed (and the matching event was enqueued)."""
        if not is_ground(lit) or lit.negated:
            raise ValueError(f"belief updates need ground positive literals: "
                             f"{print_literal(lit)}")
        before = self.belief_base
        if add:
            self.belief_base = before.with_added(lit)
            kind = TriggerKind.BELIEF_ADDED
        else:
            self.belief_base = before.with_removed(lit)
            kind = TriggerKind.BELIEF_REMOVED
        if self.belief_base is before:
            return False
        self.event_queue.append(Event(kind, lit))
        return True

    # -- the reasoning cycle ---------------------------------------------------

    def cycle_step(self) -> CycleReport:
        report = CycleReport()
        if self.status == "stopped":
            report.idle = True
            return report
        self._drain_mailbox()
        if self.event_queue:
            self._handle_event(self.event_queue.popleft(), report)
        self._harvest_pending(report)
        intention = self._next_runnable()
        if intention is not None:
            self._execute(intention, report)
        report.idle = (report.event is None and report.executed_step is None
                       and not self.event_queue and not self.mailbox
                       and report.executed_intention is None)
        if self.status != "stopped":
            self.status = "idle" if report.idle and not self.intentions else "running"
        return report

    def _drain_mailbox(self) -> None:
        with self._mail_lock:
            messages = list(self.mailbox)
            self.mailbox.clear()
        for m in messages:
            if m.performative == "tell":
                self.belief_update(True, m.content)
            else:  # achieve: goal delegation
                self.event_queue.append(Event(TriggerKind.GOAL_ADDED, m.content))

    def _handle_event(self, event: Event, report: CycleReport) -> None:
        report.event = event
        if event.origin is not None and not event.origin.alive:
            self._warn(report, f"dropping {event.describe()}: its intention is gone")
            return
        selected = self._select_plan(event, report)
        if selected is None:
            self._warn(report, f"no applicable plan for {event.describe()}")
            if event.origin is not None:
                self._drop_intention(
                    event.origin,
                    f"subgoal {event.describe()} has no applicable plan", report)
            return
        index, plan, bindings = selected
        report.selected_plan = index
        report.selected_bindings = bindings
        frame = Frame(plan, 0, dict(bindings))
        if event.origin is not None:
            event.origin.frames.append(frame)
            event.origin.waiting_subgoal = False
        else:
            self.intentions.append(Intention(frame))

    def _select_plan(self, event: Event, report: CycleReport):
        """First applicable plan in library order, with its first context
        solution. A context that errors makes the plan inapplicable."""
        for index, plan in enumerate(self.program.plans):
            if plan.trigger.kind != event.kind:
                continue
            theta = unify(plan.trigger.pattern, event.content)
            if theta is None:
                continue
            if plan.context is None:
                return index, plan, theta
            grounded = apply(theta, plan.context)
            try:
                solution = next(solve(grounded, self.belief_base), None)
            except QueryError as e:
                self._warn(report,
                           f"context of plan {print_trigger(plan.trigger)} "
                           f"errored: {e}")
                continue
            if solution is not None:
                return index, plan, theta.merged(solution.substitution)
        return None

    def _harvest_pending(self, report: CycleReport) -> None:
        for intention in list(self.intentions):
            fut = intention.pending
            if fut is None or not fut.done():
                continue
            bind = intention.pending_bind
            intention.pending = None
            intention.pending_bind = None
            try:
                result = fut.result()
            except Exception as e:
                self._drop_intention(intention,
                                     f"environment action failed: {e}", report)
                continue
            if bind is not None:
                frame, var_name = bind
                if result is None:
                    self._drop_intention(
                        intention, "environment action returned nothing to bind",
                        report)
                else:
                    frame.bindings[var_name] = result

    def _next_runnable(self) -> Optional[Intention]:
        if not self.intentions:
            return None
        now = time.monotonic()
        count = len(self.intentions)
        for offset in range(count):
            index = (self._rr + offset) % count
            intention = self.intentions[index]
            if intention.runnable(now):
                self._rr = index + 1
                return intention
        return None

    def _execute(self, intention: Intention, report: CycleReport) -> None:
        while intention.frames and intention.frames[-1].exhausted():
            intention.frames.pop()
        if not intention.frames:
            self._complete(intention)
            report.executed_intention = intention.id
            return
        frame = intention.frames[-1]
        step = frame.steps[frame.index]
        frame.index += 1
        report.executed_intention = intention.id
        report.executed_step = print_step(step)
        try:
            self._run_step(step, frame, intention)
        except StepFailure as e:
            self._drop_intention(intention, str(e), report)
            return
        if intention.alive and intention.pending is None and \
                not intention.waiting_subgoal and intention.wake_at is None:
            while intention.frames and intention.frames[-1].exhausted():
                intention.frames.pop()
            if not intention.frames:
                self._complete(intention)

    def _run_step(self, step, frame: Frame, intention: Intention) -> None:
        s = Substitution(frame.bindings)
        if isinstance(step, AchieveSubgoal):
            goal = apply(s, step.goal)
            if not is_ground(goal):
                raise StepFailure(f"subgoal {print_literal(goal)} is not ground")
            intention.waiting_subgoal = True
            self.event_queue.append(
                Event(TriggerKind.GOAL_ADDED, goal, origin=intention))
        elif isinstance(step, (AddBelief, RemoveBelief)):
            lit = apply(s, step.belief)
            if not is_ground(lit):
                raise StepFailure(f"belief {print_literal(lit)} is not ground")
            self.belief_update(isinstance(step, AddBelief), lit)
        elif isinstance(step, InternalAction):
            args = tuple(apply(s, a) for a in step.args)
            run_internal(self, intention, frame, step.name, args, step.args)
        elif isinstance(step, EnvironmentAction):
            self._issue_environment_action(step, frame, intention, s)
        else:  # pragma: no cover - exhaustive over BodyStep
            raise StepFailure(f"unknown step kind {type(step).__name__}")

    def _issue_environment_action(self, step: EnvironmentAction, frame: Frame,
                                  intention: Intention, s: Substitution) -> None:
        args = [apply(s, a) for a in step.args]
        bind_to = None
        if args and isinstance(args[-1], Var):
            bind_to = (frame, args[-1].name)
            args = args[:-1]
        for a in args:
            if not is_ground(a):
                raise StepFailure(
                    f"environment action {step.action_id} has unbound arguments")
        dispatcher = self.container.dispatcher
        if dispatcher is None:
            raise StepFailure(
                f"no environment dispatcher for action {step.action_id}")
        # asynchronous by contract: the intention suspends, the agent's other
        # intentions keep running
        intention.pending = self.container.submit(
            dispatcher.dispatch, step.action_id, tuple(args))
        intention.pending_bind = bind_to

    def _drop_intention(self, intention: Intention, reason: str,
                        report: Optional[CycleReport] = None) -> None:
        intention.alive = False
        if intention.pending is not None:
            intention.pending.cancel()
            intention.pending = None
        if intention in self.intentions:
            self.intentions.remove(intention)
        message = f"intention {intention.id} dropped: {reason}"
        self.log_warning(message)
        if report is not None:
            report.warnings.append(message)

    def _complete(self, intention: Intention) -> None:
        intention.alive = False
        if intention in self.intentions:
            self.intentions.remove(intention)

    def _warn(self, report: CycleReport, message: str) -> None:
        self.log_warning(message)
        report.warnings.append(message)
