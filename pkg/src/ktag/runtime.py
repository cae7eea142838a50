"""Discrete-time run engine.

Time is global and integral; every event occupies its own tick, and the
first event of a run happens at ``t = start_time + 1``. A process is at any
moment in exactly one of three situations, which fixes the only kind of
event it can take next:

* it has pending actions (sends, queries, decisions) -> a local step;
* it waits for an oracle answer -> an A event, once an answer exists;
* otherwise -> an R event, if a message addressed to it is in transit.

Automata react to stimuli (message deliveries and oracle answers) by
returning a list of actions; the engine turns each action into one event.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .events import ANSWER, BUFFER, DECIDE, LOCAL, QUERY, RECEIVE, SEND, Event
from .oracles import IllegalAnswer, Mode, OracleInstance, OracleSpec, ProtocolViolation, validate_oracle_history
from .tasks import FailurePattern, ParameterError
from .verdict import Status, Verdict

DEFAULT_BOUND = 10_000

QUIESCENT, BOUND, SCRIPT_END = "quiescent", "bound", "script"


# -- actions -------------------------------------------------------------------

@dataclass(frozen=True)
class Send:
    body: tuple
    to: tuple[int, ...]


@dataclass(frozen=True)
class Query:
    sanctuary: str
    value: int


@dataclass(frozen=True)
class Decide:
    value: int


class ProcessAutomaton:
    """Deterministic per-process behaviour.

    Subclasses override :meth:`start`, :meth:`on_message` and
    :meth:`on_answer`; each returns the actions triggered by that stimulus.
    """

    def __init__(self, pid: int, bit: int, protocol):
        self.pid = pid
        self.bit = bit
        self.protocol = protocol
        self.decision: int | None = None

    def start(self) -> list:
        return []

    def on_message(self, src: int, body: tuple) -> list:
        return []

    def on_answer(self, sanctuary: str, value: int) -> list:
        return []

    def everyone(self) -> tuple[int, ...]:
        return tuple(range(1, self.protocol.size + 1))

    def decide(self, value: int) -> Decide:
        self.decision = value
        return Decide(value)


def action_matches(action, e: Event) -> bool:
    if isinstance(action, Send):
        return e.kind == SEND and e.loc == BUFFER and e.payload.get("body") == action.body \
            and tuple(e.payload.get("to", ())) == action.to
    if isinstance(action, Query):
        return e.kind == QUERY and e.loc == action.sanctuary and e.value == action.value
    if isinstance(action, Decide):
        return e.kind == DECIDE and e.value == action.value
    return False


# -- runs ----------------------------------------------------------------------

@dataclass
class Run:
    """A run <F, I, H> plus the configuration needed to re-check it."""

    inputs: tuple[int, ...]
    pattern: FailurePattern
    events: list[Event]
    protocol: dict | None = None
    oracles: tuple[OracleSpec, ...] = ()
    scheduler: dict = field(default_factory=lambda: {"kind": "rr"})
    step_bound: int = DEFAULT_BOUND
    stopped: str = QUIESCENT
    rule: str = "policy"
    seed: int | None = None
    start_time: int = 0

    @property
    def n(self) -> int:
        return len(self.inputs)

    def prefix(self, t: int) -> Run:
        """H[0, t]: the events at or before ``t``."""
        return replace(self, events=[e for e in self.events if e.t <= t], stopped=BOUND)

    def decisions(self) -> dict[int, list[tuple[int, int]]]:
        """``pid -> [(event index, value), ...]`` for every D event."""
        out: dict[int, list[tuple[int, int]]] = {}
        for i, e in enumerate(self.events):
            if e.kind == DECIDE:
                out.setdefault(e.pid, []).append((i, e.value))
        return out

    def decided_values(self) -> dict[int, int]:
        return {p: ds[0][1] for p, ds in self.decisions().items()}

    def first_time_all_decided(self, pids: Iterable[int]) -> int | None:
        need = set(pids)
        for e in self.events:
            if e.kind == DECIDE:
                need.discard(e.pid)
                if not need:
                    return e.t
        return None if need else self.start_time

    @property
    def last_time(self) -> int:
        return self.events[-1].t if self.events else self.start_time


def parse_inputs(bits, n: int | None = None) -> tuple[int, ...]:
    if isinstance(bits, str):
        if bits and set(bits) - {"0", "1"}:
            raise ParameterError(f"inputs must be a bitstring, got {bits!r}")
        out = tuple(int(b) for b in bits)
    else:
        out = tuple(int(b) for b in bits)
        if set(out) - {0, 1}:
            raise ParameterError("inputs must be binary")
    if n is not None and len(out) != n:
        raise ParameterError(f"expected {n} input bits, got {len(out)}")
    return out


def parse_crashes(text: str, n: int) -> FailurePattern:
    """Parse ``"p@t,p@t"`` (empty string: no crashes)."""
    sched = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            p, t = item.split("@")
            sched.append((int(p), int(t)))
        except ValueError as exc:
            raise ParameterError(f"bad crash entry {item!r}; expected p@t") from exc
    return FailurePattern.from_schedule(n, sched)


# -- schedulers ----------------------------------------------------------------

class ScheduleError(RuntimeError):
    pass


class FairRoundRobin:
    """Process queue; the chosen process moves to the back; earliest message first."""

    def __init__(self, order: Sequence[int] | None = None):
        self.order = list(order) if order is not None else None
        self.queue: deque[int] | None = None

    def spec(self) -> dict:
        return {"kind": "rr"}

    def choose(self, engine: Engine, candidates: list[int]) -> tuple[int, int]:
        if self.queue is None:
            self.queue = deque(self.order if self.order is not None else engine.pids)
        enabled = set(candidates)
        for p in self.queue:
            if p in enabled:
                self.queue.remove(p)
                self.queue.append(p)
                return p, 0
        p = candidates[0]
        self.queue.append(p)
        return p, 0


class RandomScheduler:
    """Seeded uniform choice of process, and of message for receives."""

    def __init__(self, seed: int):
        self.seed = seed
        self.rng = random.Random(seed)

    def spec(self) -> dict:
        return {"kind": "random", "seed": self.seed}

    def choose(self, engine: Engine, candidates: list[int]) -> tuple[int, int]:
        p = candidates[self.rng.randrange(len(candidates))]
        if engine.mode(p) == RECEIVE:
            return p, self.rng.randrange(len(engine.inbox[p]))
        return p, 0


class ScriptScheduler:
    """Explicit process order; each listed process takes its enabled step."""

    def __init__(self, order: Sequence[int]):
        self.order = list(order)
        self.pos = 0

    def spec(self) -> dict:
        return {"kind": "script", "order": list(self.order)}

    def exhausted(self) -> bool:
        return self.pos >= len(self.order)

    def choose(self, engine: Engine, candidates: list[int]) -> tuple[int, int]:
        p = self.order[self.pos]
        if p not in candidates:
            raise ScheduleError(f"scripted process {p} has no enabled event at step {self.pos}")
        self.pos += 1
        return p, 0


def make_scheduler(spec: dict | str | None, seed: int | None = None):
    if spec is None or spec == "random":
        return RandomScheduler(seed or 0)
    if spec == "rr":
        return FairRoundRobin()
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind == "rr":
            return FairRoundRobin()
        if kind == "random":
            return RandomScheduler(spec.get("seed", seed or 0))
        if kind == "script":
            return ScriptScheduler(spec["order"])
    raise ParameterError(f"unknown scheduler {spec!r}")


# -- engine --------------------------------------------------------------------

class Engine:
    """Mutable execution state: automata, message buffer, oracles, history."""

    def __init__(self, protocol, inputs: Sequence[int], pattern: FailurePattern,
                 oracles: Sequence[OracleSpec] | None = None, start_time: int = 0):
        self.protocol = protocol
        self.inputs = parse_inputs(inputs, protocol.size)
        if pattern.n != protocol.size:
            raise ParameterError("failure pattern size does not match the protocol")
        self.pattern = pattern
        self.specs = tuple(oracles if oracles is not None else protocol.oracles)
        for s in self.specs:
            if not set(s.real) <= set(range(1, protocol.size + 1)):
                raise ParameterError(f"consultants of {s.sanctuary} outside the process set")
        self.oracles = {s.sanctuary: OracleInstance(s) for s in self.specs}
        self.pids = tuple(range(1, protocol.size + 1))
        self.procs = {p: protocol.make(p, self.inputs[p - 1]) for p in self.pids}
        self.outbox = {p: deque(self.procs[p].start()) for p in self.pids}
        self.awaiting: dict[int, str | None] = {p: None for p in self.pids}
        self.inbox: dict[int, list[tuple[int, int, tuple]]] = {p: [] for p in self.pids}
        self.events: list[Event] = []
        self.now = start_time
        self.start_time = start_time
        self._alive_pids: tuple[int, ...] | None = None
        self._alive_until: int | None = None
        self._dirty: set[str] = set(self.oracles)

    # -- inspection --

    def mode(self, p: int) -> str:
        if self.outbox[p]:
            return LOCAL
        if self.awaiting[p] is not None:
            return ANSWER
        return RECEIVE

    def _alive(self, t: int) -> tuple[int, ...]:
        # recomputed only when t passes the next crash time
        if self._alive_until is not None and t >= self._alive_until or self._alive_pids is None:
            self._alive_pids = tuple(p for p in self.pids if self.pattern.can_act(p, t))
            self._alive_until = self.pattern.next_crash_after(t)
            self._dirty.update(s for s, o in self.oracles.items() if o.spec.mode is Mode.SHAM)
        return self._alive_pids

    def enabled(self, t: int, rule: str) -> list[int]:
        out = []
        for p in self._alive(t):
            if self.outbox[p]:
                out.append(p)
            elif self.awaiting[p] is not None:
                if rule != "policy" or self.oracles[self.awaiting[p]].available(p) is not None:
                    out.append(p)
            elif self.inbox[p]:
                out.append(p)
        return out

    # -- stepping --

    def _emit(self, e: Event) -> Event:
        self.events.append(e)
        self.now = e.t
        return e

    def _local(self, p: int, action, t: int) -> Event:
        if isinstance(action, Send):
            for d in action.to:
                if d not in self.procs:
                    raise ProtocolViolation(f"process {p} sends to unknown process {d}")
            for d in action.to:
                self.inbox[d].append((t, p, action.body))
            return self._emit(Event(t, BUFFER, p, SEND, {"body": action.body, "to": action.to}))
        if isinstance(action, Query):
            e = Event(t, action.sanctuary, p, QUERY, {"value": action.value})
            if action.sanctuary not in self.oracles:
                raise ProtocolViolation(f"process {p} queries unknown sanctuary {action.sanctuary}", e)
            if self.awaiting[p] is not None:
                raise ProtocolViolation(f"process {p} queries while awaiting {self.awaiting[p]}", e)
            try:
                self.oracles[action.sanctuary].submit_query(p, action.value, t)
            except ProtocolViolation as exc:
                exc.event = e
                raise
            self.awaiting[p] = action.sanctuary
            self._dirty.add(action.sanctuary)
            return self._emit(e)
        if isinstance(action, Decide):
            return self._emit(Event(t, LOCAL, p, DECIDE, {"value": action.value}))
        raise ProtocolViolation(f"process {p} produced unknown action {action!r}")

    def _answer(self, p: int, t: int, rule: str, value: int | None = None, check: bool = True) -> Event:
        sid = self.awaiting[p]
        oracle = self.oracles[sid]
        c = oracle.waiting(p)
        if value is None:
            if rule.startswith("forced:"):
                value = int(rule.split(":")[1])
            elif rule == "echo":
                # answer already given in this consultation, else the querier's own value
                value = c.committed if c.committed is not None else c.queries[p][0]
            else:
                value = c.committed
        if c.committed is None:
            if check:
                oracle.commit(c, value, self.pattern, t)
            else:
                c.committed, c.committed_at = value, t
        elif c.committed != value:
            raise IllegalAnswer(sid, c.index, value, frozenset({c.committed}),
                                oracle.spec.mode_view(self.pattern, t), c.vector(t), t)
        oracle.record_answer(p, t, self.pattern if check else None)
        self.awaiting[p] = None
        e = self._emit(Event(t, sid, p, ANSWER, {"value": value}))
        self.outbox[p].extend(self.procs[p].on_answer(sid, value))
        return e

    def _receive(self, p: int, i: int, t: int) -> Event:
        sent, src, body = self.inbox[p].pop(i)
        e = self._emit(Event(t, BUFFER, p, RECEIVE, {"src": src, "sent": sent, "body": body}))
        self.outbox[p].extend(self.procs[p].on_message(src, body))
        return e

    def step(self, p: int, msg_index: int, t: int, rule: str) -> Event:
        mode = self.mode(p)
        if mode == LOCAL:
            return self._local(p, self.outbox[p].popleft(), t)
        if mode == ANSWER:
            return self._answer(p, t, rule)
        return self._receive(p, msg_index, t)

    def commit_oracles(self) -> None:
        """Let every oracle with new queries (or newly visible crashes) commit answers."""
        if not self._dirty:
            return
        for sid in self._dirty:
            self.oracles[sid].try_commit(self.pattern, self.now)
        # sham oracles may still be blocked; the next visible crash re-marks them
        self._dirty = set()

    def run(self, scheduler, step_bound: int = DEFAULT_BOUND, rule: str = "policy") -> str:
        """Advance until quiescence or ``step_bound`` new events; returns the stop reason."""
        if step_bound <= 0:
            raise ParameterError("step bound must be positive")
        steps = 0
        while True:
            if rule == "policy":
                self.commit_oracles()
            t = self.now + 1
            candidates = self.enabled(t, rule)
            if not candidates:
                nxt = self.pattern.next_crash_after(self.now)
                if nxt is not None and rule == "policy" and any(
                        o.spec.mode is Mode.SHAM for o in self.oracles.values()):
                    # idle until the next crash becomes visible to sham oracles
                    self.now = nxt
                    self._dirty.update(s for s, o in self.oracles.items() if o.spec.mode is Mode.SHAM)
                    continue
                return QUIESCENT
            if steps >= step_bound:
                return BOUND
            if isinstance(scheduler, ScriptScheduler) and scheduler.exhausted():
                return SCRIPT_END
            p, i = scheduler.choose(self, candidates)
            self.step(p, i, t, rule)
            steps += 1

    # -- replay --

    def replay(self, events: Iterable[Event], check_answers: bool = False) -> None:
        """Re-execute recorded events; raises on any event the state cannot produce."""
        for e in events:
            if e.t <= self.now:
                raise ScheduleError(f"event at t={e.t} does not follow t={self.now}")
            p = e.pid
            if p not in self.procs or not self.pattern.can_act(p, e.t):
                raise ScheduleError(f"process {p} cannot act at t={e.t}")
            mode = self.mode(p)
            if mode == LOCAL:
                action = self.outbox[p][0]
                if not action_matches(action, e):
                    raise ScheduleError(f"event {e} does not match pending action {action}")
                self.outbox[p].popleft()
                self._local(p, action, e.t)
            elif mode == ANSWER:
                if e.kind != ANSWER or e.loc != self.awaiting[p]:
                    raise ScheduleError(f"process {p} awaits {self.awaiting[p]}, got {e}")
                self._answer(p, e.t, "replay", value=e.value, check=check_answers)
            else:
                if e.kind != RECEIVE:
                    raise ScheduleError(f"process {p} can only receive, got {e}")
                key = (e.payload["sent"], e.payload["src"], e.payload["body"])
                try:
                    i = self.inbox[p].index(key)
                except ValueError:
                    raise ScheduleError(f"no message in transit matches {e}") from None
                self._receive(p, i, e.t)

    def to_run(self, stopped: str, scheduler=None, step_bound: int = DEFAULT_BOUND,
               rule: str = "policy", seed: int | None = None) -> Run:
        return Run(
            inputs=self.inputs,
            pattern=self.pattern,
            events=list(self.events),
            protocol=self.protocol.to_dict(),
            oracles=self.specs,
            scheduler=scheduler.spec() if scheduler is not None else {"kind": "rr"},
            step_bound=step_bound,
            stopped=stopped,
            rule=rule,
            seed=seed,
            start_time=self.start_time,
        )


def simulate(protocol, inputs, pattern: FailurePattern | None = None, oracles: Sequence[OracleSpec] | None = None,
             scheduler=None, step_bound: int = DEFAULT_BOUND, rule: str = "policy",
             seed: int | None = None) -> Run:
    """Execute ``protocol`` from scratch and return the resulting run.

    A pure function of its arguments: the same arguments always give an
    identical run.
    """
    pattern = pattern if pattern is not None else FailurePattern.failure_free(protocol.size)
    scheduler = scheduler if scheduler is not None else FairRoundRobin()
    engine = Engine(protocol, inputs, pattern, oracles)
    stopped = engine.run(scheduler, step_bound, rule)
    return engine.to_run(stopped, scheduler, step_bound, rule, seed)


def fair_extension(prefix: Run, protocol, rule: str = "echo", step_bound: int = DEFAULT_BOUND) -> Run:
    """Extend ``prefix`` fairly under the failure-free pattern.

    Round-robin process queue, earliest message first; with ``rule="echo"``
    an answer repeats the value already given in the consultation, or else
    echoes the querier's own query value. Echoes are always legal for a
    wait-free oracle; for others an illegal echo raises :class:`IllegalAnswer`,
    and ``rule="policy"`` is the safe choice. The prefix's answers are
    replayed unchecked and must already be legal without failures.
    """
    pattern = FailurePattern.failure_free(prefix.n)
    engine = Engine(protocol, prefix.inputs, pattern, prefix.oracles, prefix.start_time)
    engine.replay(prefix.events)
    scheduler = FairRoundRobin()
    stopped = engine.run(scheduler, step_bound, rule)
    return engine.to_run(stopped, scheduler, step_bound, rule, prefix.seed)


def flip_inputs(run: Run, flip_set: Iterable[int], new_bit: int) -> Run:
    """Change the inputs of processes that take no step in the run."""
    flip = set(flip_set)
    active = {e.pid for e in run.events if e.pid in flip}
    if active:
        raise ParameterError(f"processes {sorted(active)} take steps and cannot be flipped")
    inputs = tuple(new_bit if p in flip else b for p, b in enumerate(run.inputs, start=1))
    return replace(run, inputs=inputs, events=list(run.events))


# -- structural validation -----------------------------------------------------

def validate_run_structure(run: Run, protocol=None) -> Verdict:
    """Check that ``run`` is a legal run of ``protocol``.

    Conditions: ``well_formed`` (time order, process ids, query/answer
    alternation), ``channels`` (every receive matches an earlier unconsumed
    send; in a finished run nothing stays in transit to a correct process),
    ``replay`` (each process's events are exactly what its automaton does on
    its stimuli), ``fairness`` (a finished run leaves no correct process with
    an enabled step), ``crash_silence`` (no step at or after a crash), and
    ``oracle_history`` (each sanctuary's sub-history is legal).
    """
    verdict = Verdict()
    n = run.n
    pids = range(1, n + 1)
    complete = run.stopped == QUIESCENT
    specs = {s.sanctuary: s for s in run.oracles}

    form, chan, rep, crash = [], [], [], []
    notes = {"form": [], "chan": [], "rep": []}
    procs = outbox = None
    if protocol is not None:
        procs = {p: protocol.make(p, run.inputs[p - 1]) for p in pids}
        outbox = {p: deque(procs[p].start()) for p in pids}
    desynced: set[int] = set()
    awaiting: dict[int, tuple[str, int] | None] = {p: None for p in pids}
    asked: dict[tuple[str, int], int] = {}
    answered_consultations: set[tuple[str, int]] = set()
    in_transit: dict[int, tuple[int, tuple, set[int]]] = {}
    per_sanctuary: dict[str, list[int]] = {s: [] for s in specs}
    last_t = run.start_time

    for i, e in enumerate(run.events):
        if e.t <= last_t:
            form.append(i)
            notes["form"].append(f"event {i} at t={e.t} not after t={last_t}")
        last_t = max(last_t, e.t)
        p = e.pid
        if p not in pids:
            form.append(i)
            notes["form"].append(f"unknown process {p}")
            continue
        if not run.pattern.can_act(p, e.t):
            crash.append(i)

        if e.kind in (QUERY, ANSWER):
            if e.loc not in specs:
                form.append(i)
                notes["form"].append(f"unknown sanctuary {e.loc}")
                continue
            per_sanctuary[e.loc].append(i)
            if e.kind == QUERY:
                if awaiting[p] is not None:
                    form.append(i)
                    notes["form"].append(f"process {p} queries while awaiting an answer")
                else:
                    c = asked.get((e.loc, p), 0) + 1
                    asked[(e.loc, p)] = c
                    awaiting[p] = (e.loc, c)
            else:
                if awaiting[p] is None or awaiting[p][0] != e.loc:
                    form.append(i)
                    notes["form"].append(f"answer to process {p} without a pending query")
                else:
                    answered_consultations.add(awaiting[p])
                    awaiting[p] = None
        elif e.kind == SEND:
            to = tuple(e.payload.get("to", ()))
            if any(d not in pids for d in to):
                form.append(i)
            in_transit[e.t] = (p, e.payload.get("body"), set(to))
        elif e.kind == RECEIVE:
            msg = in_transit.get(e.payload.get("sent"))
            if msg is None or msg[0] != e.payload.get("src") or msg[1] != e.payload.get("body") or p not in msg[2]:
                chan.append(i)
                notes["chan"].append(f"event {i}: receive without a matching send")
            else:
                msg[2].discard(p)
        elif e.kind != DECIDE:
            form.append(i)
            notes["form"].append(f"unknown event kind {e.kind!r}")
            continue

        if procs is None or p in desynced:
            continue
        box = outbox[p]
        ok = True
        if e.kind in (SEND, QUERY, DECIDE):
            ok = bool(box) and action_matches(box[0], e)
            if ok:
                box.popleft()
        elif box:
            ok = False
        elif e.kind == ANSWER:
            box.extend(procs[p].on_answer(e.loc, e.value))
        elif e.kind == RECEIVE:
            box.extend(procs[p].on_message(e.payload.get("src"), e.payload.get("body")))
        if not ok:
            rep.append(i)
            desynced.add(p)
            notes["rep"].append(f"event {i} of process {p} is not what its automaton does")

    verdict.add("well_formed", Status.FAIL if form else Status.PASS, form, "; ".join(notes["form"][:3]))

    correct = run.pattern.correct
    stranded = []
    if complete:
        for t, (src, body, dests) in in_transit.items():
            if dests & correct:
                stranded.append(t)
    if chan or stranded:
        detail = "; ".join(notes["chan"][:3])
        if stranded:
            detail += f"; messages sent at t={sorted(stranded)[:5]} never delivered to correct processes"
        evidence = chan + [i for i, e in enumerate(run.events) if e.kind == SEND and e.t in set(stranded)]
        verdict.add("channels", Status.FAIL, evidence, detail.strip("; "))
    else:
        verdict.add("channels", Status.PASS)

    if procs is None:
        verdict.add("replay", Status.VACUOUS, detail="no protocol to replay against")
    else:
        verdict.add("replay", Status.FAIL if rep else Status.PASS, rep, "; ".join(notes["rep"][:3]))

    pending = []
    for p in sorted(correct):
        if p in desynced:
            continue
        if outbox is not None and outbox[p]:
            pending.append(f"p{p}: pending {type(outbox[p][0]).__name__}")
        elif awaiting[p] is not None and awaiting[p] in answered_consultations:
            pending.append(f"p{p}: answer available at {awaiting[p][0]}")
        elif awaiting[p] is None and any(p in d for _, _, d in in_transit.values()):
            pending.append(f"p{p}: message in transit")
    if pending and complete:
        verdict.add("fairness", Status.FAIL, detail="; ".join(pending))
    else:
        verdict.add("fairness", Status.PASS, detail=("stopped at bound with " + "; ".join(pending)) if pending else "")

    verdict.add("crash_silence", Status.FAIL if crash else Status.PASS, crash)

    oracle_verdict = Verdict()
    for sid, spec in specs.items():
        idx = per_sanctuary[sid]
        sub = validate_oracle_history([run.events[i] for i in idx], run.pattern, spec, idx, complete)
        oracle_verdict.extend(sub, prefix=f"{sid}.")
    failed = [c for c in oracle_verdict.conditions if c.status is Status.FAIL]
    unsure = [c for c in oracle_verdict.conditions if c.status is Status.INCONCLUSIVE]
    if failed:
        verdict.add("oracle_history", Status.FAIL, [i for c in failed for i in c.evidence],
                    ", ".join(c.name for c in failed))
    elif unsure:
        verdict.add("oracle_history", Status.INCONCLUSIVE, [i for c in unsure for i in c.evidence],
                    ", ".join(c.name for c in unsure))
    else:
        verdict.add("oracle_history", Status.PASS)
    return verdict
