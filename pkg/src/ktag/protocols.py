"""Protocol automata and the registry that wires them to oracles.

Every protocol is a :class:`Protocol`: a system size, a per-process automaton
factory, the oracle sanctuaries it uses, and the task it claims to solve.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .oracles import Mode, OracleSpec
from .runtime import ProcessAutomaton, Query, Send
from .tasks import (
    GeneralizationResult,
    ParameterError,
    TaskSpec,
    cons,
    is_generalization,
    ktag,
    parse_task,
    process_set,
    wag,
)

ORACLE = "o"


class PreconditionError(ParameterError):
    """Protocol parameters outside the range where the protocol is meant to work."""


class NotAGeneralization(ParameterError):
    def __init__(self, result: GeneralizationResult, target: TaskSpec, via: TaskSpec):
        self.result = result
        super().__init__(
            f"{via.label} does not generalize {target.label}: with {result.faulty_count} faulty and "
            f"inputs {result.inputs}, {result.decision} is admissible for {via.label} only"
        )


@dataclass
class Protocol:
    name: str
    size: int
    factory: Callable[[int, int, Protocol], ProcessAutomaton]
    oracles: tuple[OracleSpec, ...]
    target: TaskSpec
    params: dict = field(default_factory=dict)

    def make(self, pid: int, bit: int) -> ProcessAutomaton:
        return self.factory(pid, bit, self)

    def to_dict(self) -> dict:
        return {"name": self.name, **self.params}

    def with_oracles(self, mode=None, policy=None, seed=None) -> Protocol:
        """Same protocol with every sanctuary reconfigured."""
        specs = tuple(s.configured(mode, policy, seed) for s in self.oracles)
        return Protocol(self.name, self.size, self.factory, specs, self.target, dict(self.params))


# -- automata ------------------------------------------------------------------

class QueryThenDecide(ProcessAutomaton):
    """Query the single oracle with the input and decide the answer."""

    def start(self):
        return [Query(ORACLE, self.bit)]

    def on_answer(self, sanctuary, value):
        return [self.decide(value)]


class DecideZero(ProcessAutomaton):
    def start(self):
        return [self.decide(0)]


class Fig1(ProcessAutomaton):
    """Broadcast the input, query the minimum of the first n-f values, decide the answer."""

    def __init__(self, pid, bit, protocol):
        super().__init__(pid, bit, protocol)
        self.values: list[int] = []
        self.queried = False

    def start(self):
        return [Send(("V", self.bit), self.everyone())]

    def on_message(self, src, body):
        if self.queried:
            return []
        self.values.append(body[1])
        n, f = self.protocol.params["n"], self.protocol.params["f"]
        if len(self.values) < n - f:
            return []
        self.queried = True
        return [Query(ORACLE, min(self.values))]

    def on_answer(self, sanctuary, value):
        return [self.decide(value)]


class Fig2(ProcessAutomaton):
    """Two oracle queries, then rounds of report/propose exchange.

    After the first decision the process keeps taking part for ``linger``
    more rounds (``None``: forever) so slower processes can finish, then halts.
    """

    def __init__(self, pid, bit, protocol):
        super().__init__(pid, bit, protocol)
        self.phase = "q1"
        self.v: int | None = None
        self.x = bit
        self.round = 0
        self.stage = "R"
        self.reports: dict[int, dict[int, int]] = {}
        self.proposals: dict[int, dict[int, int | None]] = {}
        self.decided_round: int | None = None

    def start(self):
        return [Query(ORACLE, self.bit)]

    def on_answer(self, sanctuary, value):
        if self.phase == "q1":
            self.v = value
            self.phase = "q2"
            return [Query(ORACLE, 1)]
        self.phase = "rounds"
        if value == 1:
            self.phase = "done"
            return [self.decide(self.v)]
        self.x = self.bit
        return self._enter_round(1)

    def _enter_round(self, r: int) -> list:
        linger = self.protocol.params.get("linger", 1)
        if self.decided_round is not None and linger is not None and r > self.decided_round + linger:
            self.phase = "done"
            return []
        self.round = r
        self.stage = "R"
        return [Send(("R", self.x, r), self.everyone())] + self._advance()

    def on_message(self, src, body):
        if self.phase == "done":
            return []
        tag, val, r = body
        if self.phase == "rounds" and r < self.round:
            return []
        box = self.reports if tag == "R" else self.proposals
        box.setdefault(r, {}).setdefault(src, val)
        if self.phase != "rounds":
            return []
        return self._advance()

    def _advance(self) -> list:
        n, f = self.protocol.params["n"], self.protocol.params["f"]
        r = self.round
        if self.stage == "R":
            got = self.reports.get(r, {})
            if len(got) < n - f:
                return []
            first = list(got.values())[: n - f]
            if first.count(0) >= f + 1:
                w = 0
            elif all(b == 1 for b in first):
                w = 1
            else:
                w = None
            self.stage = "P"
            return [Send(("P", w, r), self.everyone())] + self._advance()
        got = self.proposals.get(r, {})
        if len(got) < n - f:
            return []
        first = list(got.values())[: n - f]
        out = []
        seen = {b for b in first if b is not None}
        assert len(seen) <= 1, f"process {self.pid}: conflicting proposals {first} in round {r}"
        strong = [b for b in (0, 1) if first.count(b) >= f + 1]
        if strong:
            self.x = strong[0]
            if self.decided_round is None:
                self.decided_round = r
            out.append(self.decide(self.x))
        elif seen:
            self.x = seen.pop()
        else:
            self.x = 0
        self.reports.pop(r, None)
        self.proposals.pop(r, None)
        return out + self._enter_round(r + 1)


class Fig3(ProcessAutomaton):
    """Query every other process's oracle, share answers, decide max (or min)."""

    def __init__(self, pid, bit, protocol):
        super().__init__(pid, bit, protocol)
        size = protocol.size
        self.todo = [l for l in range(1, size + 1) if l != pid]
        self.known: dict[int, int] = {}
        self.pick = max if protocol.params["combine"] == "max" else min

    def start(self):
        return [Query(f"o{self.todo[0]}", self.bit)]

    def on_answer(self, sanctuary, value):
        l = int(sanctuary[1:])
        self.known[l] = value
        out = [Send(("W", l, value), self.everyone())]
        self.todo.pop(0)
        if self.todo:
            out.append(Query(f"o{self.todo[0]}", self.bit))
        return out + self._maybe_decide()

    def on_message(self, src, body):
        _, l, w = body
        self.known.setdefault(l, w)
        return self._maybe_decide()

    def _maybe_decide(self) -> list:
        if self.todo or self.decision is not None or len(self.known) < self.protocol.size:
            return []
        return [self.decide(self.pick(self.known.values()))]


class Fig4(ProcessAutomaton):
    """Two oracle queries; on a 0 second answer, decide from n-f broadcast inputs."""

    def __init__(self, pid, bit, protocol):
        super().__init__(pid, bit, protocol)
        self.phase = "q1"
        self.v: int | None = None
        self.values: list[int] = []

    def start(self):
        return [Query(ORACLE, self.bit)]

    def on_answer(self, sanctuary, value):
        if self.phase == "q1":
            self.v = value
            self.phase = "q2"
            return [Query(ORACLE, 1)]
        if value == 1:
            self.phase = "done"
            return [self.decide(self.v)]
        self.phase = "collect"
        return [Send(("V", self.bit), self.everyone())] + self._maybe_decide()

    def on_message(self, src, body):
        self.values.append(body[1])
        return self._maybe_decide() if self.phase == "collect" else []

    def _maybe_decide(self) -> list:
        n, f = self.protocol.params["n"], self.protocol.params["f"]
        if self.decision is not None or len(self.values) < n - f:
            return []
        self.phase = "done"
        return [self.decide(0 if 0 in self.values[: n - f] else 1)]


# -- registry ------------------------------------------------------------------

def _oracle(name: str, task: TaskSpec, mode=Mode.GENERAL, phantoms=()) -> OracleSpec:
    return OracleSpec(name, task.problem.pi, task.problem, task.f, mode, phantoms=frozenset(phantoms))


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise PreconditionError(msg)


def build_protocol(name: str, n: int, f: int, k: int | None = None, strict: bool = True, **options) -> Protocol:
    """Instantiate a registered protocol.

    ``strict=False`` skips the parameter preconditions, for running a
    protocol outside its intended range (as a refutation candidate, say).
    """
    if n < 1 or f < 0:
        raise ParameterError("need n >= 1 and f >= 0")
    params = {"n": n, "f": f, "k": k}
    if not strict:
        params["strict"] = False
    pi = process_set(n)

    def need_k():
        if k is None:
            raise ParameterError(f"protocol {name} needs k")

    if name == "direct":
        need_k()
        if strict:
            _need(1 <= f <= n - 1 and 1 <= k <= n, "direct needs 1 <= f <= n-1 and 1 <= k <= n")
        via = ktag(k + 1, n + 1, f + 1)
        spec = _oracle(ORACLE, via, phantoms={n + 1})
        return Protocol(name, n, QueryThenDecide, (spec,), ktag(k, n, f), params)

    if name == "fig1":
        if strict:
            _need(1 <= f <= n - 1, "fig1 needs 1 <= f <= n-1")
        return Protocol(name, n, Fig1, (_oracle(ORACLE, cons(n, f)),), ktag(f + 1, n, f), params)

    if name == "fig2":
        if strict:
            _need(f >= 1 and n > 2 * f, "fig2 needs f >= 1 and n > 2f")
        params["linger"] = options.get("linger", 1)
        spec = _oracle(ORACLE, ktag(max(f, 1), n, f), Mode.CONSISTENT)
        return Protocol(name, n, Fig2, (spec,), ktag(min(f + 1, n), n, f), params)

    if name == "fig4":
        if strict:
            _need(1 <= f <= n - 1, "fig4 needs 1 <= f <= n-1")
        spec = _oracle(ORACLE, ktag(max(f, 1), n, f), Mode.SHAM)
        return Protocol(name, n, Fig4, (spec,), ktag(min(f + 1, n), n, f), params)

    if name in ("fig3max", "fig3min"):
        need_k()
        if strict:
            _need(1 <= f <= n - 1 and 1 <= k <= n, f"{name} needs 1 <= f <= n-1 and 1 <= k <= n")
        size = n + 1
        specs = []
        for l in range(1, size + 1):
            members = tuple(p for p in range(1, size + 1) if p != l)
            specs.append(_oracle(f"o{l}", ktag(k, n, f, members)))
        params["combine"] = "max" if name == "fig3max" else "min"
        target = ktag(k + 1 if name == "fig3max" else k, size, f)
        return Protocol(name, size, Fig3, tuple(specs), target, params)

    if name == "noop":
        via = parse_task(options["via"]) if isinstance(options.get("via"), str) else options.get("via")
        if via is None:
            raise ParameterError("noop needs via=<task>")
        target = ktag(k, n, f) if k is not None else wag(n, f)
        if via.problem.pi != pi:
            raise ParameterError("noop oracle must range over the same processes")
        result = is_generalization(target, via)
        if not result:
            raise NotAGeneralization(result, target, via)
        params["via"] = _task_text(via)
        return Protocol(name, n, QueryThenDecide, (_oracle(ORACLE, via),), target, params)

    if name in ("naive", "const0"):
        need_k()
        _need(n >= 2 and 1 <= k <= n and 0 <= f <= n - 1, f"{name} needs n >= 2, 1 <= k <= n")
        factory = QueryThenDecide if name == "naive" else DecideZero
        return Protocol(name, n, factory, (_oracle(ORACLE, cons(n, n - 1)),), ktag(k, n, f), params)

    raise ParameterError(f"unknown protocol {name!r}")


def _task_text(task: TaskSpec) -> str:
    if task.problem.kind == "wag":
        return f"wag:{task.n},{task.f}"
    return f"ktag:{task.problem.k},{task.n},{task.f}"


def protocol_from_dict(d: dict) -> Protocol:
    opts = {k: v for k, v in d.items() if k not in ("name", "n", "f", "k", "strict", "combine")}
    return build_protocol(d["name"], d["n"], d["f"], d.get("k"), strict=d.get("strict", True), **opts)


PROTOCOLS = ("direct", "fig1", "fig2", "fig3max", "fig3min", "fig4", "noop", "naive", "const0")
