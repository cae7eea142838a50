"""Oracle sanctuaries: consultations, answer policies, and history validation.

An oracle answers grouped queries ("consultations"). A process's j-th query
always belongs to consultation j, so a process can join consultation 1 long
after the others have moved on; such late queriers get the value already
committed for that consultation.

Three power modes differ only in which failure information constrains the
answer:

* ``general``: the full failure pattern, future crashes included;
* ``consistent``: as general, plus comparable query vectors across
  consultations must receive equal answers;
* ``sham``: only the crashes that happened at or before the answer time.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Sequence

from .events import ANSWER, QUERY, Event
from .tasks import FailurePattern, ParameterError, ProblemSpec, comparable, oracle_allowed
from .verdict import Status, Verdict

log = logging.getLogger(__name__)

POLICIES = ("prefer0", "prefer1", "seeded")


class Mode(str, Enum):
    GENERAL = "general"
    CONSISTENT = "consistent"
    SHAM = "sham"


class ProtocolViolation(RuntimeError):
    """A process used an oracle in a way no well-formed history allows."""

    def __init__(self, message: str, event=None):
        super().__init__(message)
        self.event = event


class IllegalAnswer(AssertionError):
    """A driver-imposed answer is outside the allowed set."""

    def __init__(self, sanctuary, consultation, value, allowed, faulty_view, vector, t):
        self.sanctuary = sanctuary
        self.consultation = consultation
        self.value = value
        self.allowed = allowed
        self.faulty_view = faulty_view
        self.vector = dict(vector)
        self.t = t
        super().__init__(
            f"{sanctuary}: answer {value} in consultation {consultation} at t={t} not in "
            f"allowed={sorted(allowed)} (faulty view {faulty_view}, queries {self.vector})"
        )

    def to_dict(self) -> dict:
        return {
            "sanctuary": self.sanctuary,
            "consultation": self.consultation,
            "value": self.value,
            "allowed": sorted(self.allowed),
            "faulty_view": self.faulty_view,
            "queries": {str(p): v for p, v in sorted(self.vector.items())},
            "t": self.t,
        }


@dataclass(frozen=True)
class OracleSpec:
    """Static description of one sanctuary.

    ``phantoms`` are consultants that do not exist in the simulated system;
    the oracle counts them as initially crashed.
    """

    sanctuary: str
    consultants: tuple[int, ...]
    problem: ProblemSpec
    f: int
    mode: Mode = Mode.GENERAL
    policy: str = "prefer0"
    seed: int = 0
    phantoms: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "consultants", tuple(sorted(self.consultants)))
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "phantoms", frozenset(self.phantoms))
        if self.problem.pi != self.consultants:
            raise ParameterError("oracle problem must range over its consultants")
        if not 0 <= self.f <= len(self.consultants) - 1:
            raise ParameterError(f"oracle resiliency {self.f} out of range")
        if self.mode is Mode.CONSISTENT and self.problem.kind != "ktag":
            raise ParameterError("consistent oracles are only defined for k-TAg problems")
        if self.policy not in POLICIES:
            raise ParameterError(f"unknown policy {self.policy!r}")
        if not self.phantoms <= set(self.consultants):
            raise ParameterError("phantoms must be consultants")
        object.__setattr__(self, "_real", tuple(p for p in self.consultants if p not in self.phantoms))

    @property
    def quorum(self) -> int:
        return len(self.consultants) - self.f

    @property
    def real(self) -> tuple[int, ...]:
        return self._real

    def faulty_view(self, pattern: FailurePattern, t: int | None = None) -> int:
        """Faulty consultants seen by the oracle; ``t`` truncates the pattern (sham view)."""
        if t is None:
            return sum(1 for p in self._real if pattern.crash_time(p) is not None) + len(self.phantoms)
        return sum(1 for p in self._real if not pattern.can_act(p, t)) + len(self.phantoms)

    def mode_view(self, pattern: FailurePattern, t: int) -> int:
        return self.faulty_view(pattern, t if self.mode is Mode.SHAM else None)

    def configured(self, mode=None, policy=None, seed=None) -> OracleSpec:
        return replace(
            self,
            mode=Mode(mode) if mode is not None else self.mode,
            policy=policy if policy is not None else self.policy,
            seed=seed if seed is not None else self.seed,
        )

    def to_dict(self) -> dict:
        return {
            "sanctuary": self.sanctuary,
            "consultants": list(self.consultants),
            "problem": {"kind": self.problem.kind, "k": self.problem.k},
            "f": self.f,
            "mode": self.mode.value,
            "policy": self.policy,
            "seed": self.seed,
            "phantoms": sorted(self.phantoms),
        }

    @classmethod
    def from_dict(cls, d: dict) -> OracleSpec:
        consultants = tuple(d["consultants"])
        problem = ProblemSpec(d["problem"]["kind"], consultants, d["problem"]["k"])
        return cls(d["sanctuary"], consultants, problem, d["f"], Mode(d["mode"]), d["policy"],
                   d.get("seed", 0), frozenset(d.get("phantoms", ())))


@dataclass
class Consultation:
    index: int
    queries: dict[int, tuple[int, int]] = field(default_factory=dict)
    answers: dict[int, tuple[int, int]] = field(default_factory=dict)
    committed: int | None = None
    committed_at: int | None = None

    def vector(self, upto: int | None = None) -> dict[int, int]:
        return {p: v for p, (v, t) in self.queries.items() if upto is None or t <= upto}

    def unanswered(self) -> list[int]:
        return [p for p in self.queries if p not in self.answers]


class OracleInstance:
    """Mutable state of one sanctuary during a run."""

    def __init__(self, spec: OracleSpec):
        self.spec = spec
        self.consultations: list[Consultation] = []
        self._queried = {p: 0 for p in spec.consultants}
        self._waiting: dict[int, Consultation] = {}
        self._rng = random.Random(f"{spec.seed}:{spec.sanctuary}")
        self._preference = self._rng.randrange(2)

    # -- intake --------------------------------------------------------------

    def submit_query(self, p: int, v: int, t: int) -> Consultation:
        if p not in self._queried or p in self.spec.phantoms:
            raise ProtocolViolation(f"process {p} is not a consultant of {self.spec.sanctuary}")
        if p in self._waiting:
            raise ProtocolViolation(f"process {p} queried {self.spec.sanctuary} twice without an answer")
        if v not in (0, 1):
            raise ProtocolViolation(f"non-binary query {v!r}")
        index = self._queried[p] + 1
        while len(self.consultations) < index:
            self.consultations.append(Consultation(len(self.consultations) + 1))
        c = self.consultations[index - 1]
        c.queries[p] = (v, t)
        self._queried[p] = index
        self._waiting[p] = c
        return c

    def waiting(self, p: int) -> Consultation | None:
        return self._waiting.get(p)

    def available(self, p: int) -> int | None:
        c = self._waiting.get(p)
        return None if c is None else c.committed

    # -- answering -------------------------------------------------------------

    def legal(self, c: Consultation, pattern: FailurePattern, now: int) -> frozenset[int]:
        """Answers the mode allows for ``c`` right now (no preference applied)."""
        allowed = oracle_allowed(self.spec.problem, self.spec.mode_view(pattern, now), c.vector(now))
        if self.spec.mode is Mode.CONSISTENT:
            allowed = allowed & self._memory_constraint(c)
        return allowed

    def _memory_constraint(self, c: Consultation) -> frozenset[int]:
        out = {0, 1}
        w = c.vector()
        for other in self.consultations:
            if other is c or other.committed is None:
                continue
            if comparable(w, other.vector()):
                out &= {other.committed}
        return frozenset(out)

    def _policy_allowed(self, c: Consultation, pattern: FailurePattern, now: int) -> frozenset[int]:
        spec = self.spec
        if spec.mode is Mode.CONSISTENT:
            # Judge on the correct consultants' queries only, so that a later
            # consultation made of the survivors can still agree with this one.
            correct = pattern.correct
            w = {p: v for p, v in c.vector(now).items() if p in correct}
            return oracle_allowed(spec.problem, spec.faulty_view(pattern), w) & self._memory_constraint(c)
        return oracle_allowed(spec.problem, spec.mode_view(pattern, now), c.vector(now))

    def _pick(self, allowed: frozenset[int]) -> int:
        policy = self.spec.policy
        if policy == "prefer0":
            return 0 if 0 in allowed else 1
        if policy == "prefer1":
            return 1 if 1 in allowed else 0
        if self.spec.mode is Mode.CONSISTENT:
            return self._preference if self._preference in allowed else 1 - self._preference
        return self._rng.choice(sorted(allowed))

    def commit(self, c: Consultation, value: int, pattern: FailurePattern, now: int) -> None:
        """Commit a driver-chosen value; raises :class:`IllegalAnswer` if not allowed."""
        if c.committed is not None:
            if c.committed != value:
                raise IllegalAnswer(self.spec.sanctuary, c.index, value, frozenset({c.committed}),
                                    self.spec.mode_view(pattern, now), c.vector(now), now)
            return
        allowed = self.legal(c, pattern, now)
        if value not in allowed:
            raise IllegalAnswer(self.spec.sanctuary, c.index, value, allowed,
                                self.spec.mode_view(pattern, now), c.vector(now), now)
        c.committed, c.committed_at = value, now

    def try_commit(self, pattern: FailurePattern, now: int) -> bool:
        """Commit every consultation whose quorum is met and whose allowed set is non-empty."""
        changed = False
        for c in self.consultations:
            if c.committed is not None or len(c.queries) < self.spec.quorum:
                continue
            allowed = self._policy_allowed(c, pattern, now)
            if not allowed:
                continue
            c.committed, c.committed_at = self._pick(allowed), now
            changed = True
        return changed

    def poll_answers(self, pattern: FailurePattern, now: int, forced: int | None = None) -> list[tuple[int, int]]:
        """Commit what can be committed and list the deliverable ``(pid, value)`` answers.

        With ``forced`` set, every open consultation is committed to that value
        immediately (no quorum wait), and an illegal forced value raises.
        """
        if forced is None:
            self.try_commit(pattern, now)
        else:
            for c in self.consultations:
                if c.committed is None and c.queries:
                    self.commit(c, forced, pattern, now)
        out = []
        for p, c in sorted(self._waiting.items()):
            if c.committed is not None:
                out.append((p, c.committed))
        return out

    def record_answer(self, p: int, t: int, pattern: FailurePattern | None = None) -> int:
        c = self._waiting.pop(p, None)
        if c is None or c.committed is None:
            raise ProtocolViolation(f"no answer available for process {p} at {self.spec.sanctuary}")
        if pattern is not None:
            # extension and later crashes only widen the allowed set
            allowed = oracle_allowed(self.spec.problem, self.spec.mode_view(pattern, t), c.vector(t))
            assert c.committed in allowed, f"{self.spec.sanctuary}: committed {c.committed} no longer allowed"
        c.answers[p] = (c.committed, t)
        return c.committed


# -- history validation ------------------------------------------------------

def validate_oracle_history(
    events: Sequence[Event],
    pattern: FailurePattern,
    spec: OracleSpec,
    indices: Sequence[int] | None = None,
    complete: bool = True,
) -> Verdict:
    """Judge the Q/A events of one sanctuary.

    ``indices`` maps positions in ``events`` to indices in an enclosing run
    (used as evidence). ``complete`` says whether the history has ended; if
    not, unanswered quorum consultations are INCONCLUSIVE rather than FAIL.
    """
    idx = list(indices) if indices is not None else list(range(len(events)))
    verdict = Verdict()
    bad_form: list[int] = []
    notes: list[str] = []
    asked: dict[int, int] = {}
    open_: dict[int, int] = {}
    cons: dict[int, dict] = {}
    last_t = None

    for gi, e in zip(idx, events):
        if e.kind not in (QUERY, ANSWER) or e.loc != spec.sanctuary:
            bad_form.append(gi)
            notes.append(f"event {gi} is not a Q/A event of {spec.sanctuary}")
            continue
        if last_t is not None and e.t <= last_t:
            bad_form.append(gi)
            notes.append(f"event {gi} out of time order")
        last_t = e.t
        p = e.pid
        if p not in spec.consultants or p in spec.phantoms:
            bad_form.append(gi)
            notes.append(f"process {p} is not a consultant")
            continue
        if e.value not in (0, 1):
            bad_form.append(gi)
            notes.append(f"non-binary value at event {gi}")
            continue
        if e.kind == QUERY:
            if p in open_:
                bad_form.append(gi)
                notes.append(f"process {p} queried twice without an answer")
                continue
            c = asked.get(p, 0) + 1
            asked[p] = c
            open_[p] = c
            cons.setdefault(c, {"q": {}, "a": {}})["q"][p] = (e.value, e.t, gi)
        else:
            if p not in open_:
                bad_form.append(gi)
                notes.append(f"answer to process {p} without a pending query")
                continue
            c = open_.pop(p)
            cons[c]["a"][p] = (e.value, e.t, gi)

    verdict.add("well_formed", Status.FAIL if bad_form else Status.PASS, bad_form, "; ".join(notes[:5]))

    disagree: list[int] = []
    for c in cons.values():
        values = {v for v, _, _ in c["a"].values()}
        if len(values) > 1:
            disagree.extend(gi for _, _, gi in c["a"].values())
    verdict.add("agreement", Status.FAIL if disagree else Status.PASS, disagree)

    def vector_at(c, t):
        return {p: v for p, (v, tq, _) in c["q"].items() if tq <= t}

    unsuitable, unsham = [], []
    for c in cons.values():
        for p, (v, t, gi) in c["a"].items():
            w = vector_at(c, t)
            if v not in oracle_allowed(spec.problem, spec.faulty_view(pattern), w):
                unsuitable.append(gi)
            if spec.mode is Mode.SHAM and v not in oracle_allowed(spec.problem, spec.faulty_view(pattern, t), w):
                unsham.append(gi)
    verdict.add("suitability", Status.FAIL if unsuitable else Status.PASS, unsuitable)

    starved, pending = [], []
    correct = pattern.correct
    for c in cons.values():
        if len(c["q"]) < spec.quorum:
            continue
        for p, (_, _, gi) in c["q"].items():
            if p in correct and p not in c["a"]:
                (starved if complete else pending).append(gi)
    if starved:
        verdict.add("resiliency", Status.FAIL, starved, "correct querier never answered")
    elif pending:
        verdict.add("resiliency", Status.INCONCLUSIVE, pending, "history ended before the answer")
    else:
        verdict.add("resiliency", Status.PASS)

    if spec.mode is Mode.CONSISTENT:
        clash: list[int] = []
        answered = [(c, next(iter(c["a"].values()))) for c in cons.values() if c["a"]]
        for i, (c1, (d1, _, g1)) in enumerate(answered):
            w1 = {p: v for p, (v, _, _) in c1["q"].items()}
            for c2, (d2, _, g2) in answered[i + 1:]:
                w2 = {p: v for p, (v, _, _) in c2["q"].items()}
                if d1 != d2 and comparable(w1, w2):
                    clash.extend((g1, g2))
        verdict.add("consistency", Status.FAIL if clash else Status.PASS, clash)
    else:
        verdict.add("consistency", Status.VACUOUS)

    if spec.mode is Mode.SHAM:
        verdict.add("sham", Status.FAIL if unsham else Status.PASS, unsham)
    else:
        verdict.add("sham", Status.VACUOUS)
    return verdict


def answer_allowed_at(spec: OracleSpec, pattern: FailurePattern, queries: Mapping[int, int], t: int, sham: bool) -> frozenset[int]:
    """Allowed answers for ``queries`` under the full (or, with ``sham``, truncated) failure view."""
    return oracle_allowed(spec.problem, spec.faulty_view(pattern, t if sham else None), queries)
