"""Agreement problems, their decision sets, and the oracle answer sets they induce.

Partial and total input vectors are plain mappings ``pid -> bit``. A problem
is always attached to an explicit process set, so vectors over a subset of
processes (the consultants of an oracle, say) work the same way as vectors
over the whole system.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

NEVER = None

BOTH = frozenset({0, 1})
ZERO = frozenset({0})
ONE = frozenset({1})
EMPTY: frozenset[int] = frozenset()

BRUTEFORCE_LIMIT = 20


class ParameterError(ValueError):
    """Raised for out-of-range task or problem parameters."""


@dataclass(frozen=True)
class FailurePattern:
    """Per-process crash times; ``None`` means the process never crashes.

    A process with crash time ``c`` belongs to ``F(t)`` for every ``t >= c``
    and takes no step at any time ``t >= c``.
    """

    n: int
    crash_times: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        seen = set()
        for pid, t in self.crash_times:
            if not 1 <= pid <= self.n:
                raise ParameterError(f"crash for unknown process {pid}")
            if pid in seen:
                raise ParameterError(f"process {pid} crashes twice")
            if t < 0:
                raise ParameterError(f"negative crash time for process {pid}")
            seen.add(pid)
        object.__setattr__(self, "crash_times", tuple(sorted(self.crash_times)))
        object.__setattr__(self, "_times", dict(self.crash_times))

    @classmethod
    def failure_free(cls, n: int) -> FailurePattern:
        return cls(n)

    @classmethod
    def from_schedule(cls, n: int, schedule: Iterable[tuple[int, int]]) -> FailurePattern:
        return cls(n, tuple((int(p), int(t)) for p, t in schedule))

    @property
    def pids(self) -> range:
        return range(1, self.n + 1)

    def crash_time(self, pid: int) -> int | None:
        return self._times.get(pid, NEVER)

    def crashed(self, t: int) -> frozenset[int]:
        """F(t): processes crashed at or before ``t``."""
        return frozenset(p for p, c in self.crash_times if c <= t)

    def can_act(self, pid: int, t: int) -> bool:
        c = self._times.get(pid)
        return c is None or t < c

    @property
    def faulty(self) -> frozenset[int]:
        return frozenset(self._times)

    @property
    def correct(self) -> frozenset[int]:
        return frozenset(p for p in self.pids if p not in self._times)

    def truncate(self, theta: int) -> FailurePattern:
        """F_theta: crashes after ``theta`` never happen."""
        return FailurePattern(self.n, tuple((p, c) for p, c in self.crash_times if c <= theta))

    def next_crash_after(self, t: int) -> int | None:
        later = [c for _, c in self.crash_times if c > t]
        return min(later) if later else None


@dataclass(frozen=True)
class ProblemSpec:
    """k-TAg (``kind="ktag"``) or Weak Agreement (``kind="wag"``) over ``pi``."""

    kind: str
    pi: tuple[int, ...]
    k: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "pi", tuple(sorted(self.pi)))
        if len(set(self.pi)) != len(self.pi) or not self.pi:
            raise ParameterError("process set must be non-empty and duplicate-free")
        if self.kind == "ktag":
            if self.k is None or not 1 <= self.k <= len(self.pi):
                raise ParameterError(f"threshold k={self.k} outside 1..{len(self.pi)}")
        elif self.kind == "wag":
            if self.k is not None:
                raise ParameterError("weak agreement takes no threshold")
        else:
            raise ParameterError(f"unknown problem kind {self.kind!r}")

    @property
    def size(self) -> int:
        return len(self.pi)

    @property
    def label(self) -> str:
        if self.kind == "wag":
            return f"WAg[{self.size}]"
        return f"{self.k}-TAg[{self.size}]"


@dataclass(frozen=True)
class TaskSpec:
    problem: ProblemSpec
    f: int

    def __post_init__(self):
        if not 0 <= self.f <= self.problem.size - 1:
            raise ParameterError(f"resiliency f={self.f} outside 0..{self.problem.size - 1}")

    @property
    def n(self) -> int:
        return self.problem.size

    @property
    def label(self) -> str:
        if self.problem.kind == "wag":
            return f"WAg({self.n},{self.f})"
        return f"{self.problem.k}-TAg({self.n},{self.f})"


def process_set(n: int) -> tuple[int, ...]:
    return tuple(range(1, n + 1))


def ktag(k: int, n: int, f: int, pi: Iterable[int] | None = None) -> TaskSpec:
    return TaskSpec(ProblemSpec("ktag", tuple(pi) if pi is not None else process_set(n), k), f)


def cons(n: int, f: int) -> TaskSpec:
    return ktag(n, n, f)


def atomic_commitment(n: int, f: int) -> TaskSpec:
    return ktag(1, n, f)


def wag(n: int, f: int) -> TaskSpec:
    return TaskSpec(ProblemSpec("wag", process_set(n)), f)


def parse_task(text: str) -> TaskSpec:
    """Parse ``ktag:k,n,f``, ``cons:n,f``, ``ac:n,f`` or ``wag:n,f``."""
    try:
        kind, _, rest = text.partition(":")
        nums = [int(x) for x in rest.split(",")]
        if kind == "ktag":
            k, n, f = nums
            return ktag(k, n, f)
        n, f = nums
    except ValueError as exc:
        raise ParameterError(f"bad task {text!r}") from exc
    if kind == "cons":
        return cons(n, f)
    if kind == "ac":
        return atomic_commitment(n, f)
    if kind == "wag":
        return wag(n, f)
    raise ParameterError(f"unknown task kind {kind!r}")


# -- vectors -----------------------------------------------------------------

def extends(w1: Mapping[int, int], w2: Mapping[int, int]) -> bool:
    """True iff ``w1 >= w2`` in the extension order."""
    return all(p in w1 and w1[p] == v for p, v in w2.items())


def comparable(w1: Mapping[int, int], w2: Mapping[int, int]) -> bool:
    return extends(w1, w2) or extends(w2, w1)


def zeros_plus_missing(pi: Iterable[int], w: Mapping[int, int]) -> int:
    return sum(1 for p in pi if w.get(p, 0) == 0)


def _check_vector(problem: ProblemSpec, w: Mapping[int, int], total: bool) -> None:
    members = set(problem.pi)
    for p, v in w.items():
        if p not in members:
            raise ParameterError(f"process {p} not in {problem.pi}")
        if v not in (0, 1):
            raise ParameterError(f"non-binary value {v!r} for process {p}")
    if total and len(w) != len(members):
        raise ParameterError("input vector is not total")


def _check_faulty(problem: ProblemSpec, faulty_count: int) -> None:
    if not 0 <= faulty_count <= problem.size:
        raise ParameterError(f"faulty count {faulty_count} outside 0..{problem.size}")


# -- decision sets -----------------------------------------------------------

def decision_set(problem: ProblemSpec, faulty_count: int, v: Mapping[int, int]) -> frozenset[int]:
    """Admissible decision values for total input ``v`` with ``faulty_count`` crashes."""
    _check_faulty(problem, faulty_count)
    _check_vector(problem, v, total=True)
    zeros = sum(1 for p in problem.pi if v[p] == 0)
    if problem.kind == "ktag":
        if zeros >= problem.k:
            return ZERO
        if zeros == 0 and faulty_count <= problem.k - 1:
            return ONE
        return BOTH
    if faulty_count == 0 and zeros == problem.size:
        return ZERO
    if faulty_count == 0 and zeros == 0:
        return ONE
    return BOTH


def decision_set_for(problem: ProblemSpec, pattern: FailurePattern, v: Mapping[int, int]) -> frozenset[int]:
    return decision_set(problem, len(pattern.faulty & set(problem.pi)), v)


def oracle_allowed(problem: ProblemSpec, faulty_count: int, w: Mapping[int, int]) -> frozenset[int]:
    """Values an oracle suitable for ``problem`` may answer on query vector ``w``.

    This is the intersection of :func:`decision_set` over every total extension
    of ``w``. An empty result means no answer is safe yet.
    """
    _check_faulty(problem, faulty_count)
    _check_vector(problem, w, total=False)
    values = set(w.values())
    if problem.kind == "ktag":
        k = problem.k
        out = set()
        if zeros_plus_missing(problem.pi, w) <= k - 1:
            out.add(1)
        if not (0 not in values and faulty_count <= k - 1):
            out.add(0)
        return frozenset(out)
    # weak agreement: only the uniform extensions with no failures restrict the answer
    out = set()
    if 0 in values or faulty_count > 0:
        out.add(0)
    if 1 in values or faulty_count > 0:
        out.add(1)
    return frozenset(out)


def oracle_allowed_bruteforce(problem: ProblemSpec, faulty_count: int, w: Mapping[int, int]) -> frozenset[int]:
    """Literal enumeration of every total extension of ``w``."""
    if problem.size > BRUTEFORCE_LIMIT:
        raise ParameterError(f"enumeration bound exceeded ({problem.size} > {BRUTEFORCE_LIMIT})")
    _check_faulty(problem, faulty_count)
    _check_vector(problem, w, total=False)
    missing = [p for p in problem.pi if p not in w]
    out = set(BOTH)
    for bits in itertools.product((0, 1), repeat=len(missing)):
        v = dict(w)
        v.update(zip(missing, bits))
        out &= decision_set(problem, faulty_count, v)
    return frozenset(out)


# -- generalization ----------------------------------------------------------

@dataclass(frozen=True)
class GeneralizationResult:
    holds: bool
    faulty_count: int | None = None
    inputs: dict[int, int] | None = field(default=None, compare=False)
    decision: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.holds


def is_generalization(t1: TaskSpec, t2: TaskSpec) -> GeneralizationResult:
    """Decide whether ``t2`` is a generalization of ``t1``.

    That is: every solution of ``t2`` solves ``t1``. On failure the result
    carries a witness ``(faulty_count, inputs, decision)`` where ``decision``
    is admissible for ``t2`` but not for ``t1``.
    """
    if t1.problem.pi != t2.problem.pi:
        raise ParameterError("tasks are over different process sets")
    if t1.n > 12:
        raise ParameterError("generalization check is exhaustive; n must be <= 12")
    if t1.f > t2.f:
        return GeneralizationResult(False, reason=f"f1={t1.f} exceeds f2={t2.f}")
    pi = t1.problem.pi
    for m in range(t1.f + 1):
        for bits in itertools.product((0, 1), repeat=len(pi)):
            v = dict(zip(pi, bits))
            extra = decision_set(t2.problem, m, v) - decision_set(t1.problem, m, v)
            if extra:
                return GeneralizationResult(False, m, v, min(extra), "decision set not included")
    return GeneralizationResult(True)
