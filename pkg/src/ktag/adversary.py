"""Counterexample schedules against candidate reductions.

Both drivers take a concrete candidate protocol and build the runs that
an impossibility argument would use against it, then judge them. They
demonstrate the phenomenon for that candidate only.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .checker import check_all
from .events import DECIDE
from .oracles import IllegalAnswer, Mode, answer_allowed_at
from .protocols import Protocol, build_protocol
from .runtime import DEFAULT_BOUND, Engine, FairRoundRobin, Run, fair_extension, flip_inputs, simulate
from .tasks import FailurePattern, ParameterError, ktag
from .verdict import Status, Verdict

FOUND, BLOCKED, INCONCLUSIVE, NOT_FOUND = "FAIL_FOUND", "BLOCKED", "INCONCLUSIVE", "NO_FAIL"


@dataclass
class Demonstration:
    construction: str
    outcome: str
    runs: dict[str, Run] = field(default_factory=dict)
    verdicts: dict[str, Verdict] = field(default_factory=dict)
    blocked: dict | None = None
    detail: str = ""

    def failing(self) -> dict[str, list[str]]:
        """Run name -> names of failed conditions."""
        return {name: [c.name for c in v.failures()] for name, v in self.verdicts.items() if v.failures()}

    def to_dict(self) -> dict:
        return {
            "construction": self.construction,
            "outcome": self.outcome,
            "detail": self.detail,
            "blocked": self.blocked,
            "verdicts": {k: v.to_dict() for k, v in self.verdicts.items()},
        }


def _candidate(candidate, n: int, f: int, k: int | None) -> Protocol:
    if isinstance(candidate, Protocol):
        return candidate
    return build_protocol(candidate, n, f, k, strict=False)


# -- first construction: wait-free consensus oracle cannot give k-TAg ---------------------------

def build_ir1(candidate, n: int, f: int, k: int, step_bound: int = DEFAULT_BOUND) -> Demonstration:
    """Three runs against a candidate using one wait-free consensus oracle.

    ``rho``: inputs all 1, the ``k`` lowest processes crashed from the start,
    round-robin scheduling, oracle preferring 0. ``rho_flipped``: the same
    history with the silent processes' inputs set to 0. ``rho0``: the prefix of
    ``rho`` up to its last decision, extended failure-free by the echo rule.
    A correct candidate would pass all three; the driver reports which fail.
    """
    if not 1 <= k <= f <= n - 1:
        raise ParameterError("need 1 <= k <= f <= n-1")
    proto = _candidate(candidate, n, f, k).with_oracles(mode=Mode.GENERAL, policy="prefer0")
    if len(proto.oracles) != 1:
        raise ParameterError("candidate must use exactly one oracle")
    spec = proto.oracles[0]
    if (spec.consultants != tuple(range(1, n + 1)) or spec.problem.kind != "ktag"
            or spec.problem.k != n or spec.f != n - 1):
        raise ParameterError("candidate oracle must be wait-free consensus over all processes")
    task = ktag(k, n, f)
    silent = list(range(1, k + 1))
    pattern = FailurePattern.from_schedule(n, [(p, 0) for p in silent])
    rho = simulate(proto, (1,) * n, pattern, scheduler=FairRoundRobin(), step_bound=step_bound)
    demo = Demonstration("ir1", NOT_FOUND)
    demo.runs["rho"] = rho
    demo.verdicts["rho"] = check_all(rho, task, proto)
    decide_times = [e.t for e in rho.events if e.kind == DECIDE]
    if not decide_times:
        demo.outcome = INCONCLUSIVE
        demo.detail = "candidate made no decision within the step bound"
        return demo
    flipped = flip_inputs(rho, silent, 0)
    demo.runs["rho_flipped"] = flipped
    demo.verdicts["rho_flipped"] = check_all(flipped, task, proto)
    t0 = max(decide_times)
    rho0 = fair_extension(rho.prefix(t0), proto, rule="echo", step_bound=step_bound)
    demo.runs["rho0"] = rho0
    demo.verdicts["rho0"] = check_all(rho0, task, proto)
    fails = demo.failing()
    if fails:
        demo.outcome = FOUND
        demo.detail = "; ".join(f"{name}: {', '.join(conds)}" for name, conds in fails.items())
    elif any(v.overall is Status.INCONCLUSIVE for v in demo.verdicts.values()):
        demo.outcome = INCONCLUSIVE
        demo.detail = "a run hit the step bound"
    return demo


# -- second construction: no reduction when a majority may crash --------------------------------

def ir3_partition(n: int, f: int) -> tuple[list[int], list[int], list[int]]:
    """(group of size f, its lowest 2f-n members, the remaining n-f processes)."""
    first = list(range(1, f + 1))
    return first, first[: 2 * f - n], list(range(f + 1, n + 1))


def build_ir3(candidate, n: int, f: int, mode: str | Mode = Mode.GENERAL,
              step_bound: int = DEFAULT_BOUND) -> Demonstration:
    """Splice two partition runs into one run without crashes until both sides decide.

    ``rho_prime``: only the f-group minus its low members runs (inputs 0),
    every answer forced to 0. ``rho_dblprime``: only the other n-f processes
    run (inputs 1), started after the first side decided, answers forced to
    0. ``merged``: both histories in sequence, the f-group crashing only
    afterwards, then a fair extension. Under sham oracles the spliced forced
    answers become illegal and the construction is BLOCKED.
    """
    if not (n <= 2 * f <= 2 * (n - 1)):
        raise ParameterError("need n <= 2f <= 2(n-1)")
    mode = Mode(mode)
    base = _candidate(candidate, n, f, None)
    if len(base.oracles) != 1:
        raise ParameterError("candidate must use exactly one oracle")
    general = base.with_oracles(mode=Mode.GENERAL)
    group, low, rest = ir3_partition(n, f)
    runners = [p for p in group if p not in low]
    inputs = tuple(0 if p in group else 1 for p in range(1, n + 1))
    task = base.target
    demo = Demonstration("ir3", NOT_FOUND)

    f1 = FailurePattern.from_schedule(n, [(p, 0) for p in low + rest])
    eng1 = Engine(general, inputs, f1)
    stopped = eng1.run(FairRoundRobin(), step_bound, "forced:0")
    rho1 = eng1.to_run(stopped, FairRoundRobin(), step_bound, "forced:0")
    demo.runs["rho_prime"] = rho1
    demo.verdicts["rho_prime"] = check_all(rho1, task, general)
    theta1 = rho1.first_time_all_decided(runners)
    if theta1 is None:
        demo.outcome = INCONCLUSIVE
        demo.detail = "first side never decides within the step bound"
        return demo

    f2 = FailurePattern.from_schedule(n, [(p, 0) for p in group])
    eng2 = Engine(general, inputs, f2, start_time=theta1)
    stopped = eng2.run(FairRoundRobin(), step_bound, "forced:0")
    rho2 = eng2.to_run(stopped, FairRoundRobin(), step_bound, "forced:0")
    demo.runs["rho_dblprime"] = rho2
    demo.verdicts["rho_dblprime"] = check_all(rho2, task, general)
    theta2 = rho2.first_time_all_decided(rest)
    if theta2 is None:
        demo.outcome = INCONCLUSIVE
        demo.detail = "second side never decides within the step bound"
        return demo

    proto = base.with_oracles(mode=mode)
    pattern = FailurePattern.from_schedule(n, [(p, theta2 + 1) for p in group])
    spliced = [e for e in rho1.events if e.t <= theta1] + [e for e in rho2.events if e.t <= theta2]
    eng = Engine(proto, inputs, pattern)
    try:
        eng.replay(spliced, check_answers=True)
    except IllegalAnswer as exc:
        if mode is not Mode.SHAM:
            raise AssertionError(f"forced answer rejected under {mode.value} oracle: {exc}") from exc
        spec = proto.oracles[0]
        view = answer_allowed_at(spec, pattern, exc.vector, exc.t, sham=True)
        demo.outcome = BLOCKED
        demo.blocked = {**exc.to_dict(), "allowed_under_prefix": sorted(view), "certified": exc.value not in view}
        shown = sorted(view) if view else "nothing"
        demo.detail = (f"answer {exc.value} at t={exc.t} is illegal: with {spec.faulty_view(pattern, exc.t)} "
                       f"crash(es) visible the oracle may answer {shown}")
        return demo
    scheduler = FairRoundRobin()
    stopped = eng.run(scheduler, step_bound, "forced:0")
    merged = eng.to_run(stopped, scheduler, step_bound, "forced:0")
    demo.runs["merged"] = merged
    demo.verdicts["merged"] = check_all(merged, task, proto)
    fails = demo.failing()
    if "merged" in fails:
        demo.outcome = FOUND
        demo.detail = "merged: " + ", ".join(fails["merged"])
    elif any(v.overall is Status.INCONCLUSIVE for v in demo.verdicts.values()):
        demo.outcome = INCONCLUSIVE
        demo.detail = "a run hit the step bound"
    return demo
