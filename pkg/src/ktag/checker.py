"""Black-box judging of a run against a task.

Task conditions look only at the failure pattern, the inputs and the D
events; protocol intent never enters.
"""
from __future__ import annotations

from .events import DECIDE
from .runtime import BOUND, QUIESCENT, Run, validate_run_structure
from .tasks import TaskSpec
from .verdict import Status, Verdict

TASK_CONDITIONS = ("termination", "agreement", "irrevocability", "validity_zero", "validity_one")


def check_task_conditions(run: Run, task: TaskSpec) -> Verdict:
    """Termination, agreement, irrevocability and both validity parts.

    With more than ``task.f`` faulty processes every condition is VACUOUS.
    """
    verdict = Verdict()
    if task.n != run.n:
        raise ValueError(f"task is over {task.n} processes, run over {run.n}")
    faulty = run.pattern.faulty
    m = len(faulty)
    if m > task.f:
        for name in TASK_CONDITIONS:
            verdict.add(name, Status.VACUOUS, detail=f"{m} faulty exceeds f={task.f}")
        return verdict

    decides = [(i, e) for i, e in enumerate(run.events) if e.kind == DECIDE]
    first: dict[int, int] = {}
    for i, e in decides:
        first.setdefault(e.pid, i)

    undecided = sorted(run.pattern.correct - {e.pid for _, e in decides})
    if not undecided:
        verdict.add("termination", Status.PASS)
    elif run.stopped == QUIESCENT:
        # evidence: the last event of each undecided correct process, if any
        last = {}
        for i, e in enumerate(run.events):
            if e.pid in undecided:
                last[e.pid] = i
        verdict.add("termination", Status.FAIL, last.values(), f"correct processes {undecided} never decide")
    else:
        verdict.add("termination", Status.INCONCLUSIVE, detail=f"stopped at {run.stopped} with {undecided} undecided")

    values = {e.value for _, e in decides}
    if len(values) > 1:
        # one witness per value: the earliest decision of each
        wit = [next(i for i, e in decides if e.value == v) for v in sorted(values)]
        verdict.add("agreement", Status.FAIL, wit, "decisions " + ", ".join(
            f"p{run.events[i].pid}={run.events[i].value}" for i in wit))
    else:
        verdict.add("agreement", Status.PASS)

    flips = []
    for p, i0 in first.items():
        v0 = run.events[i0].value
        flips.extend(i for i, e in decides if e.pid == p and e.value != v0)
    if flips:
        verdict.add("irrevocability", Status.FAIL, flips + [first[run.events[i].pid] for i in flips])
    else:
        verdict.add("irrevocability", Status.PASS)

    problem = task.problem
    zeros = sum(1 for b in run.inputs if b == 0)
    if problem.kind == "ktag":
        zero_forced = zeros >= problem.k
        one_forced = zeros == 0 and m <= problem.k - 1
    else:
        zero_forced = zeros == run.n and m == 0
        one_forced = zeros == 0 and m == 0
    for name, forced, want in (("validity_zero", zero_forced, 0), ("validity_one", one_forced, 1)):
        if not forced:
            verdict.add(name, Status.VACUOUS)
            continue
        bad = [i for i, e in decides if e.value != want]
        if bad:
            verdict.add(name, Status.FAIL, bad, f"inputs force {want}")
        else:
            verdict.add(name, Status.PASS)
    return verdict


def check_all(run: Run, task: TaskSpec, protocol=None) -> Verdict:
    """Structure (including oracle histories) plus task conditions."""
    verdict = Verdict()
    verdict.extend(validate_run_structure(run, protocol), prefix="structure.")
    verdict.extend(check_task_conditions(run, task))
    return verdict


def rounds_used(run: Run) -> int:
    """Highest protocol round mentioned by any message (0 for round-free protocols)."""
    best = 0
    for e in run.events:
        if e.kind == "S":
            body = e.payload.get("body", ())
            if len(body) == 3 and body[0] in ("R", "P"):
                best = max(best, body[2])
    return best


__all__ = ["BOUND", "QUIESCENT", "TASK_CONDITIONS", "check_all", "check_task_conditions", "rounds_used"]
