from __future__ import annotations

from dataclasses import replace

from hypothesis import given, settings, strategies as st

from ktag.checker import TASK_CONDITIONS, check_all, check_task_conditions, rounds_used
from ktag.events import LOCAL, Event
from ktag.protocols import build_protocol
from ktag.runtime import BOUND, QUIESCENT, Run, simulate
from ktag.tasks import FailurePattern, ktag, wag
from ktag.verdict import Status


def decided(inputs, decisions, pattern=None, stopped=QUIESCENT):
    """A run made only of D events, ``decisions`` as (pid, value) pairs."""
    n = len(inputs)
    events = [Event(t, LOCAL, p, "D", {"value": v}) for t, (p, v) in enumerate(decisions, start=1)]
    return Run(tuple(inputs), pattern or FailurePattern.failure_free(n), events, stopped=stopped)


def test_fig4_clean_run_passes_everything():
    proto = build_protocol("fig4", 2, 1)
    run = simulate(proto, (1, 1))
    v = check_all(run, ktag(2, 2, 1), proto)
    assert run.decided_values() == {1: 1, 2: 1}
    assert v.ok
    assert all(v.status(c) is Status.PASS for c in TASK_CONDITIONS if c != "validity_zero")
    assert v.status("validity_zero") is Status.VACUOUS


def test_split_decisions_fail_agreement():
    v = check_task_conditions(decided((0, 1), [(1, 0), (2, 1)]), ktag(2, 2, 1))
    assert v.status("agreement") is Status.FAIL
    assert v["agreement"].evidence == [0, 1]
    assert v.status("termination") is Status.PASS


def test_too_many_crashes_is_vacuous():
    pattern = FailurePattern.from_schedule(3, [(1, 0), (2, 0)])
    v = check_task_conditions(decided((0, 0, 0), [(3, 1)], pattern), ktag(1, 3, 1))
    assert {c.status for c in v.conditions} == {Status.VACUOUS}


def test_validity_parts():
    task = ktag(2, 3, 1)
    v = check_task_conditions(decided((0, 0, 1), [(1, 1), (2, 1), (3, 1)]), task)
    assert v.status("validity_zero") is Status.FAIL and v.status("validity_one") is Status.VACUOUS
    v = check_task_conditions(decided((1, 1, 1), [(1, 0), (2, 0), (3, 0)]), task)
    assert v.status("validity_one") is Status.FAIL and v.status("validity_zero") is Status.VACUOUS
    # with k-1 = 1 crash, 1 is still forced; with none of the inputs zero, 0 is not
    crashed = FailurePattern.from_schedule(3, [(3, 0)])
    v = check_task_conditions(decided((1, 1, 1), [(1, 0), (2, 0)], crashed), task)
    assert v.status("validity_one") is Status.FAIL


def test_wag_validity_needs_no_failures():
    task = wag(3, 1)
    assert check_task_conditions(decided((0, 0, 0), [(1, 1), (2, 1), (3, 1)]), task).status("validity_zero") \
        is Status.FAIL
    crashed = FailurePattern.from_schedule(3, [(3, 0)])
    v = check_task_conditions(decided((0, 0, 0), [(1, 1), (2, 1)], crashed), task)
    assert v.ok and v.status("validity_zero") is Status.VACUOUS


def test_termination_fail_versus_inconclusive():
    task = ktag(1, 3, 1)
    assert check_task_conditions(decided((0, 0, 0), [(1, 0)]), task).status("termination") is Status.FAIL
    bounded = decided((0, 0, 0), [(1, 0)], stopped=BOUND)
    assert check_task_conditions(bounded, task).status("termination") is Status.INCONCLUSIVE
    crashed = FailurePattern.from_schedule(3, [(2, 0)])
    assert check_task_conditions(decided((0, 0, 0), [(1, 0), (3, 0)], crashed), task).status("termination") \
        is Status.PASS


def test_decisions_of_later_crashed_processes_count():
    pattern = FailurePattern.from_schedule(2, [(1, 5)])
    v = check_task_conditions(decided((0, 1), [(1, 0), (2, 1)], pattern), ktag(2, 2, 1))
    assert v.status("agreement") is Status.FAIL


def test_changed_mind_fails_irrevocability():
    v = check_task_conditions(decided((0, 1), [(1, 0), (2, 0), (1, 1)]), ktag(2, 2, 1))
    assert v.status("irrevocability") is Status.FAIL
    assert v.status("agreement") is Status.FAIL


def test_repeated_identical_decisions_are_fine():
    v = check_task_conditions(decided((0, 1), [(1, 0), (2, 0), (1, 0)]), ktag(2, 2, 1))
    assert v.ok


def test_judging_ignores_the_protocol():
    # same inputs, pattern and decisions, different histories otherwise: same task verdict
    proto = build_protocol("fig1", 3, 1)
    run = simulate(proto, (0, 1, 1))
    only_d = replace(run, events=[e for e in run.events if e.kind == "D"])
    assert check_task_conditions(run, proto.target).to_dict() == check_task_conditions(only_d, proto.target).to_dict()


def test_rounds_used():
    assert rounds_used(simulate(build_protocol("fig1", 3, 1), (0, 1, 1))) == 0
    fig2 = build_protocol("fig2", 3, 1).with_oracles(policy="prefer0")
    assert rounds_used(simulate(fig2, (1, 1, 1))) == 0
    # a crash lets the oracle answer 0 to the second query, which starts the round loop
    crashed = FailurePattern.from_schedule(3, [(3, 4)])
    assert rounds_used(simulate(fig2, (1, 1, 1), crashed)) == 2


SEVERITY = {Status.FAIL}


@settings(max_examples=200)
@given(
    st.lists(st.sampled_from((0, 1)), min_size=2, max_size=4),
    st.lists(st.tuples(st.integers(1, 4), st.sampled_from((0, 1))), max_size=6),
    st.lists(st.tuples(st.integers(1, 4), st.sampled_from((0, 1))), max_size=4),
    st.integers(1, 4),
)
def test_validity_failures_survive_more_events(inputs, first, more, k):
    n = len(inputs)
    k = min(k, n)
    first = [(min(p, n), v) for p, v in first]
    more = [(min(p, n), v) for p, v in more]
    task = ktag(k, n, n - 1)
    before = check_task_conditions(decided(inputs, first), task)
    after = check_task_conditions(decided(inputs, first + more), task)
    for name in ("validity_zero", "validity_one", "agreement", "irrevocability"):
        if before.status(name) in SEVERITY:
            assert after.status(name) in SEVERITY
