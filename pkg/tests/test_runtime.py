from __future__ import annotations

from collections import Counter
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from ktag import trace
from ktag.checker import check_all
from ktag.events import BUFFER, RECEIVE, SEND, Event
from ktag.oracles import Mode, ProtocolViolation
from ktag.protocols import ORACLE, Protocol, build_protocol
from ktag.runtime import (
    BOUND,
    QUIESCENT,
    SCRIPT_END,
    FairRoundRobin,
    ProcessAutomaton,
    Query,
    RandomScheduler,
    ScheduleError,
    ScriptScheduler,
    fair_extension,
    flip_inputs,
    parse_crashes,
    parse_inputs,
    simulate,
    validate_run_structure,
)
from ktag.tasks import FailurePattern, ParameterError, ktag
from ktag.verdict import Status


class Echo(ProcessAutomaton):
    def start(self):
        return [self.decide(self.bit)]


class DoubleQuery(ProcessAutomaton):
    def start(self):
        return [Query(ORACLE, self.bit), Query(ORACLE, self.bit)]


def trivial(n=1):
    return Protocol("echo", n, Echo, (), ktag(1, n, 0))


# -- parsing --

def test_parse_helpers():
    assert parse_inputs("0110") == (0, 1, 1, 0)
    fp = parse_crashes("2@5, 3@0", 3)
    assert (fp.crash_time(1), fp.crash_time(2), fp.crash_time(3)) == (None, 5, 0)
    assert parse_crashes("", 3).faulty == frozenset()
    for bad in ("012", "1x"):
        with pytest.raises(ParameterError):
            parse_inputs(bad)
    with pytest.raises(ParameterError):
        parse_inputs("01", 3)
    with pytest.raises(ParameterError):
        parse_crashes("2-5", 3)


# -- simulate --

@pytest.mark.parametrize("bit", [0, 1])
def test_single_process_decides_its_input(bit):
    run = simulate(trivial(), (bit,))
    assert len(run.events) <= 2
    assert run.decided_values() == {1: bit}
    assert run.stopped == QUIESCENT


def test_fig1_unanimous_ones_round_robin():
    proto = build_protocol("fig1", 3, 1).with_oracles(policy="prefer1")
    run = simulate(proto, (1, 1, 1), scheduler=FairRoundRobin())
    assert run.decided_values() == {1: 1, 2: 1, 3: 1}
    assert check_all(run, proto.target, proto).ok


def test_fig1_random_seeds_agree_on_verdict():
    proto = build_protocol("fig1", 3, 1).with_oracles(policy="prefer1")
    histories = set()
    for seed in range(100):
        run = simulate(proto, (1, 1, 1), scheduler=RandomScheduler(seed))
        v = check_all(run, proto.target, proto)
        assert v.ok and run.decided_values() == {1: 1, 2: 1, 3: 1}
        histories.add(tuple(run.events))
    assert len(histories) > 1


def test_simulate_is_deterministic():
    proto = build_protocol("fig2", 5, 2)
    pattern = FailurePattern.from_schedule(5, [(2, 7), (4, 30)])
    dumps = {trace.dumps(simulate(proto, (1, 0, 1, 1, 0), pattern, scheduler=RandomScheduler(3), seed=3))
             for _ in range(3)}
    assert len(dumps) == 1


def test_double_query_surfaces_with_event():
    cons = build_protocol("naive", 2, 1, 1).oracles
    proto = Protocol("dq", 2, DoubleQuery, cons, ktag(1, 2, 1))
    with pytest.raises(ProtocolViolation) as err:
        simulate(proto, (1, 1))
    assert err.value.event is not None and err.value.event.kind == "Q"


def test_bad_arguments():
    proto = build_protocol("fig1", 3, 1)
    with pytest.raises(ParameterError):
        simulate(proto, (1, 1, 1), step_bound=0)
    with pytest.raises(ParameterError):
        simulate(proto, (1, 1, 1), FailurePattern.failure_free(4))


def test_step_bound_stops_the_run():
    proto = build_protocol("fig1", 3, 1)
    run = simulate(proto, (1, 1, 1), step_bound=4)
    assert len(run.events) == 4 and run.stopped == BOUND
    v = validate_run_structure(run, proto)
    assert v.status("fairness") is Status.PASS
    assert v.status("oracle_history") in (Status.PASS, Status.INCONCLUSIVE)


def test_script_scheduler():
    run = simulate(trivial(2), (0, 1), scheduler=ScriptScheduler([2, 1]))
    assert [e.pid for e in run.events] == [2, 1]
    run = simulate(trivial(2), (0, 1), scheduler=ScriptScheduler([2]))
    assert run.stopped == SCRIPT_END and len(run.events) == 1
    with pytest.raises(ScheduleError):
        simulate(trivial(2), (0, 1), scheduler=ScriptScheduler([2, 2]))


def test_no_steps_after_crash():
    proto = build_protocol("fig1", 3, 1)
    run = simulate(proto, (0, 1, 1), FailurePattern.from_schedule(3, [(1, 3)]))
    assert all(e.t < 3 for e in run.events if e.pid == 1)
    assert check_all(run, proto.target, proto).ok


# -- channels --

def test_channels_balance_at_quiescence():
    proto = build_protocol("fig4", 4, 2)
    run = simulate(proto, (1, 1, 0, 1), scheduler=FairRoundRobin())
    sent = Counter()
    for e in run.events:
        if e.kind == SEND:
            for d in e.payload["to"]:
                sent[(e.t, d)] += 1
    got = Counter((e.payload["sent"], e.pid) for e in run.events if e.kind == RECEIVE)
    assert run.stopped == QUIESCENT and sent == got


def test_receive_without_send_fails_channels():
    run = simulate(trivial(2), (0, 1))
    forged = Event(run.last_time + 1, BUFFER, 1, RECEIVE, {"src": 2, "sent": 99, "body": ("x",)})
    bad = replace(run, events=run.events + [forged])
    v = validate_run_structure(bad)
    assert v.status("channels") is Status.FAIL and v["channels"].evidence == [2]


def test_replay_detects_foreign_actions():
    run = simulate(trivial(2), (0, 1))
    wrong = replace(run, events=[replace(run.events[0], payload={"value": 1 - run.events[0].value})] + run.events[1:])
    assert validate_run_structure(wrong, trivial(2)).status("replay") is Status.FAIL
    assert validate_run_structure(wrong).status("replay") is Status.VACUOUS


def test_crash_silence_violation():
    run = simulate(trivial(2), (0, 1))
    late = replace(run, pattern=FailurePattern.from_schedule(2, [(1, 1)]))
    assert validate_run_structure(late).status("crash_silence") is Status.FAIL


def test_unfinished_quiescent_run_fails_fairness():
    proto = build_protocol("fig1", 3, 1)
    run = simulate(proto, (1, 1, 1), step_bound=5)
    assert validate_run_structure(replace(run, stopped=QUIESCENT), proto).status("fairness") is Status.FAIL


# -- input flipping --

def _silent_run():
    proto = build_protocol("naive", 3, 1, 1)
    pattern = FailurePattern.from_schedule(3, [(1, 0)])
    return proto, simulate(proto, (1, 1, 1), pattern, scheduler=FairRoundRobin())


def test_flip_silent_process():
    proto, run = _silent_run()
    flipped = flip_inputs(run, {1}, 0)
    assert flipped.inputs == (0, 1, 1) and flipped.events == run.events
    assert validate_run_structure(flipped, proto).ok
    assert flip_inputs(flipped, {1}, 1) == run


def test_flip_empty_set_is_identity():
    _, run = _silent_run()
    assert flip_inputs(run, set(), 0) == run


def test_flip_active_process_refused():
    _, run = _silent_run()
    with pytest.raises(ParameterError):
        flip_inputs(run, {2}, 0)


# -- fair extension --

def test_extension_of_empty_prefix():
    proto = build_protocol("fig1", 3, 1)
    empty = simulate(proto, (1, 1, 1)).prefix(0)
    assert empty.events == []
    ext = fair_extension(empty, proto)
    assert ext.decided_values() == {1: 1, 2: 1, 3: 1}
    assert ext.pattern.faulty == frozenset()
    assert validate_run_structure(ext, proto).ok


def test_extension_of_finished_run_is_unchanged():
    proto = build_protocol("fig1", 3, 1)
    run = simulate(proto, (0, 1, 1), scheduler=FairRoundRobin())
    assert fair_extension(run, proto).events == run.events


def test_extension_echoes_query_values():
    proto = build_protocol("naive", 3, 1, 1)
    pattern = FailurePattern.from_schedule(3, [(1, 0)])
    run = simulate(proto, (1, 1, 1), pattern, scheduler=FairRoundRobin())
    first = min(e.t for e in run.events if e.kind == "D")
    ext = fair_extension(run.prefix(first), proto)
    # p1 joins late; its answer repeats the value already committed
    assert ext.decided_values() == {1: 1, 2: 1, 3: 1}
    assert ext.events[: len(run.prefix(first).events)] == run.prefix(first).events


# -- serialization --

def test_trace_round_trip():
    proto = build_protocol("fig2", 3, 1).with_oracles(policy="prefer0")
    run = simulate(proto, (1, 0, 1), FailurePattern.from_schedule(3, [(3, 12)]), scheduler=RandomScheduler(5), seed=5)
    text = trace.dumps(run)
    back, problems = trace.loads(text)
    assert problems == []
    assert trace.dumps(back) == text
    assert check_all(back, proto.target, proto).to_dict() == check_all(run, proto.target, proto).to_dict()


def test_truncated_trace_is_flagged():
    proto = build_protocol("fig1", 3, 1)
    text = trace.dumps(simulate(proto, (1, 0, 1)))
    lines = text.splitlines()
    back, problems = trace.loads("\n".join(lines[:-3]) + "\n")
    assert problems
    v = check_all(back, proto.target, proto)
    assert v.status("structure.channels") is Status.FAIL


def test_garbage_trace_raises():
    with pytest.raises(trace.TraceError):
        trace.loads("not json\n")


# -- generator/validator agreement --

CONFIGS = [("fig1", 3, 1, None), ("fig1", 4, 2, None), ("fig2", 3, 1, None), ("fig4", 3, 2, None),
           ("fig3max", 2, 1, 1), ("fig3min", 3, 1, 2), ("direct", 3, 1, 2)]


@st.composite
def simulations(draw):
    name, n, f, k = draw(st.sampled_from(CONFIGS))
    proto = build_protocol(name, n, f, k)
    mode = draw(st.sampled_from([None, Mode.GENERAL.value])) if name != "fig2" else None
    proto = proto.with_oracles(mode=mode, policy=draw(st.sampled_from(("prefer0", "prefer1", "seeded"))),
                               seed=draw(st.integers(0, 9)))
    size = proto.size
    inputs = tuple(draw(st.lists(st.sampled_from((0, 1)), min_size=size, max_size=size)))
    who = draw(st.lists(st.integers(1, size), unique=True, max_size=f))
    pattern = FailurePattern.from_schedule(size, [(p, draw(st.integers(0, 40))) for p in who])
    return proto, inputs, pattern, draw(st.integers(0, 10**6))


@settings(max_examples=120, deadline=None)
@given(simulations())
def test_simulated_runs_pass_structure(case):
    proto, inputs, pattern, seed = case
    run = simulate(proto, inputs, pattern, scheduler=RandomScheduler(seed))
    v = validate_run_structure(run, proto)
    assert v.ok, v.summary()
    if not pattern.faulty:
        # answers given under crashes need not stay legal once the crashes are gone
        ext = fair_extension(run.prefix(run.last_time // 2), proto, rule="policy")
        assert validate_run_structure(ext, proto).ok
