"""The eight acceptance criteria, each reporting one PASS/FAIL line."""
from __future__ import annotations

import contextlib
import itertools
import json
import os
import time

from conftest import ACCEPTANCE_LINES
from ktag.adversary import BLOCKED, FOUND, build_ir1, build_ir3
from ktag.cli import main
from ktag.oracles import Mode, OracleInstance, OracleSpec
from ktag.protocols import build_protocol
from ktag.runtime import validate_run_structure
from ktag.sweep import SweepConfig, parallel_sweep
from ktag.tasks import (
    FailurePattern,
    ProblemSpec,
    is_generalization,
    ktag,
    oracle_allowed,
    oracle_allowed_bruteforce,
    wag,
    zeros_plus_missing,
)
from ktag.verdict import Status

WORKERS = os.cpu_count() or 1


@contextlib.contextmanager
def criterion(number: int, label: str):
    start = time.perf_counter()
    note: list[str] = []
    try:
        yield note
    except BaseException:
        line = f"AC{number} FAIL  {label}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        raise
    extra = f" ({'; '.join(note)})" if note else ""
    line = f"AC{number} PASS  {label}{extra} [{time.perf_counter() - start:.1f}s]"
    ACCEPTANCE_LINES.append(line)
    print(line)


def partial_vectors(n):
    for cells in itertools.product((None, 0, 1), repeat=n):
        yield {p: v for p, v in enumerate(cells, start=1) if v is not None}


def test_ac1_closed_form_equals_enumeration():
    with criterion(1, "oracle_allowed == brute force, n <= 5, all k, faulty counts, partial vectors") as note:
        start = time.perf_counter()
        checked = 0
        for n in range(1, 6):
            vectors = list(partial_vectors(n))
            for k in range(1, n + 1):
                problem = ProblemSpec("ktag", tuple(range(1, n + 1)), k)
                for m in range(n + 1):
                    for w in vectors:
                        assert oracle_allowed(problem, m, w) == oracle_allowed_bruteforce(problem, m, w), (k, n, m, w)
                        checked += 1
        elapsed = time.perf_counter() - start
        assert elapsed < 10.0, f"took {elapsed:.1f}s"
        note.append(f"{checked} cases")


def _instance_answers(problem, n, m, w, mode, policy):
    """Values a live oracle gives the consultation ``w`` when ``m`` processes have crashed."""
    pi = tuple(range(1, n + 1))
    spec = OracleSpec("o", pi, problem, n - 1, mode, policy)
    # silent processes crash first, then queriers; every crash is visible at poll time
    order = [p for p in reversed(pi) if p not in w] + [p for p in reversed(pi) if p in w]
    now = len(w) + 1
    pattern = FailurePattern.from_schedule(n, [(p, now) for p in order[:m]])
    o = OracleInstance(spec)
    for t, (p, v) in enumerate(sorted(w.items()), start=1):
        o.submit_query(p, v, t)
    return {v for _, v in o.poll_answers(pattern, now)}


def test_ac2_forced_answers():
    with criterion(2, "forced-zero and forced-one answers, exhaustive n <= 5") as note:
        checked = 0
        for n in range(1, 6):
            pi = tuple(range(1, n + 1))
            vectors = [w for w in partial_vectors(n) if w]
            for k in range(1, n + 1):
                problem = ProblemSpec("ktag", pi, k)
                for m in range(n + 1):
                    for w in vectors:
                        allowed = oracle_allowed(problem, m, w)
                        zero_side = zeros_plus_missing(pi, w) >= k
                        one_side = len(w) == n and set(w.values()) == {1} and m <= k - 1
                        if zero_side:
                            assert allowed <= {0}, (n, k, m, w)
                            if m >= k:
                                assert allowed == {0}, (n, k, m, w)
                        if one_side:
                            assert allowed == {1}, (n, k, m, w)
                        # the live oracles obey the same constraints in every mode
                        for mode, policy in itertools.product(Mode, ("prefer0", "prefer1")):
                            got = _instance_answers(problem, n, m, w, mode, policy)
                            if zero_side:
                                assert got <= {0}, (mode, policy, n, k, m, w, got)
                            if one_side:
                                assert got == {1}, (mode, policy, n, k, m, w, got)
                            checked += 1
        note.append(f"{checked} oracle consultations")


def test_ac3_generalization_lattice():
    with criterion(3, "generalization lattice and weak agreement, n <= 5") as note:
        holds = refused = 0
        for n in range(1, 6):
            for f in range(n):
                for k in range(f + 1, n):
                    assert is_generalization(ktag(k + 1, n, f), ktag(k, n, f)), (n, f, k)
                    holds += 1
                if f >= 1:
                    res = is_generalization(ktag(f + 1, n, f), ktag(f, n, f))
                    assert not res and res.inputs is not None and res.decision is not None, (n, f)
                    refused += 1
                for k in range(1, n + 1):
                    assert is_generalization(wag(n, f), ktag(k, n, f)), (n, f, k)
                    holds += 1
        note.append(f"{holds} hold, {refused} refused with witness")


SWEEPS = [
    ("fig1", 3, 1, None, None), ("fig1", 4, 1, None, None), ("fig1", 5, 2, None, None),
    ("fig2", 3, 1, None, None), ("fig2", 5, 2, None, None),
    ("fig3max", 2, 1, 1, None), ("fig3max", 3, 1, 1, None), ("fig3max", 3, 2, 2, None),
    ("fig3min", 2, 1, 1, None), ("fig3min", 3, 1, 1, None), ("fig3min", 3, 2, 2, None),
    ("fig4", 2, 1, None, None), ("fig4", 3, 2, None, None), ("fig4", 4, 2, None, None),
]


def _sweep_all(configs):
    rows, bad = [], []
    total = 0
    for name, n, f, k, mode in configs:
        cfg = SweepConfig(name, n, f, k, mode=mode, policies=("prefer0", "prefer1"),
                          crash_samples=200, seeds=5, bound=10_000)
        result = parallel_sweep(cfg, WORKERS)
        proto = build_protocol(name, n, f, k)
        assert result.trials == 2 ** proto.size * 200 * 5 * 2
        rows.append(result.row())
        total += result.trials
        if not result.clean:
            bad.append((result.row(), result.examples))
    for row in rows:
        print(row)
    assert not bad, bad
    return total


def test_ac4_protocol_sweeps():
    with criterion(4, "fig1/fig2/fig3max/fig3min/fig4 sweeps, zero FAIL and INCONCLUSIVE") as note:
        note.append(f"{_sweep_all(SWEEPS)} runs")


def test_ac5_fig2_with_sham_oracle():
    with criterion(5, "fig2 with a sham oracle passes the same sweep") as note:
        note.append(f"{_sweep_all([('fig2', 3, 1, None, Mode.SHAM.value), ('fig2', 5, 2, None, Mode.SHAM.value)])} runs")


def _first_construction(n, f, k) -> str:
    demo = build_ir1("naive", n, f, k)
    assert demo.outcome == FOUND
    validity = [f"{name}: {c}" for name, conds in demo.failing().items() for c in conds if c.startswith("validity")]
    assert validity, demo.failing()
    proto = build_protocol("naive", n, f, k, strict=False)
    for name in ("rho", "rho_flipped", "rho0"):
        assert validate_run_structure(demo.runs[name], proto).ok, name
    assert demo.runs["rho0"].pattern.faulty == frozenset()
    return f"({n},{f},{k}) " + ", ".join(validity)


def test_ac6_first_construction():
    with criterion(6, "first construction vs the naive candidate") as note:
        for n, f, k in [(3, 1, 1), (4, 2, 2)]:
            note.append(_first_construction(n, f, k))


def _second_construction(n, f) -> str:
    demo = build_ir3("fig4", n, f, Mode.GENERAL)
    assert demo.outcome == FOUND
    merged = demo.verdicts["merged"]
    structural = [c for c in merged.conditions if c.name.startswith("structure.")]
    assert structural and all(c.status is Status.PASS for c in structural), merged.summary()
    assert merged.status("structure.oracle_history") is Status.PASS
    assert merged.status("agreement") is Status.FAIL
    blocked = build_ir3("fig4", n, f, Mode.SHAM)
    assert blocked.outcome == BLOCKED
    b = blocked.blocked
    spec = build_protocol("fig4", n, f).oracles[0]
    queries = {int(p): v for p, v in b["queries"].items()}
    # no crash is visible when the forced answer is due
    view = spec.faulty_view(FailurePattern.failure_free(n), b["t"])
    assert b["value"] not in oracle_allowed(spec.problem, view, queries)
    assert b["certified"]
    return f"({n},{f}) agreement FAIL, sham blocked at t={b['t']}"


def test_ac7_second_construction():
    with criterion(7, "second construction vs fig4") as note:
        for n, f in [(2, 1), (4, 2)]:
            note.append(_second_construction(n, f))


RUNS = [
    ["--protocol", "fig4", "--n", "3", "--f", "2", "--inputs", "101", "--crashes", "1@6", "--oracle", "sham:prefer1"],
    ["--protocol", "fig2", "--n", "5", "--f", "2", "--inputs", "11011", "--crashes", "3@4,5@20",
     "--oracle", "consistent:seeded"],
    ["--protocol", "fig3min", "--n", "3", "--f", "1", "--k", "2", "--inputs", "1101"],
    ["--protocol", "direct", "--n", "3", "--f", "1", "--k", "1", "--inputs", "111", "--scheduler", "rr"],
]


def test_ac8_determinism_and_round_trip(tmp_path, capsys):
    with criterion(8, "byte-identical traces and verdict round trip") as note:
        for i, argv in enumerate(RUNS):
            paths = [tmp_path / f"r{i}_{j}.jsonl" for j in range(3)]
            verdicts = []
            for path in paths:
                code = main(["run", *argv, "--seed", "11", "--json", "--trace", str(path)])
                verdicts.append(json.loads(capsys.readouterr().out)["verdict"])
                assert code == 0
            blobs = {p.read_bytes() for p in paths}
            assert len(blobs) == 1
            main(["check", "--trace", str(paths[0]), "--json"])
            checked = json.loads(capsys.readouterr().out)["verdict"]
            assert checked["conditions"][0] == {"name": "structure.trace_format", "status": "PASS",
                                                "evidence": [], "detail": ""}
            assert checked["conditions"][1:] == verdicts[0]["conditions"]
        note.append(f"{len(RUNS)} configurations")
