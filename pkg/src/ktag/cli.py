"""Command line: ``ktag {run,check,sweep,refute,allowed}``.

Exit codes: 0 PASS (or the expected demonstration), 2 FAIL, 3 INCONCLUSIVE,
64 bad flags or parameters.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import trace
from .adversary import BLOCKED, FOUND, INCONCLUSIVE, build_ir1, build_ir3
from .checker import check_all
from .oracles import POLICIES, Mode
from .protocols import PROTOCOLS, NotAGeneralization, build_protocol, protocol_from_dict
from .runtime import DEFAULT_BOUND, FairRoundRobin, RandomScheduler, parse_crashes, parse_inputs, simulate
from .sweep import SweepConfig, parallel_sweep, random_trials
from .tasks import ParameterError, ProblemSpec, oracle_allowed, parse_task, process_set
from .verdict import Status, Verdict, exit_code

EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _oracle_flag(text: str | None) -> tuple[str | None, str | None]:
    if not text:
        return None, None
    mode, _, policy = text.partition(":")
    if mode not in {m.value for m in Mode}:
        raise UsageError(f"unknown oracle mode {mode!r}")
    if policy and policy not in POLICIES:
        raise UsageError(f"unknown oracle policy {policy!r}")
    return mode, policy or None


def _protocol(args):
    opts = {}
    if getattr(args, "via", None):
        opts["via"] = args.via
    if getattr(args, "linger", None) is not None:
        opts["linger"] = None if args.linger < 0 else args.linger
    return build_protocol(args.protocol, args.n, args.f, args.k, **opts)


def _emit(args, payload: dict, text: str) -> None:
    print(json.dumps(payload, sort_keys=True) if args.json else text)


def _decisions_text(run) -> str:
    d = run.decided_values()
    return " ".join(f"p{p}={d[p]}" for p in sorted(d)) or "(none)"


def cmd_run(args) -> int:
    mode, policy = _oracle_flag(args.oracle)
    proto = _protocol(args).with_oracles(mode=mode, policy=policy, seed=args.seed)
    inputs = parse_inputs(args.inputs, proto.size)
    pattern = parse_crashes(args.crashes, proto.size)
    sched = FairRoundRobin() if args.scheduler == "rr" else RandomScheduler(args.seed)
    run = simulate(proto, inputs, pattern, scheduler=sched, step_bound=args.bound, seed=args.seed)
    if args.trace:
        trace.write(run, args.trace)
    verdict = check_all(run, proto.target, proto)
    payload = {
        "decisions": {str(p): v for p, v in sorted(run.decided_values().items())},
        "events": len(run.events),
        "stopped": run.stopped,
        "task": proto.target.label,
        "verdict": verdict.to_dict(),
    }
    _emit(args, payload, f"decisions: {_decisions_text(run)}\nevents: {len(run.events)} ({run.stopped})\n"
                         f"verdict vs {proto.target.label}: {verdict.summary()}")
    return exit_code(verdict)


def cmd_check(args) -> int:
    try:
        run, problems = trace.read(args.trace)
    except (trace.TraceError, OSError, KeyError, TypeError, ValueError) as exc:
        verdict = Verdict()
        verdict.add("structure.trace_format", Status.FAIL, detail=str(exc))
        _emit(args, {"verdict": verdict.to_dict()}, f"verdict: {verdict.summary()}: {exc}")
        return exit_code(verdict)
    proto = None
    if run.protocol is not None:
        try:
            proto = protocol_from_dict(run.protocol)
        except (ParameterError, KeyError) as exc:
            problems.append(f"cannot rebuild protocol: {exc}")
    if args.task:
        task = parse_task(args.task)
    elif proto is not None:
        task = proto.target
    else:
        raise UsageError("--task is required when the trace names no known protocol")
    verdict = Verdict()
    verdict.add("structure.trace_format", Status.FAIL if problems else Status.PASS, detail="; ".join(problems[:3]))
    verdict.extend(check_all(run, task, proto))
    _emit(args, {"task": task.label, "verdict": verdict.to_dict()}, f"verdict vs {task.label}: {verdict.summary()}")
    return exit_code(verdict)


def cmd_sweep(args) -> int:
    mode, policy = _oracle_flag(args.oracle)
    opts = {"via": args.via} if args.via else {}
    cfg = SweepConfig(
        args.protocol, args.n, args.f, args.k, mode=mode,
        policies=(policy,) if policy else ("prefer0", "prefer1"),
        crash_samples=args.crash_samples, seeds=args.seeds, seed=args.seed, bound=args.bound, options=opts,
    )
    # validate parameters before spending time
    build_protocol(cfg.protocol, cfg.n, cfg.f, cfg.k, **opts)
    if args.exhaustive_inputs:
        result = parallel_sweep(cfg, args.workers)
    else:
        result = random_trials(cfg, args.trials)
    _emit(args, result.to_dict(), result.row())
    if result.counts["FAIL"]:
        return 2
    return 3 if result.counts["INCONCLUSIVE"] else 0


def cmd_refute(args) -> int:
    if args.construction == "ir1":
        if args.k is None:
            raise UsageError("ir1 needs --k")
        demo = build_ir1(args.candidate, args.n, args.f, args.k, args.bound)
        expected = FOUND
    else:
        demo = build_ir3(args.candidate, args.n, args.f, args.oracle_mode, args.bound)
        expected = BLOCKED if args.oracle_mode == Mode.SHAM.value else FOUND
    if args.trace_dir:
        out = Path(args.trace_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, run in demo.runs.items():
            trace.write(run, out / f"{demo.construction}_{name}.jsonl")
    lines = [f"{demo.construction}: {demo.outcome} ({demo.detail})"]
    lines += [f"  {name}: {v.summary()}" for name, v in demo.verdicts.items()]
    _emit(args, demo.to_dict(), "\n".join(lines))
    if demo.outcome == expected:
        return 0
    return 3 if demo.outcome == INCONCLUSIVE else 2


def _format_set(values) -> str:
    return "{" + ", ".join(map(str, sorted(values))) + "}"


def cmd_allowed(args) -> int:
    if len(args.inputs) != args.n or set(args.inputs) - set("01?"):
        raise UsageError("--inputs must have n characters from 0, 1, ?")
    pi = process_set(args.n)
    problem = ProblemSpec("ktag", pi, args.k) if args.problem == "ktag" else ProblemSpec("wag", pi)
    w = {p: int(c) for p, c in zip(pi, args.inputs) if c != "?"}
    allowed = oracle_allowed(problem, args.faulty, w)
    _emit(args, {"allowed": sorted(allowed), "problem": problem.label, "faulty": args.faulty}, _format_set(allowed))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ktag", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def protocol_flags(p):
        p.add_argument("--protocol", required=True, choices=PROTOCOLS)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--f", type=int, required=True)
        p.add_argument("--k", type=int)
        p.add_argument("--via", help="oracle task for noop, e.g. ktag:2,3,1")
        p.add_argument("--oracle", help="mode[:policy], e.g. sham:prefer0")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
        p.add_argument("--json", action="store_true")

    p = sub.add_parser("run", help="simulate one run and judge it")
    protocol_flags(p)
    p.add_argument("--inputs", required=True)
    p.add_argument("--crashes", default="", help='"p@t,p@t"')
    p.add_argument("--scheduler", choices=("random", "rr"), default="random")
    p.add_argument("--linger", type=int, help="fig2 rounds after deciding (negative: forever)")
    p.add_argument("--trace")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="judge a saved trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--task", help="ktag:k,n,f | cons:n,f | ac:n,f | wag:n,f")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="many runs, counted by verdict")
    protocol_flags(p)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--exhaustive-inputs", action="store_true")
    p.add_argument("--crash-samples", type=int, default=200)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("refute", help="counterexample construction against a candidate")
    p.add_argument("--construction", required=True, choices=("ir1", "ir3"))
    p.add_argument("--candidate", required=True, choices=PROTOCOLS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--f", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--oracle-mode", choices=("general", "sham"), default="general")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.add_argument("--trace-dir")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_refute)

    p = sub.add_parser("allowed", help="answers an oracle may give")
    p.add_argument("--problem", choices=("ktag", "wag"), default="ktag")
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--inputs", required=True, help="pattern over 0, 1, ?")
    p.add_argument("--faulty", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_allowed)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"ktag: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotAGeneralization as exc:
        print(f"ktag: refused: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        print(f"ktag: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
