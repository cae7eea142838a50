"""JSONL traces: one header record, then one event per line."""
from __future__ import annotations

import json
from pathlib import Path

from .events import Event
from .oracles import OracleSpec
from .runtime import Run
from .tasks import FailurePattern

FORMAT = "ktag-trace/1"


class TraceError(ValueError):
    pass


def _line(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def header(run: Run) -> dict:
    return {
        "format": FORMAT,
        "n": run.n,
        "inputs": "".join(map(str, run.inputs)),
        "crashes": [list(c) for c in run.pattern.crash_times],
        "protocol": run.protocol,
        "oracles": [s.to_dict() for s in run.oracles],
        "scheduler": run.scheduler,
        "step_bound": run.step_bound,
        "stopped": run.stopped,
        "rule": run.rule,
        "seed": run.seed,
        "start_time": run.start_time,
        "events": len(run.events),
    }


def dumps(run: Run) -> str:
    lines = [_line(header(run))]
    lines.extend(_line(e.to_dict()) for e in run.events)
    return "\n".join(lines) + "\n"


def loads(text: str) -> tuple[Run, list[str]]:
    """Parse a trace; returns the run and a list of format problems.

    Malformed event lines are skipped and reported, so a damaged trace can
    still be judged (and will usually fail structurally).
    """
    lines = text.splitlines()
    if not lines:
        raise TraceError("empty trace")
    try:
        h = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise TraceError(f"unreadable header: {exc}") from exc
    if h.get("format") != FORMAT:
        raise TraceError(f"not a {FORMAT} trace")
    problems = []
    events = []
    for no, line in enumerate(lines[1:], start=2):
        try:
            events.append(Event.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            problems.append(f"line {no}: {exc}")
    if len(events) != h.get("events", len(events)):
        problems.append(f"header announces {h.get('events')} events, found {len(events)}")
    run = Run(
        inputs=tuple(int(b) for b in h["inputs"]),
        pattern=FailurePattern.from_schedule(h["n"], h["crashes"]),
        events=events,
        protocol=h["protocol"],
        oracles=tuple(OracleSpec.from_dict(d) for d in h["oracles"]),
        scheduler=h["scheduler"],
        step_bound=h["step_bound"],
        stopped=h["stopped"],
        rule=h["rule"],
        seed=h["seed"],
        start_time=h["start_time"],
    )
    return run, problems


def write(run: Run, path) -> None:
    Path(path).write_text(dumps(run), encoding="utf-8")


def read(path) -> tuple[Run, list[str]]:
    return loads(Path(path).read_text(encoding="utf-8"))
