"""Batch runs over inputs, crash schedules, scheduler seeds and oracle policies."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .checker import check_all, rounds_used
from .protocols import build_protocol
from .runtime import DEFAULT_BOUND, RandomScheduler, simulate
from .tasks import FailurePattern
from .verdict import Status

DEFAULT_HORIZON = 60


def sample_crash_schedules(n: int, f: int, count: int, seed: int, horizon: int = DEFAULT_HORIZON,
                           pids=None) -> list[FailurePattern]:
    """``count`` distinct-ish schedules with at most ``f`` crashes.

    The list always starts with the failure-free pattern and, when ``f > 0``,
    the pattern where the first ``f`` processes crash at time 0.
    """
    rng = random.Random(f"crashes:{seed}:{n}:{f}")
    pids = list(pids) if pids is not None else list(range(1, n + 1))
    out = [FailurePattern.failure_free(n)]
    if f > 0 and count > 1:
        out.append(FailurePattern.from_schedule(n, [(p, 0) for p in pids[:f]]))
    while len(out) < count:
        m = rng.randint(0, f)
        who = rng.sample(pids, m)
        # time 0 often enough to exercise initially-dead processes
        sched = [(p, 0 if rng.random() < 0.2 else rng.randint(1, horizon)) for p in who]
        out.append(FailurePattern.from_schedule(n, sched))
    return out


@dataclass
class SweepConfig:
    protocol: str
    n: int
    f: int
    k: int | None = None
    mode: str | None = None
    policies: tuple[str, ...] = ("prefer0", "prefer1")
    crash_samples: int = 200
    seeds: int = 5
    seed: int = 0
    bound: int = DEFAULT_BOUND
    horizon: int = DEFAULT_HORIZON
    inputs: tuple[str, ...] | None = None
    options: dict = field(default_factory=dict)

    def label(self) -> str:
        k = f",k={self.k}" if self.k is not None else ""
        mode = f" {self.mode}" if self.mode else ""
        return f"{self.protocol}(n={self.n},f={self.f}{k}){mode}"


@dataclass
class SweepResult:
    config: SweepConfig
    trials: int = 0
    counts: dict = field(default_factory=lambda: {s.value: 0 for s in (Status.PASS, Status.FAIL, Status.INCONCLUSIVE)})
    max_rounds: int = 0
    max_events: int = 0
    examples: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return self.counts["FAIL"] == 0 and self.counts["INCONCLUSIVE"] == 0

    def merge(self, other: SweepResult) -> SweepResult:
        self.trials += other.trials
        for key, v in other.counts.items():
            self.counts[key] += v
        self.max_rounds = max(self.max_rounds, other.max_rounds)
        self.max_events = max(self.max_events, other.max_events)
        self.examples.extend(other.examples[: max(0, 5 - len(self.examples))])
        return self

    def row(self) -> str:
        c = self.counts
        return (f"{self.config.label():<36} trials={self.trials:<7} PASS={c['PASS']:<7} "
                f"FAIL={c['FAIL']:<4} INCONCLUSIVE={c['INCONCLUSIVE']:<4} max_rounds={self.max_rounds}")

    def to_dict(self) -> dict:
        return {
            "config": self.config.label(),
            "trials": self.trials,
            "counts": dict(self.counts),
            "max_rounds": self.max_rounds,
            "max_events": self.max_events,
            "examples": self.examples,
        }


def _derive(*parts) -> int:
    # str hashing is salted per interpreter; seed a private generator instead
    return random.Random(":".join(map(str, parts))).randrange(2**31)


def _one(protocol, inputs, pattern, sched_seed, bound, result: SweepResult) -> None:
    run = simulate(protocol, inputs, pattern, scheduler=RandomScheduler(sched_seed), step_bound=bound, seed=sched_seed)
    verdict = check_all(run, protocol.target, protocol)
    status = verdict.overall.value
    result.trials += 1
    result.counts[status] += 1
    result.max_rounds = max(result.max_rounds, rounds_used(run))
    result.max_events = max(result.max_events, len(run.events))
    if status != "PASS" and len(result.examples) < 5:
        result.examples.append({
            "inputs": "".join(map(str, inputs)),
            "crashes": list(pattern.crash_times),
            "scheduler_seed": sched_seed,
            "policy": protocol.oracles[0].policy,
            "verdict": verdict.summary(),
        })


def _protocols(cfg: SweepConfig):
    base = build_protocol(cfg.protocol, cfg.n, cfg.f, cfg.k, **cfg.options)
    return [base.with_oracles(mode=cfg.mode, policy=pol, seed=cfg.seed) for pol in cfg.policies]


def sweep(cfg: SweepConfig, input_slice: tuple[int, int] | None = None) -> SweepResult:
    """Exhaustive inputs (unless ``cfg.inputs``) x crash samples x seeds x policies."""
    protos = _protocols(cfg)
    size = protos[0].size
    vectors = list(cfg.inputs) if cfg.inputs is not None else [
        "".join(bits) for bits in itertools.product("01", repeat=size)]
    if input_slice is not None:
        vectors = vectors[input_slice[0]:input_slice[1]]
    patterns = sample_crash_schedules(size, cfg.f, cfg.crash_samples, cfg.seed, cfg.horizon)
    result = SweepResult(cfg)
    for vi, inputs in enumerate(vectors):
        for ci, pattern in enumerate(patterns):
            for s in range(cfg.seeds):
                sched_seed = _derive(cfg.seed, inputs, ci, s)
                for proto in protos:
                    _one(proto, inputs, pattern, sched_seed, cfg.bound, result)
    return result


def random_trials(cfg: SweepConfig, trials: int) -> SweepResult:
    """``trials`` runs with random inputs, crash schedule, seed and policy."""
    protos = _protocols(cfg)
    size = protos[0].size
    rng = random.Random(f"trials:{cfg.seed}")
    patterns = sample_crash_schedules(size, cfg.f, max(cfg.crash_samples, 2), cfg.seed, cfg.horizon)
    result = SweepResult(cfg)
    for _ in range(trials):
        inputs = "".join(rng.choice("01") for _ in range(size))
        pattern = rng.choice(patterns)
        _one(rng.choice(protos), inputs, pattern, rng.randrange(2**31), cfg.bound, result)
    return result


def _sweep_chunk(args):
    cfg, lo, hi = args
    return sweep(cfg, (lo, hi))


def parallel_sweep(cfg: SweepConfig, workers: int = 1) -> SweepResult:
    """Split the input vectors across worker processes; counts are order-independent."""
    if workers <= 1:
        return sweep(cfg)
    from concurrent.futures import ProcessPoolExecutor

    size = build_protocol(cfg.protocol, cfg.n, cfg.f, cfg.k, **cfg.options).size
    total = len(cfg.inputs) if cfg.inputs is not None else 2 ** size
    step = max(1, -(-total // workers))
    chunks = [(cfg, lo, min(total, lo + step)) for lo in range(0, total, step)]
    result = SweepResult(cfg)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_sweep_chunk, chunks):
            result.merge(part)
    return result
