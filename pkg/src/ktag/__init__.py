"""Simulator, protocol library and run checker for k-threshold agreement with oracles."""
from __future__ import annotations

from .tasks import (
    FailurePattern,
    ParameterError,
    ProblemSpec,
    TaskSpec,
    atomic_commitment,
    cons,
    decision_set,
    is_generalization,
    ktag,
    oracle_allowed,
    oracle_allowed_bruteforce,
    parse_task,
    wag,
)
from .verdict import Status, Verdict

__all__ = [
    "FailurePattern",
    "ParameterError",
    "ProblemSpec",
    "Status",
    "TaskSpec",
    "Verdict",
    "atomic_commitment",
    "cons",
    "decision_set",
    "is_generalization",
    "ktag",
    "oracle_allowed",
    "oracle_allowed_bruteforce",
    "parse_task",
    "wag",
]
