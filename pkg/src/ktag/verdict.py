from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Status(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    VACUOUS = "VACUOUS"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class Condition:
    name: str
    status: Status
    evidence: list[int] = field(default_factory=list)
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status.value,
            "evidence": list(self.evidence),
            "detail": self.detail,
        }


@dataclass
class Verdict:
    """Named per-condition results; ``overall`` is their conjunction.

    Any FAIL makes the verdict FAIL; otherwise any INCONCLUSIVE makes it
    INCONCLUSIVE. VACUOUS counts as satisfied.
    """

    conditions: list[Condition] = field(default_factory=list)

    def add(self, name: str, status: Status, evidence=(), detail: str = "") -> Condition:
        cond = Condition(name, Status(status), sorted(set(evidence)), detail)
        self.conditions.append(cond)
        return cond

    def extend(self, other: Verdict, prefix: str = "") -> Verdict:
        for c in other.conditions:
            self.conditions.append(Condition(prefix + c.name, c.status, list(c.evidence), c.detail))
        return self

    def __getitem__(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(c.name == name for c in self.conditions)

    def status(self, name: str) -> Status:
        return self[name].status

    @property
    def overall(self) -> Status:
        statuses = {c.status for c in self.conditions}
        if Status.FAIL in statuses:
            return Status.FAIL
        if Status.INCONCLUSIVE in statuses:
            return Status.INCONCLUSIVE
        return Status.PASS

    @property
    def ok(self) -> bool:
        return self.overall is Status.PASS

    def failures(self) -> list[Condition]:
        return [c for c in self.conditions if c.status is Status.FAIL]

    def to_dict(self) -> dict:
        return {
            "overall": self.overall.value,
            "conditions": [c.to_dict() for c in self.conditions],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Verdict:
        v = cls()
        for c in data["conditions"]:
            v.conditions.append(Condition(c["name"], Status(c["status"]), list(c["evidence"]), c.get("detail", "")))
        return v

    def summary(self) -> str:
        parts = [f"{c.name}={c.status.value}" for c in self.conditions if c.status is not Status.PASS]
        return self.overall.value + (f" ({', '.join(parts)})" if parts else "")


EXIT_CODES = {Status.PASS: 0, Status.FAIL: 2, Status.INCONCLUSIVE: 3}


def exit_code(*verdicts: Verdict) -> int:
    """Exit code for a bundle: FAIL dominates INCONCLUSIVE dominates PASS."""
    combined = Verdict()
    for v in verdicts:
        combined.extend(v)
    return EXIT_CODES[combined.overall]
