from __future__ import annotations

from dataclasses import dataclass, field

BUFFER = "beta"
LOCAL = "local"

SEND, RECEIVE, QUERY, ANSWER, DECIDE = "S", "R", "Q", "A", "D"
KINDS = (SEND, RECEIVE, QUERY, ANSWER, DECIDE)


def _freeze(x):
    if isinstance(x, (list, tuple)):
        return tuple(_freeze(y) for y in x)
    return x


@dataclass(frozen=True)
class Event:
    """One step of one process at one tick.

    ``loc`` is :data:`BUFFER` for sends and receives, a sanctuary label for
    queries and answers, and :data:`LOCAL` for decisions. Payloads:

    * S: ``{"body": tuple, "to": tuple[int, ...]}``
    * R: ``{"src": int, "sent": int, "body": tuple}`` where ``sent`` is the
      time of the matching S event
    * Q, A, D: ``{"value": int}``
    """

    t: int
    loc: str
    pid: int
    kind: str
    payload: dict = field(default_factory=dict, hash=False)

    @property
    def value(self) -> int | None:
        return self.payload.get("value")

    def to_dict(self) -> dict:
        return {"t": self.t, "loc": self.loc, "pid": self.pid, "kind": self.kind, "payload": self.payload}

    @classmethod
    def from_dict(cls, d: dict) -> Event:
        payload = {k: _freeze(v) for k, v in d["payload"].items()}
        return cls(int(d["t"]), d["loc"], int(d["pid"]), d["kind"], payload)
