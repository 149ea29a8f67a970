"""Verdict objects returned by every equilibrium check."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .numeric import format_number


@dataclass
class Witness:
    player: int
    deviation: object
    gain: object
    note: str = ""

    def to_dict(self) -> dict:
        out = {"player": self.player, "deviation": _plain(self.deviation), "gain": _num(self.gain)}
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class EquilibriumReport:
    """``verdict`` plus the first failing deviation (if any) and every checked slack.

    ``margins`` holds ``(label, slack)`` pairs; a condition holds when its slack
    is at least minus the active tolerance.
    """

    verdict: bool
    witnesses: list = field(default_factory=list)
    margins: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.verdict

    @classmethod
    def infeasible(cls, what="profile") -> "EquilibriumReport":
        return cls(False, [Witness(-1, None, 0, note=f"infeasible {what}")])

    def to_dict(self) -> dict:
        return {"verdict": self.verdict,
                "witnesses": [w.to_dict() for w in self.witnesses],
                "margins": [{"condition": _plain(label), "slack": _num(v)} for label, v in self.margins]}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _num(v):
    return None if v is None else format_number(v)


def _plain(obj):
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if hasattr(obj, "item"):
        return obj.item()
    return obj
