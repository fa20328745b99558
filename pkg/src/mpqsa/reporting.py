"""Check records shared by the verification routines and the suite runner."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class Check:
    name: str
    status: str
    residue: str | None = None
    wall_time: float = 0.0
    note: str | None = None

    def to_json(self, timing: bool = False) -> dict:
        out: dict = {"name": self.name, "status": self.status}
        if self.residue is not None:
            out["residue"] = self.residue
        if self.note is not None:
            out["note"] = self.note
        if timing:
            out["wall_time"] = round(self.wall_time, 6)
        return out


@dataclass
class Report:
    name: str
    checks: list = field(default_factory=list)

    def add(self, name: str, ok: bool, residue=None, *, note: str | None = None, wall_time: float = 0.0) -> Check:
        c = Check(name, PASS if ok else FAIL, None if ok or residue is None else str(residue), wall_time, note)
        self.checks.append(c)
        return c

    def add_status(self, name: str, status: str, residue=None, note: str | None = None) -> Check:
        c = Check(name, status, None if residue is None else str(residue), 0.0, note)
        self.checks.append(c)
        return c

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.status, c.residue, c.wall_time, c.note))

    @contextmanager
    def timed(self, name: str):
        """Run a block that returns via ``record(ok, residue)``; exceptions become failures."""
        box: dict = {}
        start = time.perf_counter()

        def record(ok: bool, residue=None, note=None):
            box["ok"], box["residue"], box["note"] = ok, residue, note

        try:
            yield record
        except Exception as exc:  # reported, not raised
            box["ok"], box["residue"], box["note"] = False, f"{type(exc).__name__}: {exc}", None
        elapsed = time.perf_counter() - start
        if "ok" not in box:
            box["ok"], box["residue"], box["note"] = False, "no result recorded", None
        self.add(name, box["ok"], box["residue"], note=box["note"], wall_time=elapsed)

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if c.status == FAIL]

    def inconclusive(self) -> list:
        return [c for c in self.checks if c.status == INCONCLUSIVE]

    def to_json(self, timing: bool = False) -> dict:
        return {"name": self.name, "checks": [c.to_json(timing) for c in self.checks]}
