"""Check records and reports shared by the verification routines."""
from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field


@dataclass
class Check:
    id: str
    anchor: str
    passed: bool
    residual: float | None = None
    threshold: float | None = None
    report_only: bool = False
    witness: dict | None = None
    detail: dict | None = None
    wall_time: float = 0.0

    def line(self) -> str:
        status = "info" if self.report_only else ("PASS" if self.passed else "FAIL")
        res = "" if self.residual is None else f" residual={self.residual:.3e}"
        thr = "" if self.threshold is None else f" threshold={self.threshold:.1e}"
        wit = "" if not self.witness else f" witness={self.witness}"
        return f"[{status}] {self.id}{res}{thr}  ({self.anchor}){wit}"


@dataclass
class Report:
    checks: list = field(default_factory=list)

    def add(self, check_id, anchor, passed, residual=None, threshold=None, report_only=False, witness=None, detail=None):
        c = Check(check_id, anchor, bool(passed), None if residual is None else float(residual),
                  threshold, report_only, witness, detail)
        self.checks.append(c)
        return c

    def residual_check(self, check_id, anchor, residual, threshold, witness=None, report_only=False, detail=None):
        return self.add(check_id, anchor, residual <= threshold, residual, threshold, report_only,
                        None if residual <= threshold else witness, detail)

    def extend(self, other: "Report") -> "Report":
        self.checks.extend(other.checks)
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.report_only)

    def failures(self) -> list:
        return [c for c in self.checks if not c.report_only and not c.passed]

    def get(self, check_id) -> Check:
        for c in self.checks:
            if c.id == check_id:
                return c
        raise KeyError(check_id)

    def __contains__(self, check_id):
        return any(c.id == check_id for c in self.checks)

    def residual(self, check_id) -> float:
        return self.get(check_id).residual

    @contextmanager
    def timed(self):
        """Stamp the wall time on every check added inside the block."""
        start_n, start = len(self.checks), time.perf_counter()
        yield self
        elapsed = time.perf_counter() - start
        new = self.checks[start_n:]
        for c in new:
            c.wall_time = elapsed / max(len(new), 1)
