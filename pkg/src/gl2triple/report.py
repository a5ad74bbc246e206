"""Check records, reports, and byte-stable emission (JSON and markdown)."""

from __future__ import annotations

import dataclasses
import json
import platform
import sys
from typing import Dict, List, Optional

PASS = "PASS"
FAIL = "FAIL"
INFO = "INFO"
OUT_OF_SCOPE = "OUT_OF_SCOPE"
NOT_EVALUABLE = "NOT_EVALUABLE"


@dataclasses.dataclass
class Record:
    id: str
    anchor: str
    inputs: str
    expected: str
    got: str
    status: str
    seconds: float = 0.0

    def row(self, include_timings: bool = True) -> Dict:
        out = {"id": self.id, "anchor": self.anchor, "inputs": self.inputs,
               "expected": self.expected, "got": self.got, "status": self.status,
               "seconds": round(self.seconds, 6) if include_timings else 0.0}
        return out


@dataclasses.dataclass
class Report:
    records: List[Record]
    config_digest: str = ""

    def summary(self) -> Dict[str, int]:
        out = {PASS: 0, FAIL: 0, INFO: 0, OUT_OF_SCOPE: 0, NOT_EVALUABLE: 0}
        for r in self.records:
            out[r.status] = out.get(r.status, 0) + 1
        return out

    def failed(self) -> bool:
        return any(r.status == FAIL for r in self.records)

    def fingerprint(self) -> Dict[str, str]:
        return {"python": sys.version.split()[0],
                "platform": platform.platform(),
                "config": self.config_digest}

    def to_json(self, include_timings: bool = True) -> str:
        body = {"records": [r.row(include_timings)
                            for r in sorted(self.records, key=lambda r: r.id)],
                "summary": self.summary(),
                "environment": self.fingerprint()}
        return json.dumps(body, sort_keys=True, indent=1) + "\n"

    def to_markdown(self, include_timings: bool = True) -> str:
        lines = ["# Verification report", ""]
        summ = self.summary()
        lines.append("Summary: " + ", ".join("%s %d" % (k, v)
                                              for k, v in sorted(summ.items())))
        lines.append("")
        by_suite: Dict[str, List[Record]] = {}
        for r in sorted(self.records, key=lambda r: r.id):
            by_suite.setdefault(r.id.split(":", 1)[0], []).append(r)
        for suite in sorted(by_suite):
            lines.append("## " + suite)
            lines.append("")
            lines.append("| id | anchor | expected | got | status |" +
                         (" seconds |" if include_timings else ""))
            lines.append("|---|---|---|---|---|" +
                         ("---|" if include_timings else ""))
            for r in by_suite[suite]:
                row = "| %s | %s | %s | %s | %s |" % (
                    r.id, r.anchor, _clip(r.expected), _clip(r.got), r.status)
                if include_timings:
                    row += " %.3f |" % r.seconds
                lines.append(row)
            lines.append("")
        return "\n".join(lines)


def _clip(s: str, n: int = 60) -> str:
    s = s.replace("|", "\\|").replace("\n", " ")
    return s if len(s) <= n else s[:n - 3] + "..."


def load_report(path: str) -> Report:
    with open(path) as fh:
        body = json.load(fh)
    recs = [Record(r["id"], r["anchor"], r.get("inputs", ""), r["expected"],
                   r["got"], r["status"], r.get("seconds", 0.0))
            for r in body["records"]]
    rep = Report(recs, body.get("environment", {}).get("config", ""))
    return rep


def emit_report(report: Report, path: str, fmt: str = "json",
                include_timings: bool = True) -> str:
    text = (report.to_json(include_timings) if fmt == "json"
            else report.to_markdown(include_timings))
    with open(path, "w") as fh:
        fh.write(text)
    return path
