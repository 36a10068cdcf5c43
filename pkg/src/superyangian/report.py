"""Machine-readable run reports (schema v1)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

SCHEMA = "superyangian-report/1"


@dataclass
class Entry:
    id: str
    anchor: str
    verdict: str                 # 'holds', 'fails' or 'error'
    counterexample: str | None = None
    wall_time: float = 0.0
    detail: dict = field(default_factory=dict)


@dataclass
class Report:
    command: str
    config: dict
    entries: list = field(default_factory=list)
    tool_version: str = ""
    schema: str = SCHEMA

    @property
    def summary(self) -> dict:
        passed = sum(e.verdict == "holds" for e in self.entries)
        return {"total": len(self.entries), "passed": passed,
                "failed": len(self.entries) - passed}

    @property
    def ok(self) -> bool:
        return all(e.verdict == "holds" for e in self.entries)

    def to_dict(self) -> dict:
        return {"schema": self.schema, "tool_version": self.tool_version,
                "command": self.command, "config": self.config,
                "entries": [asdict(e) for e in self.entries], "summary": self.summary}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls(d["command"], d["config"], [Entry(**e) for e in d["entries"]],
                   d["tool_version"], d["schema"])

    def without_timing(self) -> dict:
        d = self.to_dict()
        for e in d["entries"]:
            e["wall_time"] = 0.0
        return d

    def to_text(self) -> str:
        lines = [f"{self.command} ({', '.join(f'{k}={v}' for k, v in sorted(self.config.items()))})"]
        for e in self.entries:
            mark = "ok  " if e.verdict == "holds" else e.verdict.upper()
            extra = f"  {e.counterexample}" if e.counterexample else ""
            lines.append(f"  {mark:<6}{e.id:<40}{e.anchor}{extra}")
        s = self.summary
        lines.append(f"{s['passed']}/{s['total']} passed")
        return "\n".join(lines) + "\n"
