"""Deterministic report emission: tab-separated tables or key=value lines."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from dgva.dg import CheckReport


def _cell(x) -> str:
    s = str(x)
    return s.replace("\t", " ").replace("\n", " ")


def _kv(key, x) -> str:
    s = _cell(x)
    if key == "witness":
        return repr(s)
    return s.strip().replace(" ", "_")


@dataclass
class Section:
    title: str
    header: list
    rows: list = field(default_factory=list)


@dataclass
class Report:
    command: str
    sections: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def table(self, title, header, rows) -> Section:
        s = Section(title, list(header), [list(r) for r in rows])
        self.sections.append(s)
        return s

    def add_check(self, rep: CheckReport):
        self.checks.append(rep)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.checks)

    def check_rows(self):
        rows = []
        for top in self.checks:
            for depth, r in top.walk():
                if depth > 2:
                    continue
                w = r.first_witness() if r.status == "fail" else None
                w = "" if w is None else w
                rows.append([("  " * depth) + r.name, r.status, r.checked, r.skipped, w])
        return rows

    def render(self, json_like=False, timestamps=False) -> str:
        out = []
        if timestamps:
            out.append(f"# generated {time.strftime('%Y-%m-%dT%H:%M:%S')}")
        sections = list(self.sections)
        if self.checks:
            sections.append(Section("checks", ["family", "status", "checked", "skipped", "witness"],
                                    self.check_rows()))
        for s in sections:
            if json_like:
                for r in s.rows:
                    kv = " ".join(f"{h}={_kv(h, v)}" for h, v in zip(s.header, r))
                    out.append(f"section={s.title} {kv}")
            else:
                out.append(f"## {s.title}")
                out.append("\t".join(s.header))
                for r in s.rows:
                    out.append("\t".join(_cell(v) for v in r))
        for n in self.notes:
            out.append(("note=" if json_like else "# note: ") + n)
        verdict = "pass" if self.passed else "fail"
        out.append(f"result={verdict}" if json_like else f"# result: {verdict}")
        return "\n".join(out) + "\n"
