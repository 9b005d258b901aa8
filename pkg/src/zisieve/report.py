"""Sweep-report containers: one row per parameter point, the measured
left-hand side, one or more bound envelopes, and the resulting ratios.
Implicit-constant bounds become recorded ratios plus a blow-up flag."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field


@dataclass
class SweepRow:
    params: dict
    lhs: float
    envelopes: dict[str, float]

    def ratios(self) -> dict[str, float]:
        out = {}
        for name, env in self.envelopes.items():
            if env <= 0:
                raise ValueError(f"nonpositive envelope {name}={env}")
            out[name] = self.lhs / env
        return out


@dataclass
class SweepReport:
    title: str
    rows: list[SweepRow] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def add(self, params: dict, lhs: float, **envelopes: float):
        self.rows.append(SweepRow(params=dict(params), lhs=float(lhs), envelopes=envelopes))

    def max_ratio(self, envelope: str | None = None) -> tuple[float, dict]:
        """Largest lhs/envelope ratio and the parameters attaining it."""
        best, best_params = float("-inf"), {}
        for row in self.rows:
            for name, r in row.ratios().items():
                if envelope is not None and name != envelope:
                    continue
                if r > best:
                    best, best_params = r, row.params
        return best, best_params

    def violations(self, envelope: str | None = None) -> list[SweepRow]:
        out = []
        for row in self.rows:
            for name, r in row.ratios().items():
                if envelope is not None and name != envelope:
                    continue
                if r > 1.0:
                    out.append(row)
                    break
        return out

    def blowup_flag(self, size_key: str, envelope: str | None = None, factor: float = 3.0) -> bool:
        """True when the max ratio over the largest-size third of the rows
        exceeds `factor` times the max over the smallest-size third."""
        if not self.rows:
            return False
        ordered = sorted(self.rows, key=lambda r: r.params[size_key])
        third = max(1, len(ordered) // 3)

        def chunk_max(chunk):
            vals = []
            for row in chunk:
                for name, r in row.ratios().items():
                    if envelope is None or name == envelope:
                        vals.append(r)
            return max(vals) if vals else 0.0

        low = chunk_max(ordered[:third])
        high = chunk_max(ordered[-third:])
        return high > factor * low if low > 0 else False

    # -- serialization -------------------------------------------------------

    def _columns(self) -> tuple[list[str], list[str]]:
        pkeys: list[str] = []
        ekeys: list[str] = []
        for row in self.rows:
            for k in row.params:
                if k not in pkeys:
                    pkeys.append(k)
            for k in row.envelopes:
                if k not in ekeys:
                    ekeys.append(k)
        return pkeys, ekeys

    def to_csv(self) -> str:
        pkeys, ekeys = self._columns()
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = pkeys + ["lhs"] + [f"envelope_{k}" for k in ekeys] + [f"ratio_{k}" for k in ekeys]
        writer.writerow(header)
        for row in self.rows:
            ratios = row.ratios()
            writer.writerow(
                [row.params.get(k, "") for k in pkeys]
                + [repr(row.lhs)]
                + [repr(row.envelopes[k]) if k in row.envelopes else "" for k in ekeys]
                + [repr(ratios[k]) if k in ratios else "" for k in ekeys]
            )
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "title": self.title,
            "notes": self.notes,
            "rows": [
                {
                    "params": row.params,
                    "lhs": row.lhs,
                    "envelopes": row.envelopes,
                    "ratios": row.ratios(),
                }
                for row in self.rows
            ],
        }
        return json.dumps(payload, sort_keys=True, indent=2)
