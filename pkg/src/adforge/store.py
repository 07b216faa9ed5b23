"""Append-only JSONL result store keyed by (dataset, pipeline, n_a, seed)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

RECORD_SCHEMA_VERSION = 1
RECORDS_FILE = "records.jsonl"


@dataclass
class RunRecord:
    dataset: str
    pipeline_id: int
    config: dict
    n_a: int
    seed: int
    auc_roc: float | None
    auc_pr: float | None
    wall_time_s: float
    status: str  # "ok" | "failed"
    error_tag: str | None = None
    schema_version: int = RECORD_SCHEMA_VERSION

    @property
    def key(self) -> tuple:
        return (self.dataset, self.pipeline_id, self.n_a, self.seed)


class ResultStore:
    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.path = self.directory / RECORDS_FILE
        self._records: dict[tuple, RunRecord] = {}
        if self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = RunRecord(**json.loads(line))
                    self._records[rec.key] = rec

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, key: tuple) -> bool:
        return key in self._records

    def records(self) -> list[RunRecord]:
        return sorted(self._records.values(), key=lambda r: r.key)

    def get(self, key: tuple) -> RunRecord | None:
        return self._records.get(key)

    def append(self, rec: RunRecord) -> None:
        if rec.key in self._records:
            return  # resumable runs skip duplicates
        self._records[rec.key] = rec
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(asdict(rec)) + "\n")
