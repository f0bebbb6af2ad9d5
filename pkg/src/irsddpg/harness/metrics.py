"""CSV persistence of metrics records plus the normalized evaluation curve."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

from irsddpg.records import METRIC_FIELDS, MetricsRecord

NORMALIZED_FIELDS = ("run_id", "step", "eval_mean", "normalized")
_INT_FIELDS = ("step", "seed")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _parse_cell(name: str, text: str):
    if text == "":
        return None
    if name == "run_id":
        return text
    if name in _INT_FIELDS:
        return int(text)
    return float(text)


def normalized_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + "_normalized" + path.suffix)


def read_metrics(path) -> list[MetricsRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != METRIC_FIELDS:
            raise ValueError(f"{path}: unexpected metrics header {reader.fieldnames}")
        return [MetricsRecord(**{k: _parse_cell(k, row[k]) for k in METRIC_FIELDS}) for row in reader]


def normalize_curve(records: Iterable[MetricsRecord]) -> list[tuple[str, int, float, float | None]]:
    """Evaluation points divided by their run's maximum; the maximum itself maps to exactly 1."""
    points = [r for r in records if r.eval_mean is not None]
    peak: dict[str, float] = {}
    for r in points:
        peak[r.run_id] = max(peak.get(r.run_id, r.eval_mean), r.eval_mean)
    rows = []
    for r in points:
        top = peak[r.run_id]
        rows.append((r.run_id, r.step, r.eval_mean, r.eval_mean / top if top > 0 else None))
    return rows


def write_normalized(records: Iterable[MetricsRecord], path) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(NORMALIZED_FIELDS)
            for row in normalize_curve(records):
                writer.writerow([_cell(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write normalized metrics to {path}: {exc}") from exc
    return path


class MetricsWriter:
    """Appends records to a CSV as they arrive; usable directly as a training hook.

    ``close`` rewrites the normalized companion from the whole file, so runs
    appended to an existing file are normalized per ``run_id``.
    """

    def __init__(self, path, fresh: bool = False):
        self.path = Path(path)
        try:
            if fresh or not self.path.exists() or self.path.stat().st_size == 0:
                self._fh = open(self.path, "w", newline="", encoding="utf-8")
                self._writer = csv.writer(self._fh, lineterminator="\n")
                self._writer.writerow(METRIC_FIELDS)
            else:
                self._fh = open(self.path, "a", newline="", encoding="utf-8")
                self._writer = csv.writer(self._fh, lineterminator="\n")
        except OSError as exc:
            raise OSError(f"cannot open metrics file {self.path}: {exc}") from exc

    def __call__(self, record: MetricsRecord) -> None:
        self._writer.writerow([_cell(getattr(record, f)) for f in METRIC_FIELDS])

    def close(self) -> Path:
        if not self._fh.closed:
            self._fh.close()
        return write_normalized(read_metrics(self.path), normalized_path(self.path))

    def __enter__(self) -> "MetricsWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def emit_metrics(records: Iterable[MetricsRecord], path, fresh: bool = False) -> tuple[Path, Path]:
    """Append ``records`` to ``path`` and refresh its normalized companion; returns both paths."""
    with MetricsWriter(path, fresh=fresh) as writer:
        for record in records:
            writer(record)
    return writer.path, normalized_path(writer.path)
