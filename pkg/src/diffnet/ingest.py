"""CSV ingestion with strict validation and precise failure diagnostics."""

from __future__ import annotations

import csv
import math
import os

from .correlation import SampleMatrix

import numpy as np


def ingest_csv(path: str, condition_label: str | None = None) -> SampleMatrix:
    """Load one condition: header row of variable names, numeric rows below.

    NaN/Inf and unparseable cells are rejected naming the offending row and
    column; ragged rows are rejected with their line number.
    """
    if condition_label is None:
        condition_label = os.path.splitext(os.path.basename(path))[0]
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        names = tuple(name.strip() for name in header)
        if len(names) < 2:
            raise ValueError(f"{path}: need at least 2 variable columns")
        if len(set(names)) != len(names):
            raise ValueError(f"{path}: duplicate variable names in header")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(names):
                raise ValueError(
                    f"{path}: row {lineno} has {len(row)} fields, "
                    f"expected {len(names)}"
                )
            parsed = []
            for name, cell in zip(names, row):
                try:
                    value = float(cell)
                except ValueError:
                    raise ValueError(
                        f"{path}: row {lineno}, column '{name}': "
                        f"cannot parse '{cell}' as a number"
                    ) from None
                if not math.isfinite(value):
                    raise ValueError(
                        f"{path}: row {lineno}, column '{name}': "
                        f"non-finite value '{cell}'"
                    )
                parsed.append(value)
            rows.append(parsed)
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least 2 data rows, got {len(rows)}")
    return SampleMatrix(np.array(rows, dtype=float), names, condition_label)


def load_conditions(inputs: list[tuple[str, str]]) -> list[SampleMatrix]:
    """Load every condition and demand exactly aligned headers."""
    if len(inputs) < 2:
        raise ValueError("need at least 2 condition files")
    data = [ingest_csv(path, label) for label, path in inputs]
    reference = data[0].variable_names
    for sample, (label, path) in zip(data[1:], inputs[1:]):
        if sample.variable_names != reference:
            raise ValueError(
                f"{path}: variable names do not match condition "
                f"'{data[0].condition_label}' (all conditions must share an "
                f"identical header, same order)"
            )
    return data


def write_csv(path: str, sample: SampleMatrix) -> None:
    """Inverse of ingest_csv, used by synthetic exports."""
    from .artifacts import atomic_write_text, fmt

    lines = [",".join(sample.variable_names)]
    for row in sample.values:
        lines.append(",".join(fmt(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")
