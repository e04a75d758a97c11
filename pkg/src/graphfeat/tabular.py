"""CSV ingestion, value canonicalization, and numeric discretization."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

from graphfeat.errors import DataError
from graphfeat.schema import BinningSpec, ColumnSpec, DatasetSchema, TableSpec


def canonical_value(raw: str | None) -> str | None:
    """Trimmed, case-preserved cell value; None for empty cells."""
    if raw is None:
        return None
    value = raw.strip()
    return value if value else None


def format_number(value: float) -> str:
    """Canonical text form used for labels and CSV cells."""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return format(value, ".12g")


@dataclass
class TableData:
    spec: TableSpec
    rows: list[tuple]
    index: dict[str, dict[str, list[int]]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.index:
            self.rebuild_index()

    def column_position(self, name: str) -> int:
        for i, col in enumerate(self.spec.columns):
            if col.name == name:
                return i
        raise DataError(f"table {self.spec.name!r} has no column {name!r}")

    def column_values(self, name: str) -> list:
        pos = self.column_position(name)
        return [row[pos] for row in self.rows]

    def rebuild_index(self) -> None:
        self.index = {}
        for col in self.spec.entity_columns():
            pos = self.column_position(col.name)
            values: dict[str, list[int]] = {}
            for i, row in enumerate(self.rows):
                value = row[pos]
                if value is None:
                    continue
                values.setdefault(value, []).append(i)
            self.index[col.name] = values


@dataclass
class TabularDataset:
    schema: DatasetSchema
    tables: dict[str, TableData]
    discretized: bool = False

    def table(self, name: str) -> TableData:
        try:
            return self.tables[name]
        except KeyError:
            raise DataError(f"dataset has no table {name!r}")

    @property
    def row_count(self) -> int:
        return sum(len(t.rows) for t in self.tables.values())


def _parse_cell(raw: str | None, column: ColumnSpec):
    value = canonical_value(raw)
    if value is None:
        if column.role in ("source_id", "target_id"):
            raise DataError(
                f"empty identifier cell in column {column.name!r}"
            )
        return None
    if column.value_kind == "numeric" or column.role == "feedback":
        if column.role == "feedback" and column.value_kind == "categorical":
            return value
        try:
            parsed = float(value)
        except ValueError:
            raise DataError(
                f"unparseable numeric value {value!r} in column {column.name!r}"
            )
        if not math.isfinite(parsed):
            raise DataError(
                f"non-finite numeric value {value!r} in column {column.name!r}"
            )
        return parsed
    return value


def _ingest_table(spec: TableSpec, data_dir: str) -> TableData:
    path = os.path.join(data_dir, spec.file)
    if not os.path.exists(path):
        raise DataError(f"table file missing: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"table file {path} has no header row")
        header = [h.strip() for h in header]
        positions = []
        for col in spec.columns:
            if col.name not in header:
                raise DataError(
                    f"table file {path} is missing column {col.name!r}"
                )
            positions.append(header.index(col.name))
        rows = []
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise DataError(
                    f"{path}:{line_no}: expected {len(header)} fields, "
                    f"got {len(record)}"
                )
            try:
                rows.append(
                    tuple(
                        _parse_cell(record[pos], col)
                        for pos, col in zip(positions, spec.columns)
                    )
                )
            except DataError as exc:
                raise DataError(f"{path}:{line_no}: {exc}")
    return TableData(spec=spec, rows=rows)


def ingest_tables(schema: DatasetSchema, data_dir: str) -> TabularDataset:
    """Load every table of the schema from data_dir.

    Numeric feature columns stay raw; discretization is a separate step.
    """
    tables = {t.name: _ingest_table(t, data_dir) for t in schema.tables}
    return TabularDataset(schema=schema, tables=tables)


def _quantile_labels(values: list[float], bins: int) -> dict[float, str]:
    """Assign each distinct value a bin label.

    Distinct values are walked in sorted order; a bin closes at the first
    distinct value whose cumulative count reaches the running quantile target,
    so equal values always share a bin.
    """
    n = len(values)
    counts: dict[float, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    distinct = sorted(counts)
    n_bins = min(bins, len(distinct))

    groups: list[list[float]] = []
    current: list[float] = []
    cumulative = 0
    boundary = 1
    for v in distinct:
        current.append(v)
        cumulative += counts[v]
        if boundary < n_bins and cumulative >= boundary * n / n_bins:
            groups.append(current)
            current = []
            boundary += 1
    if current:
        groups.append(current)

    labels: dict[float, str] = {}
    for group in groups:
        label = f"[{format_number(group[0])}..{format_number(group[-1])}]"
        for v in group:
            labels[v] = label
    return labels


def _fixed_width_label(value: float, width: float) -> str:
    k = math.floor(value / width)
    return f"[{format_number(k * width)}..{format_number((k + 1) * width)})"


def discretize_column(values, spec: BinningSpec) -> list[str]:
    """Map a numeric sequence onto deterministic bin labels."""
    values = list(values)
    if not values:
        raise DataError("cannot discretize an empty column")
    for v in values:
        if not math.isfinite(v):
            raise DataError("cannot discretize non-finite values")
    if spec.strategy == "fixed_width":
        return [_fixed_width_label(v, spec.width) for v in values]
    labels = _quantile_labels(values, spec.bins)
    return [labels[v] for v in values]


def discretize_dataset(dataset: TabularDataset) -> TabularDataset:
    """Replace numeric feature cells with bin labels, leaving feedback raw.

    Already-discretized datasets are returned unchanged, so the operation is
    idempotent.
    """
    if dataset.discretized:
        return dataset
    tables: dict[str, TableData] = {}
    for name, table in dataset.tables.items():
        numeric = [
            c
            for c in table.spec.columns
            if c.role == "feature" and c.value_kind == "numeric"
        ]
        if not numeric:
            tables[name] = table
            continue
        columns = {c.name: table.column_values(c.name) for c in numeric}
        mapped: dict[str, list] = {}
        for col in numeric:
            present = [v for v in columns[col.name] if v is not None]
            if not present:
                mapped[col.name] = columns[col.name]
                continue
            labels = iter(discretize_column(present, col.binning))
            mapped[col.name] = [
                next(labels) if v is not None else None for v in columns[col.name]
            ]
        positions = {table.column_position(c.name): c.name for c in numeric}
        rows = [
            tuple(
                mapped[positions[i]][r] if i in positions else cell
                for i, cell in enumerate(row)
            )
            for r, row in enumerate(table.rows)
        ]
        tables[name] = TableData(spec=table.spec, rows=rows)
    return TabularDataset(schema=dataset.schema, tables=tables, discretized=True)


def filter_sparse_features(
    dataset: TabularDataset, max_distinct_fraction: float = 0.5
) -> tuple[TabularDataset, list[tuple[str, str]]]:
    """Blank categorical feature columns that are too close to unique.

    A column with no binning spec whose distinct-value count exceeds the given
    fraction of the table's row count carries almost no shared structure; its
    cells are cleared so it contributes no vertices or edges.
    """
    dropped: list[tuple[str, str]] = []
    tables: dict[str, TableData] = {}
    for name, table in dataset.tables.items():
        n = len(table.rows)
        to_drop = []
        for col in table.spec.columns:
            if col.role != "feature" or col.binning is not None or n == 0:
                continue
            if col.value_kind == "numeric":
                continue
            distinct = len(table.index.get(col.name, {}))
            if distinct > max_distinct_fraction * n:
                to_drop.append(table.column_position(col.name))
                dropped.append((name, col.name))
        if not to_drop:
            tables[name] = table
            continue
        drop = set(to_drop)
        rows = [
            tuple(None if i in drop else cell for i, cell in enumerate(row))
            for row in table.rows
        ]
        tables[name] = TableData(spec=table.spec, rows=rows)
    return (
        TabularDataset(
            schema=dataset.schema, tables=tables, discretized=dataset.discretized
        ),
        dropped,
    )
