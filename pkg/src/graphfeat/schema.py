"""Declarative dataset schemas: tables, entity columns, and relationships.

A schema names the tables of a tabular dataset, assigns each column a role
(source_id, target_id, feedback, or feature) and an entity type, and declares
the typed relationships between entity columns.  Exactly one relationship is
the prediction target.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from graphfeat.errors import SchemaError

ROLES = ("source_id", "target_id", "feedback", "feature")
VALUE_KINDS = ("categorical", "numeric")


@dataclass(frozen=True)
class BinningSpec:
    """How a numeric column is discretized into categorical bin labels."""

    strategy: str  # "quantile" or "fixed_width"
    bins: int | None = None
    width: float | None = None

    def __post_init__(self) -> None:
        if self.strategy == "quantile":
            if self.bins is None or self.bins < 1:
                raise SchemaError("quantile binning requires bins >= 1")
            if self.width is not None:
                raise SchemaError("quantile binning does not take a width")
        elif self.strategy == "fixed_width":
            if self.width is None or not self.width > 0:
                raise SchemaError("fixed_width binning requires width > 0")
            if self.bins is not None:
                raise SchemaError("fixed_width binning does not take a bin count")
        else:
            raise SchemaError(f"unknown binning strategy {self.strategy!r}")

    @classmethod
    def default(cls) -> "BinningSpec":
        return cls(strategy="quantile", bins=4)


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    role: str
    entity: str | None = None
    value_kind: str = "categorical"
    binning: BinningSpec | None = None

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise SchemaError(f"column {self.name!r}: unknown role {self.role!r}")
        if self.value_kind not in VALUE_KINDS:
            raise SchemaError(
                f"column {self.name!r}: unknown value_kind {self.value_kind!r}"
            )
        if self.role in ("source_id", "target_id") and self.value_kind == "numeric":
            raise SchemaError(
                f"column {self.name!r}: identifier columns must be categorical"
            )

    @property
    def entity_name(self) -> str | None:
        """Entity type contributed by this column, None for feedback columns."""
        if self.role == "feedback":
            return None
        return self.entity if self.entity is not None else self.name


@dataclass(frozen=True)
class TableSpec:
    name: str
    file: str
    columns: tuple[ColumnSpec, ...]

    def __post_init__(self) -> None:
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise SchemaError(f"table {self.name!r}: duplicate column names")
        feedback = [c for c in self.columns if c.role == "feedback"]
        if len(feedback) > 1:
            raise SchemaError(f"table {self.name!r}: more than one feedback column")
        for c in self.columns:
            if (
                c.role == "feature"
                and c.value_kind == "numeric"
                and c.binning is None
            ):
                raise SchemaError(
                    f"table {self.name!r}: numeric feature column {c.name!r} "
                    "requires a binning spec"
                )

    @property
    def feedback_column(self) -> ColumnSpec | None:
        for c in self.columns:
            if c.role == "feedback":
                return c
        return None

    def column(self, name: str) -> ColumnSpec:
        for c in self.columns:
            if c.name == name:
                return c
        raise SchemaError(f"table {self.name!r} has no column {name!r}")

    def entity_columns(self) -> tuple[ColumnSpec, ...]:
        return tuple(c for c in self.columns if c.role != "feedback")


@dataclass(frozen=True)
class RelationshipSpec:
    """A typed association between two entity columns of one table."""

    name: str
    table: str
    source_entity: str
    target_entity: str
    source_column: str | None = None
    target_column: str | None = None
    feature_labels: tuple[str, ...] = ()


@dataclass(frozen=True)
class DatasetSchema:
    tables: tuple[TableSpec, ...]
    relationships: tuple[RelationshipSpec, ...]
    predicted_relationship: str
    _columns: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        table_names = [t.name for t in self.tables]
        if len(set(table_names)) != len(table_names):
            raise SchemaError("duplicate table names")
        rel_names = [r.name for r in self.relationships]
        if len(set(rel_names)) != len(rel_names):
            raise SchemaError("duplicate relationship names")
        if self.predicted_relationship not in rel_names:
            raise SchemaError(
                f"predicted relationship {self.predicted_relationship!r} "
                "is not declared"
            )
        for rel in self.relationships:
            src, tgt = self._resolve_columns(rel)
            self._columns[rel.name] = (src, tgt)

    def table(self, name: str) -> TableSpec:
        for t in self.tables:
            if t.name == name:
                return t
        raise SchemaError(f"unknown table {name!r}")

    @property
    def predicted(self) -> RelationshipSpec:
        return next(
            r for r in self.relationships if r.name == self.predicted_relationship
        )

    @property
    def edge_types(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.relationships)

    @property
    def entity_types(self) -> frozenset[str]:
        names = set()
        for t in self.tables:
            for c in t.entity_columns():
                names.add(c.entity_name)
        return frozenset(names)

    def relationship(self, name: str) -> RelationshipSpec:
        for r in self.relationships:
            if r.name == name:
                return r
        raise SchemaError(f"unknown relationship {name!r}")

    def relationship_columns(self, name: str) -> tuple[ColumnSpec, ColumnSpec]:
        """(source column, target column) backing the named relationship."""
        return self._columns[name]

    def relationship_endpoints(self, name: str) -> tuple[str, str]:
        rel = self.relationship(name)
        return rel.source_entity, rel.target_entity

    def _resolve_columns(
        self, rel: RelationshipSpec
    ) -> tuple[ColumnSpec, ColumnSpec]:
        table = self.table(rel.table)

        def pick(entity: str, explicit: str | None, exclude: ColumnSpec | None):
            if explicit is not None:
                col = table.column(explicit)
                if col.entity_name != entity:
                    raise SchemaError(
                        f"relationship {rel.name!r}: column {explicit!r} does not "
                        f"hold entity type {entity!r}"
                    )
                return col
            candidates = [
                c
                for c in table.entity_columns()
                if c.entity_name == entity and c is not exclude
            ]
            if not candidates:
                raise SchemaError(
                    f"relationship {rel.name!r}: table {table.name!r} declares no "
                    f"column for entity type {entity!r}"
                )
            if len(candidates) > 1:
                raise SchemaError(
                    f"relationship {rel.name!r}: entity type {entity!r} is "
                    f"ambiguous in table {table.name!r}; set source_column/"
                    "target_column explicitly"
                )
            return candidates[0]

        src = pick(rel.source_entity, rel.source_column, None)
        tgt = pick(rel.target_entity, rel.target_column, src)
        if src is tgt:
            raise SchemaError(
                f"relationship {rel.name!r}: source and target resolve to the "
                "same column"
            )
        for label in rel.feature_labels:
            table.column(label)
        return src, tgt


def _parse_binning(raw: dict) -> BinningSpec:
    if not isinstance(raw, dict):
        raise SchemaError("binning must be an object")
    return BinningSpec(
        strategy=raw.get("strategy", "quantile"),
        bins=raw.get("bins"),
        width=raw.get("width"),
    )


def _parse_column(raw: dict) -> ColumnSpec:
    if not isinstance(raw, dict) or "name" not in raw:
        raise SchemaError("each column needs at least a name")
    binning = _parse_binning(raw["binning"]) if "binning" in raw else None
    return ColumnSpec(
        name=str(raw["name"]),
        role=raw.get("role", "feature"),
        entity=raw.get("entity"),
        value_kind=raw.get("value_kind", "categorical"),
        binning=binning,
    )


def _parse_table(raw: dict) -> TableSpec:
    if not isinstance(raw, dict):
        raise SchemaError("each table must be an object")
    for key in ("name", "file", "columns"):
        if key not in raw:
            raise SchemaError(f"table is missing required key {key!r}")
    return TableSpec(
        name=str(raw["name"]),
        file=str(raw["file"]),
        columns=tuple(_parse_column(c) for c in raw["columns"]),
    )


def _parse_relationship(raw: dict) -> tuple[RelationshipSpec, bool]:
    if not isinstance(raw, dict):
        raise SchemaError("each relationship must be an object")
    for key in ("name", "table", "source_entity", "target_entity"):
        if key not in raw:
            raise SchemaError(f"relationship is missing required key {key!r}")
    labels = raw.get("feature_labels", [])
    if isinstance(labels, str):
        labels = [labels]
    rel = RelationshipSpec(
        name=str(raw["name"]),
        table=str(raw["table"]),
        source_entity=str(raw["source_entity"]),
        target_entity=str(raw["target_entity"]),
        source_column=raw.get("source_column"),
        target_column=raw.get("target_column"),
        feature_labels=tuple(str(x) for x in labels),
    )
    return rel, bool(raw.get("predicted", False))


def parse_schema(document: dict) -> DatasetSchema:
    """Build a validated schema from an already-parsed JSON document."""
    if not isinstance(document, dict):
        raise SchemaError("schema document must be a JSON object")
    for key in ("tables", "relationships"):
        if key not in document:
            raise SchemaError(f"schema is missing required key {key!r}")
    tables = tuple(_parse_table(t) for t in document["tables"])
    parsed = [_parse_relationship(r) for r in document["relationships"]]
    relationships = tuple(rel for rel, _ in parsed)

    marked = [rel.name for rel, flag in parsed if flag]
    declared = document.get("predicted")
    if declared is not None:
        marked.append(str(declared))
    marked = sorted(set(marked))
    if len(marked) == 0:
        raise SchemaError("no relationship is marked predicted")
    if len(marked) > 1:
        raise SchemaError(f"multiple relationships marked predicted: {marked}")
    return DatasetSchema(
        tables=tables,
        relationships=relationships,
        predicted_relationship=marked[0],
    )


def load_schema(path: str) -> DatasetSchema:
    """Load and validate a schema document from a JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            document = json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"schema file not found: {path}")
    except json.JSONDecodeError as exc:
        raise SchemaError(f"schema file {path} is not valid JSON: {exc}")
    return parse_schema(document)
