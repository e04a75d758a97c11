"""Named feature combinations selected by column-name globs."""

from __future__ import annotations

from dataclasses import dataclass
from fnmatch import fnmatchcase

from evalharness.errors import PlanError


@dataclass(frozen=True)
class FeatureCombination:
    name: str
    patterns: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.name:
            raise PlanError("combination name must be non-empty")
        if not self.patterns:
            raise PlanError(f"combination {self.name!r} has no column patterns")

    def select(self, columns) -> list[str]:
        """Columns matching any pattern, in table order; errors when empty."""
        chosen = [
            c
            for c in columns
            if any(fnmatchcase(c, pattern) for pattern in self.patterns)
        ]
        if not chosen:
            raise PlanError(
                f"combination {self.name!r} matches no columns "
                f"(patterns {list(self.patterns)})"
            )
        return chosen


def parse_combinations(raw) -> list[FeatureCombination]:
    if not isinstance(raw, list) or not raw:
        raise PlanError("plan needs a non-empty 'combinations' list")
    combos = []
    for item in raw:
        if not isinstance(item, dict) or "name" not in item or "columns" not in item:
            raise PlanError(f"combination entries need 'name' and 'columns': {item}")
        combos.append(
            FeatureCombination(str(item["name"]), tuple(item["columns"]))
        )
    names = [c.name for c in combos]
    if len(set(names)) != len(names):
        raise PlanError(f"duplicate combination names: {names}")
    return combos
