"""Cross-validation folds, negative sampling, and ranking candidate sets.

Fold assignment is stratified per source entity so that every retained
source keeps training instances in every fold.  All randomness flows from a
single master seed through a documented sub-seed rule, giving independent
deterministic streams for folds, negatives, and candidates.
"""

from __future__ import annotations

import hashlib
import logging
import random
from dataclasses import dataclass

from graphfeat.errors import DataError
from graphfeat.graph import VertexId
from graphfeat.schema import DatasetSchema
from graphfeat.tabular import TabularDataset

log = logging.getLogger(__name__)


def derive_seed(master_seed: int, *purpose: str) -> int:
    """Sub-seed for an independent random stream: the first 8 bytes of
    sha256("<master>:<purpose...>")."""
    text = ":".join([str(master_seed), *purpose])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def predicted_instances(
    dataset: TabularDataset, schema: DatasetSchema
) -> list[tuple[VertexId, VertexId, object]]:
    """Distinct (source, target) instances of the predicted relationship with
    their feedback label (mean over duplicate rows for numeric feedback)."""
    rel = schema.predicted
    table = dataset.table(rel.table)
    src_col, tgt_col = dataset.schema.relationship_columns(rel.name)
    src_pos = table.column_position(src_col.name)
    tgt_pos = table.column_position(tgt_col.name)
    feedback = schema.table(rel.table).feedback_column
    fb_pos = table.column_position(feedback.name) if feedback else None

    grouped: dict[tuple[VertexId, VertexId], list] = {}
    for row in table.rows:
        sv, tv = row[src_pos], row[tgt_pos]
        if sv is None or tv is None:
            continue
        s = VertexId(src_col.entity_name, str(sv))
        t = VertexId(tgt_col.entity_name, str(tv))
        if s == t:
            continue
        label = row[fb_pos] if fb_pos is not None else None
        grouped.setdefault((s, t), []).append(label)

    instances = []
    for (s, t), labels in sorted(grouped.items()):
        present = [l for l in labels if l is not None]
        if not present:
            label = None
        elif all(isinstance(l, float) for l in present):
            label = sum(present) / len(present)
        else:
            label = present[0]
        instances.append((s, t, label))
    return instances


@dataclass(frozen=True)
class FoldPlan:
    n_folds: int
    prune_threshold: int
    rng_seed: int
    instances: tuple[tuple[VertexId, VertexId, object], ...]
    assignment: tuple[int, ...]  # instance index -> fold index

    def __post_init__(self) -> None:
        if len(self.assignment) != len(self.instances):
            raise DataError("fold assignment misaligned with instances")

    def test_instances(self, fold: int) -> list[tuple[VertexId, VertexId, object]]:
        self._check_fold(fold)
        return [
            inst
            for inst, f in zip(self.instances, self.assignment)
            if f == fold
        ]

    def train_instances(self, fold: int) -> list[tuple[VertexId, VertexId, object]]:
        self._check_fold(fold)
        return [
            inst
            for inst, f in zip(self.instances, self.assignment)
            if f != fold
        ]

    def _check_fold(self, fold: int) -> None:
        if not 0 <= fold < self.n_folds:
            raise DataError(f"fold index {fold} out of range")


def make_folds(
    dataset: TabularDataset,
    schema: DatasetSchema,
    n_folds: int,
    prune_threshold: int,
    seed: int,
) -> FoldPlan:
    """Assign predicted instances to folds, stratified per source.

    Sources with fewer than prune_threshold instances are dropped.  Each
    retained source's instances are shuffled with a per-source sub-seed and
    dealt round-robin from a random starting fold, so fold sizes per source
    differ by at most 1.  Assignment never looks at feedback values.
    """
    if n_folds < 2:
        raise DataError("n_folds must be at least 2")
    instances = predicted_instances(dataset, schema)

    by_source: dict[VertexId, list[int]] = {}
    for i, (s, _t, _label) in enumerate(instances):
        by_source.setdefault(s, []).append(i)
    retained_sources = {
        s for s, idxs in by_source.items() if len(idxs) >= prune_threshold
    }
    if not retained_sources:
        raise DataError(
            f"pruning at threshold {prune_threshold} removed every source"
        )
    retained = [
        i for i, (s, _t, _l) in enumerate(instances) if s in retained_sources
    ]
    if len(retained) < n_folds:
        raise DataError(
            f"only {len(retained)} instances remain after pruning; "
            f"cannot build {n_folds} folds"
        )

    assignment: dict[int, int] = {}
    for s in sorted(retained_sources):
        idxs = sorted(by_source[s])
        rng = random.Random(derive_seed(seed, "folds", str(s)))
        rng.shuffle(idxs)
        offset = rng.randrange(n_folds)
        for pos, idx in enumerate(idxs):
            assignment[idx] = (pos + offset) % n_folds

    kept_instances = tuple(instances[i] for i in retained)
    kept_assignment = tuple(assignment[i] for i in retained)
    return FoldPlan(
        n_folds=n_folds,
        prune_threshold=prune_threshold,
        rng_seed=seed,
        instances=kept_instances,
        assignment=kept_assignment,
    )


def sample_negatives(
    training_positives,
    target_universe,
    associated: dict[VertexId, set[VertexId]],
    ratio: float,
    seed: int,
) -> list[tuple[VertexId, VertexId]]:
    """Per source, ratio * |positives| targets drawn uniformly without
    replacement from targets never associated with the source in any split."""
    if ratio < 0:
        raise DataError("negative-sampling ratio must be non-negative")
    universe = sorted(set(target_universe))
    by_source: dict[VertexId, list[VertexId]] = {}
    for s, t in training_positives:
        by_source.setdefault(s, []).append(t)

    negatives: list[tuple[VertexId, VertexId]] = []
    for s in sorted(by_source):
        count = round(ratio * len(by_source[s]))
        if count == 0:
            continue
        pool = [t for t in universe if t not in associated.get(s, set())]
        if len(pool) < count:
            raise DataError(
                f"target universe exhausted for source {s}: need {count} "
                f"negatives, only {len(pool)} unassociated targets"
            )
        rng = random.Random(derive_seed(seed, "negatives", str(s)))
        negatives.extend((s, t) for t in rng.sample(pool, count))
    return negatives


@dataclass(frozen=True)
class CandidateSet:
    source: VertexId
    positives: tuple[VertexId, ...]
    negatives: tuple[VertexId, ...]
    size: int

    def __post_init__(self) -> None:
        if set(self.positives) & set(self.negatives):
            raise DataError("candidate positives and negatives overlap")
        if len(self.positives) + len(self.negatives) != self.size:
            raise DataError("candidate set size mismatch")


def build_candidate_sets(
    test_positives,
    sizes,
    positives_per_set: int,
    target_universe,
    associated: dict[VertexId, set[VertexId]],
    seed: int,
) -> list[CandidateSet]:
    """Per test source and per size: positives_per_set held-out positives
    plus random never-associated fillers.  Sources with too few test
    positives are skipped with a logged notice."""
    if positives_per_set < 1:
        raise DataError("positives_per_set must be positive")
    for size in sizes:
        if size < positives_per_set:
            raise DataError(
                f"candidate size {size} is smaller than positives_per_set "
                f"{positives_per_set}"
            )
    universe = sorted(set(target_universe))
    by_source: dict[VertexId, list[VertexId]] = {}
    for s, t in test_positives:
        by_source.setdefault(s, []).append(t)

    result: list[CandidateSet] = []
    for s in sorted(by_source):
        positives = sorted(by_source[s])
        if len(positives) < positives_per_set:
            log.info(
                "skipping source %s: %d test positives < %d required",
                s,
                len(positives),
                positives_per_set,
            )
            continue
        for size in sizes:
            rng = random.Random(
                derive_seed(seed, "candidates", str(s), str(size))
            )
            chosen = sorted(rng.sample(positives, positives_per_set))
            fillers_needed = size - positives_per_set
            pool = [t for t in universe if t not in associated.get(s, set())]
            if len(pool) < fillers_needed:
                raise DataError(
                    f"target universe exhausted for source {s}: need "
                    f"{fillers_needed} fillers, only {len(pool)} available"
                )
            fillers = rng.sample(pool, fillers_needed)
            result.append(
                CandidateSet(
                    source=s,
                    positives=tuple(chosen),
                    negatives=tuple(fillers),
                    size=size,
                )
            )
    return result
