"""Interaction datasets: loading, coverage filtering, binarization, fold
splitting and the profile-elicitation ranking."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .kg import EntityId, KnowledgeGraph

ENTROPY_EPSILON = 1e-6


class InteractionFileError(ValueError):
    def __init__(self, path: str | Path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


@dataclass(frozen=True)
class Interaction:
    user: str
    item: EntityId
    rating: float | None = None
    timestamp: float | None = None
    weight: float | None = None

    def recency_value(self, mode: str) -> float:
        value = self.timestamp if mode == "timestamp" else self.weight
        if value is None:
            raise ValueError(f"interaction ({self.user}, {self.item}) lacks {mode}")
        return value


@dataclass(frozen=True)
class ColumnSchema:
    """Column mapping for delimited interaction files (names or 0-based
    indexes).  Exactly one of timestamp/weight is expected per dataset."""

    user: str | int
    item: str | int
    rating: str | int | None = None
    timestamp: str | int | None = None
    weight: str | int | None = None
    delimiter: str = ","
    has_header: bool = True


class Dataset:
    """Immutable collection of user-item interactions.

    ``recency_mode`` declares which field orders a user's profile for
    recency: interaction timestamps, or listen-count weights for play-log
    data where heavier listening substitutes for recency.
    """

    def __init__(self, interactions: Iterable[Interaction], recency_mode: str = "timestamp"):
        if recency_mode not in ("timestamp", "weight"):
            raise ValueError(f"unknown recency mode {recency_mode!r}")
        self.interactions: tuple[Interaction, ...] = tuple(interactions)
        self.recency_mode = recency_mode
        self.users: tuple[str, ...] = tuple(sorted({i.user for i in self.interactions}))
        self.items: tuple[EntityId, ...] = tuple(sorted({i.item for i in self.interactions}))
        by_user: dict[str, list[Interaction]] = {}
        for inter in self.interactions:
            by_user.setdefault(inter.user, []).append(inter)
        self._by_user = by_user

    def __len__(self) -> int:
        return len(self.interactions)

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_items(self) -> int:
        return len(self.items)

    def user_interactions(self, user: str) -> tuple[Interaction, ...]:
        return tuple(self._by_user.get(user, ()))

    def user_items(self, user: str) -> frozenset[EntityId]:
        return frozenset(i.item for i in self._by_user.get(user, ()))

    def rating_values(self) -> tuple[float, ...]:
        return tuple(sorted({i.rating for i in self.interactions if i.rating is not None}))

    def stats(self) -> dict[str, int]:
        return {"users": self.n_users, "items": self.n_items, "interactions": len(self)}


def _column_index(header: Sequence[str] | None, column: str | int, path, what: str) -> int:
    if isinstance(column, int):
        return column
    if header is None:
        raise InteractionFileError(path, 1, f"named column {column!r} requires a header")
    try:
        return header.index(column)
    except ValueError:
        raise InteractionFileError(path, 1, f"missing mapped {what} column {column!r}") from None


def _parse_float(row: Sequence[str], idx: int | None, path, line_no: int, what: str) -> float | None:
    if idx is None:
        return None
    if idx >= len(row) or not row[idx].strip():
        return None
    try:
        return float(row[idx])
    except ValueError:
        raise InteractionFileError(path, line_no, f"unparseable {what} {row[idx]!r}") from None


def load_interactions(path: str | Path, schema: ColumnSchema) -> Dataset:
    """Load a delimited interaction file into a :class:`Dataset`.

    The recency mode follows the schema: a mapped weight column declares
    weight mode, otherwise timestamp mode.
    """
    interactions: list[Interaction] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=schema.delimiter)
        header: Sequence[str] | None = None
        rows = enumerate(reader, start=1)
        if schema.has_header:
            try:
                _, header = next(rows)
            except StopIteration:
                return Dataset([], "weight" if schema.weight is not None else "timestamp")
        u_idx = _column_index(header, schema.user, path, "user")
        i_idx = _column_index(header, schema.item, path, "item")
        r_idx = None if schema.rating is None else _column_index(header, schema.rating, path, "rating")
        t_idx = None if schema.timestamp is None else _column_index(header, schema.timestamp, path, "timestamp")
        w_idx = None if schema.weight is None else _column_index(header, schema.weight, path, "weight")
        for line_no, row in rows:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if max(u_idx, i_idx) >= len(row):
                raise InteractionFileError(path, line_no, f"expected at least {max(u_idx, i_idx) + 1} columns")
            user = row[u_idx].strip()
            item = row[i_idx].strip()
            if not user or not item:
                raise InteractionFileError(path, line_no, "empty user or item id")
            interactions.append(
                Interaction(
                    user=user,
                    item=item,
                    rating=_parse_float(row, r_idx, path, line_no, "rating"),
                    timestamp=_parse_float(row, t_idx, path, line_no, "timestamp"),
                    weight=_parse_float(row, w_idx, path, line_no, "weight"),
                )
            )
    mode = "weight" if schema.weight is not None else "timestamp"
    return Dataset(interactions, mode)


def filter_by_kg_coverage(d: Dataset, g: KnowledgeGraph) -> Dataset:
    """Drop interactions whose item has no triple in the graph (and users
    left empty).  Applying the filter twice equals applying it once."""
    covered = {item for item in d.items if item in g and (g.out_edges(item) or g.in_edges(item))}
    kept = [i for i in d.interactions if i.item in covered]
    return Dataset(kept, d.recency_mode)


def binarize(d: Dataset) -> Dataset:
    """Make every interaction an implicit positive (rating 1), with no
    threshold: even low-rated items captured the user's attention."""
    return Dataset(
        [replace(i, rating=1.0) for i in d.interactions],
        d.recency_mode,
    )


@dataclass(frozen=True)
class FoldSplit:
    fold_index: int
    train: Dataset
    test: Dataset


def kfold_split(d: Dataset, k: int, seed: int) -> list[FoldSplit]:
    """Per-user stratified k-fold partition.

    Each user's interactions are shuffled (seeded) and dealt into ``k``
    chunks differing in size by at most one; chunk ``f`` is the user's test
    share in fold ``f``.  Users with fewer than ``k`` interactions simply
    appear in fewer test folds.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = np.random.default_rng(seed)
    indices_by_user: dict[str, list[int]] = {}
    for idx, inter in enumerate(d.interactions):
        indices_by_user.setdefault(inter.user, []).append(idx)
    test_indices: list[set[int]] = [set() for _ in range(k)]
    for user in d.users:
        order = rng.permutation(indices_by_user[user])
        for f, chunk in enumerate(np.array_split(order, k)):
            test_indices[f].update(int(j) for j in chunk)
    folds = []
    for f in range(k):
        train = [i for idx, i in enumerate(d.interactions) if idx not in test_indices[f]]
        test = [i for idx, i in enumerate(d.interactions) if idx in test_indices[f]]
        folds.append(
            FoldSplit(
                fold_index=f,
                train=Dataset(train, d.recency_mode),
                test=Dataset(test, d.recency_mode),
            )
        )
    return folds


def export_fold_manifest(folds: Sequence[FoldSplit], path: str | Path, delimiter: str = ",") -> None:
    """Write (user, item, fold, split) rows for reproducibility."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow(["user", "item", "fold", "split"])
        for fold in folds:
            for part, ds in (("train", fold.train), ("test", fold.test)):
                for inter in sorted(ds.interactions, key=lambda i: (i.user, i.item)):
                    writer.writerow([inter.user, inter.item, fold.fold_index, part])


def item_rating_entropy(d: Dataset) -> dict[EntityId, float]:
    """Shannon entropy (natural log) of each item's rating histogram over
    the dataset's observed rating scale.  Degenerate histograms (a single
    rating value, or no ratings) get ``ENTROPY_EPSILON``."""
    histograms: dict[EntityId, dict[float, int]] = {}
    for inter in d.interactions:
        if inter.rating is None:
            continue
        hist = histograms.setdefault(inter.item, {})
        hist[inter.rating] = hist.get(inter.rating, 0) + 1
    entropies: dict[EntityId, float] = {}
    for item in d.items:
        hist = histograms.get(item, {})
        total = sum(hist.values())
        if total == 0 or len(hist) < 2:
            entropies[item] = ENTROPY_EPSILON
            continue
        h = -sum((c / total) * math.log(c / total) for c in hist.values())
        entropies[item] = max(h, ENTROPY_EPSILON)
    return entropies


def elicitation_ranking(d: Dataset, top: int) -> list[EntityId]:
    """Rank items by log10(popularity * rating entropy) and return the top
    ``top`` ids, best first (ties by item id).

    Runs on raw (pre-binarization) ratings; the caller shuffles the
    returned list for display.
    """
    entropies = item_rating_entropy(d)
    popularity: dict[EntityId, int] = {}
    for inter in d.interactions:
        popularity[inter.item] = popularity.get(inter.item, 0) + 1
    scores = {
        item: math.log10(popularity[item] * entropies[item])
        for item in d.items
    }
    ranked = sorted(d.items, key=lambda item: (-scores[item], item))
    return ranked[:top]
