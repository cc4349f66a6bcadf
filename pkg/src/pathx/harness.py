"""End-to-end offline evaluation pipeline.

For each fold and recommender: fit, recommend, explain with each scorer
and score the explanation lists with the six path metrics; aggregates are
means over folds.  All intermediate artifacts are persisted to the output
directory, and stage failures land in an error manifest instead of
aborting the sweep.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import traceback
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import yaml

from . import metrics as pm
from .data import ColumnSchema, Dataset, binarize, filter_by_kg_coverage, kfold_split, load_interactions
from .explain import Explanation, ScoreContext, attribute_reach, build_explanation, rank_attributes
from .kg import DEFAULT_HIERARCHY_EDGES, EntityId, KnowledgeGraph, load_triples
from .ranking import ranking_metrics
from .recommenders import ModelSpec, RankedList, fit
from .stats import wilcoxon_signed_rank

logger = logging.getLogger(__name__)

PATH_METRICS = ("mid", "tid", "lir", "etd", "tpd", "sep")


class ConfigError(ValueError):
    """Invalid run configuration (missing paths, bad values)."""


@dataclass(frozen=True)
class RunConfig:
    dataset_path: Path
    schema: ColumnSchema
    kg_path: Path
    out_dir: Path
    models: tuple[ModelSpec, ...]
    scorers: tuple[str, ...] = ("explod", "explod_v2", "pem")
    folds: int = 10
    fold_subset: tuple[int, ...] | None = None
    top_ks: tuple[int, ...] = (1, 5)
    ranking_ks: tuple[int, ...] = (1, 3, 5, 10)
    seed: int = 0
    alpha: float = 0.5
    beta_w: float = 0.5
    ewma_beta: float = 0.3
    max_attrs: int = 3
    max_items: int = 3
    kg_delimiter: str = "\t"
    kg_item_flag_column: bool = False
    hierarchy_edges: tuple[str, ...] = DEFAULT_HIERARCHY_EDGES
    names_path: Path | None = None

    def validate(self) -> None:
        if not Path(self.dataset_path).exists():
            raise ConfigError(f"dataset file not found: {self.dataset_path}")
        if not Path(self.kg_path).exists():
            raise ConfigError(f"knowledge graph file not found: {self.kg_path}")
        if self.folds < 2:
            raise ConfigError("folds must be at least 2")
        if any(k < 1 for k in self.top_ks):
            raise ConfigError("top-k values must be >= 1")
        if not self.models:
            raise ConfigError("at least one recommender must be configured")
        if self.names_path is not None and not Path(self.names_path).exists():
            raise ConfigError(f"names file not found: {self.names_path}")


def load_config(path: str | Path, **overrides) -> RunConfig:
    """Read a YAML run configuration; keyword overrides win over the file."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    raw.update({k: v for k, v in overrides.items() if v is not None})
    base = Path(path).parent

    def resolve(p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else base / p

    try:
        schema_raw = dict(raw.get("schema", {}))
        schema = ColumnSchema(
            user=schema_raw.get("user", "user"),
            item=schema_raw.get("item", "item"),
            rating=schema_raw.get("rating"),
            timestamp=schema_raw.get("timestamp"),
            weight=schema_raw.get("weight"),
            delimiter=schema_raw.get("delimiter", ","),
            has_header=bool(schema_raw.get("has_header", True)),
        )
        models = tuple(
            ModelSpec(kind=m["kind"], params=dict(m.get("params", {}))) if isinstance(m, dict) else ModelSpec(kind=m)
            for m in raw.get("models", [])
        )
        return RunConfig(
            dataset_path=resolve(raw["dataset"]),
            schema=schema,
            kg_path=resolve(raw["kg"]),
            out_dir=Path(overrides.get("out_dir") or resolve(raw.get("out", "out"))),
            models=models,
            scorers=tuple(raw.get("scorers", ("explod", "explod_v2", "pem"))),
            folds=int(raw.get("folds", 10)),
            fold_subset=tuple(raw["fold_subset"]) if raw.get("fold_subset") is not None else None,
            top_ks=tuple(int(k) for k in raw.get("top_ks", (1, 5))),
            ranking_ks=tuple(int(k) for k in raw.get("ranking_ks", (1, 3, 5, 10))),
            seed=int(raw.get("seed", 0)),
            alpha=float(raw.get("alpha", 0.5)),
            beta_w=float(raw.get("beta_w", 0.5)),
            ewma_beta=float(raw.get("ewma_beta", 0.3)),
            max_attrs=int(raw.get("max_attrs", 3)),
            max_items=int(raw.get("max_items", 3)),
            kg_delimiter=raw.get("kg_delimiter", "\t"),
            kg_item_flag_column=bool(raw.get("kg_item_flag_column", False)),
            hierarchy_edges=tuple(raw.get("hierarchy_edges", DEFAULT_HIERARCHY_EDGES)),
            names_path=resolve(raw["names"]) if raw.get("names") else None,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc


@dataclass
class ResultsTable:
    """Aggregated path metrics plus significance marks and ranking bundles."""

    rows: dict[tuple[str, str, int], dict[str, float]] = field(default_factory=dict)
    per_user: dict[tuple[str, str, int], list[pm.UserMetricRow]] = field(default_factory=dict)
    significance: dict[tuple[str, int, str, str, str], float] = field(default_factory=dict)
    pair_counts: dict[tuple[str, int, str, str], int] = field(default_factory=dict)
    ranking: dict[str, dict[str, dict[int, float]]] = field(default_factory=dict)
    errors: list[dict[str, str]] = field(default_factory=list)
    scorers: tuple[str, ...] = ()
    models: tuple[str, ...] = ()
    top_ks: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {
            "rows": [
                {"model": m, "scorer": s, "k": k, "metrics": vals}
                for (m, s, k), vals in sorted(self.rows.items())
            ],
            "per_user": [
                {
                    "model": m,
                    "scorer": s,
                    "k": k,
                    "rows": [
                        {
                            "user": r.user,
                            "sep": r.sep,
                            "lir": r.lir,
                            "etd": r.etd,
                            "mid": r.mid,
                            "shown_items": sorted(r.shown_items),
                            "shown_attrs": sorted(r.shown_attrs),
                        }
                        for r in rows
                    ],
                }
                for (m, s, k), rows in sorted(self.per_user.items())
            ],
            "significance": [
                {"model": m, "k": k, "metric": metric, "a": a, "b": b, "p": p}
                for (m, k, metric, a, b), p in sorted(self.significance.items())
            ],
            "pair_counts": [
                {"model": m, "k": k, "a": a, "b": b, "n": n}
                for (m, k, a, b), n in sorted(self.pair_counts.items())
            ],
            "ranking": self.ranking,
            "errors": self.errors,
            "scorers": list(self.scorers),
            "models": list(self.models),
            "top_ks": list(self.top_ks),
        }

    @classmethod
    def from_json(cls, payload: dict) -> "ResultsTable":
        table = cls(
            scorers=tuple(payload.get("scorers", ())),
            models=tuple(payload.get("models", ())),
            top_ks=tuple(payload.get("top_ks", ())),
        )
        for row in payload.get("rows", []):
            table.rows[(row["model"], row["scorer"], int(row["k"]))] = dict(row["metrics"])
        for entry in payload.get("per_user", []):
            key = (entry["model"], entry["scorer"], int(entry["k"]))
            table.per_user[key] = [
                pm.UserMetricRow(
                    user=r["user"],
                    sep=r["sep"],
                    lir=r["lir"],
                    etd=r["etd"],
                    mid=r["mid"],
                    shown_items=frozenset(r["shown_items"]),
                    shown_attrs=frozenset(r["shown_attrs"]),
                )
                for r in entry["rows"]
            ]
        for mark in payload.get("significance", []):
            table.significance[(mark["model"], int(mark["k"]), mark["metric"], mark["a"], mark["b"])] = mark["p"]
        for entry in payload.get("pair_counts", []):
            table.pair_counts[(entry["model"], int(entry["k"]), entry["a"], entry["b"])] = int(entry["n"])
        table.ranking = {
            model: {metric: {int(k): v for k, v in per_k.items()} for metric, per_k in bundle.items()}
            for model, bundle in payload.get("ranking", {}).items()
        }
        table.errors = list(payload.get("errors", []))
        return table


@dataclass(frozen=True)
class ExplainedRecommendation:
    recommended: EntityId
    candidates: tuple[EntityId, ...]
    explanation: Explanation | None


def explain_list(
    g: KnowledgeGraph,
    profile: frozenset[EntityId],
    recommended: Sequence[EntityId],
    catalog: frozenset[EntityId],
    scorer: str,
    alpha: float = 0.5,
    beta_w: float = 0.5,
    recency: Mapping[EntityId, float] | None = None,
    names: Mapping[EntityId, str] | None = None,
    max_attrs: int = 3,
    max_items: int = 3,
) -> list[ExplainedRecommendation]:
    """Explain each recommended item against the profile; items without a
    shared attribute yield no explanation and an empty candidate set."""
    out = []
    profile_reach = attribute_reach(g, profile, scorer)
    for item in recommended:
        ctx = ScoreContext(
            profile_items=profile,
            recommended_items=frozenset([item]),
            catalog=catalog,
            alpha=alpha,
            beta_w=beta_w,
        )
        ranked = rank_attributes(g, ctx, scorer, profile_reach)
        explanation = None
        if ranked:
            explanation = build_explanation(
                g,
                ctx,
                ranked,
                scorer=scorer,
                max_attrs=max_attrs,
                max_items=max_items,
                recency=recency,
                names=names,
            )
        out.append(
            ExplainedRecommendation(
                recommended=item,
                candidates=tuple(p for p, _ in ranked),
                explanation=explanation,
            )
        )
    return out


def _user_recency(train: Dataset, user: str) -> dict[EntityId, float]:
    latest: dict[EntityId, float] = {}
    for inter in train.user_interactions(user):
        try:
            value = inter.recency_value(train.recency_mode)
        except ValueError:
            continue
        if inter.item not in latest or value > latest[inter.item]:
            latest[inter.item] = value
    return latest


def load_names(path: str | Path, delimiter: str = ",") -> dict[EntityId, str]:
    names: dict[EntityId, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        header = next(reader, None)
        if header and len(header) >= 2 and header[0].strip().lower() in ("id", "item", "itemid", "movieid"):
            pass  # header consumed
        elif header:
            names[header[0].strip()] = header[1].strip()
        for row in reader:
            if len(row) >= 2:
                names[row[0].strip()] = row[1].strip()
    return names


def _write_recs(path: Path, fold: int, recs: Sequence[RankedList]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fold", "user", "rank", "item", "score"])
        for rl in sorted(recs, key=lambda r: r.user):
            for rank, (item, score) in enumerate(rl.items, start=1):
                writer.writerow([fold, rl.user, rank, item, f"{score:.10g}"])


def _write_explanations(path: Path, fold: int, per_user: Mapping[str, list[ExplainedRecommendation]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["fold", "user", "recommended", "attributes", "edge_type", "linked_items", "score", "sentence"]
        )
        for user in sorted(per_user):
            for entry in per_user[user]:
                e = entry.explanation
                if e is None:
                    writer.writerow([fold, user, entry.recommended, "", "", "", "", ""])
                    continue
                writer.writerow(
                    [
                        fold,
                        user,
                        entry.recommended,
                        "|".join(a for a, _, _ in e.attributes),
                        "|".join(dict.fromkeys(edge for _, edge, _ in e.attributes if edge)),
                        "|".join(e.linked_items),
                        f"{e.attributes[0][2]:.10g}",
                        e.sentence,
                    ]
                )


def _fold_user_rows(
    g: KnowledgeGraph,
    train: Dataset,
    explained: Mapping[str, list[ExplainedRecommendation]],
    k: int,
    ewma_beta: float,
) -> tuple[list[pm.UserMetricRow], list[Explanation], int, int]:
    """Per-user metric rows for one (fold, model, scorer, k) cell.

    Users whose top-k recommendations share no attribute at all are counted
    as unexplainable and excluded from the rows.  Returns the rows, the
    fold's explanation pool, the explained-recommendation count and the
    unexplainable-user count.
    """
    rows: list[pm.UserMetricRow] = []
    pool: list[Explanation] = []
    explained_count = 0
    unexplainable_users = 0
    for user in sorted(explained):
        top = explained[user][:k]
        omega = sorted(set().union(*(set(e.candidates) for e in top)) if top else set())
        expls = [e.explanation for e in top if e.explanation is not None]
        if not omega or not expls:
            unexplainable_users += 1
            continue
        explained_count += len(expls)
        pool.extend(expls)
        shown_attrs = frozenset().union(*(e.shown_attributes for e in expls))
        shown_items = frozenset().union(*(frozenset(e.linked_items) for e in expls))
        rows.append(
            pm.UserMetricRow(
                user=user,
                sep=pm.sep(g, expls, beta=ewma_beta, universe=omega),
                lir=pm.lir(train, user, expls, beta=ewma_beta),
                etd=pm.etd(expls, k, omega),
                mid=float(pm.mid_per_user(expls)),
                shown_items=shown_items,
                shown_attrs=shown_attrs,
            )
        )
    return rows, pool, explained_count, unexplainable_users


def run_offline_eval(cfg: RunConfig) -> ResultsTable:
    """Execute the configured sweep and persist all artifacts under
    ``cfg.out_dir``.  Returns the aggregate table; stage errors are
    collected in ``table.errors`` and the on-disk error manifest."""
    cfg.validate()
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    dataset = load_interactions(cfg.dataset_path, cfg.schema)
    graph = load_triples(
        cfg.kg_path,
        delimiter=cfg.kg_delimiter,
        item_flag_column=cfg.kg_item_flag_column,
        items=None if cfg.kg_item_flag_column else dataset.items,
        hierarchy_edges=cfg.hierarchy_edges,
    )
    filtered = filter_by_kg_coverage(dataset, graph)
    if len(filtered) == 0:
        raise ConfigError("no interaction survives knowledge-graph coverage filtering")
    binarized = binarize(filtered)
    catalog = frozenset(binarized.items)
    names = load_names(cfg.names_path) if cfg.names_path else None
    folds = kfold_split(binarized, cfg.folds, cfg.seed)
    selected = [f for f in folds if cfg.fold_subset is None or f.fold_index in cfg.fold_subset]

    table = ResultsTable(
        scorers=tuple(cfg.scorers),
        models=tuple(spec.kind for spec in cfg.models),
        top_ks=tuple(cfg.top_ks),
    )
    k_max = max(list(cfg.top_ks) + list(cfg.ranking_ks))
    fold_cells: dict[tuple[str, str, int], list[dict[str, float]]] = {}
    fold_pools: dict[tuple[str, str, int], list[list[Explanation]]] = {}
    ranking_acc: dict[str, list[dict[str, dict[int, float]]]] = {}

    for fold in selected:
        test_by_user: dict[str, set[EntityId]] = {}
        for inter in fold.test.interactions:
            test_by_user.setdefault(inter.user, set()).add(inter.item)
        for spec in cfg.models:
            try:
                model = fit(spec, fold.train, graph, seed=cfg.seed + fold.fold_index)
                users = list(fold.train.users)
                recs = model.recommend_many(users, k_max)
                _write_recs(out_dir / f"recs_{spec.kind}_{fold.fold_index}.csv", fold.fold_index, recs)
                bundle = ranking_metrics(recs, test_by_user, cfg.ranking_ks, sorted(catalog))
                ranking_acc.setdefault(spec.kind, []).append(bundle)
            except Exception as exc:
                logger.exception("model %s failed on fold %s", spec.kind, fold.fold_index)
                table.errors.append(
                    {
                        "stage": "fit/recommend",
                        "model": spec.kind,
                        "fold": str(fold.fold_index),
                        "error": f"{type(exc).__name__}: {exc}",
                        "traceback": traceback.format_exc(),
                    }
                )
                continue
            rec_items = {rl.user: [item for item, _ in rl.items[: max(cfg.top_ks)]] for rl in recs}
            for scorer in cfg.scorers:
                try:
                    explained: dict[str, list[ExplainedRecommendation]] = {}
                    for user in users:
                        profile = fold.train.user_items(user)
                        explained[user] = explain_list(
                            graph,
                            profile,
                            rec_items[user],
                            catalog,
                            scorer,
                            alpha=cfg.alpha,
                            beta_w=cfg.beta_w,
                            recency=_user_recency(fold.train, user),
                            names=names,
                            max_attrs=cfg.max_attrs,
                            max_items=cfg.max_items,
                        )
                    _write_explanations(
                        out_dir / f"expl_{spec.kind}_{scorer}_{fold.fold_index}.csv",
                        fold.fold_index,
                        explained,
                    )
                    for k in cfg.top_ks:
                        rows, pool, explained_count, unexplainable = _fold_user_rows(
                            graph, fold.train, explained, k, cfg.ewma_beta
                        )
                        tid, tpd = pm.tid_tpd(pool)
                        cell = {
                            "mid": sum(r.mid for r in rows) / len(rows) if rows else 0.0,
                            "tid": float(tid),
                            "lir": sum(r.lir for r in rows) / len(rows) if rows else 0.0,
                            "etd": sum(r.etd for r in rows) / len(rows) if rows else 0.0,
                            "tpd": float(tpd),
                            "sep": sum(r.sep for r in rows) / len(rows) if rows else 0.0,
                            "explained": float(explained_count),
                            "unexplainable_users": float(unexplainable),
                        }
                        key = (spec.kind, scorer, k)
                        fold_cells.setdefault(key, []).append(cell)
                        fold_pools.setdefault(key, []).append(pool)
                        table.per_user.setdefault(key, []).extend(rows)
                except Exception as exc:
                    logger.exception(
                        "scorer %s failed for model %s on fold %s", scorer, spec.kind, fold.fold_index
                    )
                    table.errors.append(
                        {
                            "stage": "explain/metrics",
                            "model": spec.kind,
                            "scorer": scorer,
                            "fold": str(fold.fold_index),
                            "error": f"{type(exc).__name__}: {exc}",
                            "traceback": traceback.format_exc(),
                        }
                    )

    # fsum keeps the fold aggregation invariant under fold-order permutation
    for key, cells in sorted(fold_cells.items()):
        table.rows[key] = {
            metric: math.fsum(c[metric] for c in cells) / len(cells)
            for metric in ("mid", "tid", "lir", "etd", "tpd", "sep", "explained", "unexplainable_users")
        }
    for model, bundles in sorted(ranking_acc.items()):
        table.ranking[model] = {
            metric: {
                k: math.fsum(b[metric][k] for b in bundles) / len(bundles)
                for k in sorted(bundles[0][metric])
            }
            for metric in bundles[0]
        }

    _compute_significance(table, cfg, fold_pools)

    manifest_path = out_dir / "errors.json"
    if table.errors:
        manifest_path.write_text(json.dumps(table.errors, indent=2), encoding="utf-8")
    elif manifest_path.exists():
        manifest_path.unlink()
    (out_dir / "results.json").write_text(
        json.dumps(table.to_json(), indent=2, sort_keys=True), encoding="utf-8"
    )
    return table


def _compute_significance(
    table: ResultsTable,
    cfg: RunConfig,
    fold_pools: dict[tuple[str, str, int], list[list[Explanation]]],
) -> None:
    """Wilcoxon marks for every scorer pair within a recommender at each k.

    Per-user metrics pair users with rows under both scorers (each user
    contributes the mean over their folds); the catalog-level TID/TPD pair
    fold-level counts instead.  The pair count lands in ``pair_counts``.
    """

    def user_means(key: tuple[str, str, int], metric: str) -> dict[str, float]:
        acc: dict[str, list[float]] = {}
        for row in table.per_user.get(key, []):
            acc.setdefault(row.user, []).append(getattr(row, metric))
        return {user: sum(vals) / len(vals) for user, vals in acc.items()}

    for model in table.models:
        for k in table.top_ks:
            for i, scorer_a in enumerate(table.scorers):
                for scorer_b in table.scorers[i + 1 :]:
                    for metric in ("mid", "lir", "etd", "sep"):
                        means_a = user_means((model, scorer_a, k), metric)
                        means_b = user_means((model, scorer_b, k), metric)
                        shared = sorted(set(means_a) & set(means_b))
                        if not shared:
                            continue
                        result = wilcoxon_signed_rank(
                            [means_a[u] for u in shared], [means_b[u] for u in shared]
                        )
                        table.significance[(model, k, metric, scorer_a, scorer_b)] = result.pvalue
                        table.pair_counts[(model, k, scorer_a, scorer_b)] = len(shared)
                    pools_a = fold_pools.get((model, scorer_a, k), [])
                    pools_b = fold_pools.get((model, scorer_b, k), [])
                    if len(pools_a) == len(pools_b) and pools_a:
                        for metric, pick in (("tid", 0), ("tpd", 1)):
                            a_vals = [float(pm.tid_tpd(pool)[pick]) for pool in pools_a]
                            b_vals = [float(pm.tid_tpd(pool)[pick]) for pool in pools_b]
                            result = wilcoxon_signed_rank(a_vals, b_vals)
                            table.significance[(model, k, metric, scorer_a, scorer_b)] = result.pvalue
