"""Command-line entry points.

Subcommands: ``ingest`` (dataset + graph preparation), ``eval`` (full
offline sweep), ``explain`` (explanations only), ``report`` (re-emit
tables from persisted results) and ``serve`` (trial service).

Exit codes: 0 success, 2 configuration error, 3 partial failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .data import binarize, export_fold_manifest, filter_by_kg_coverage, kfold_split, load_interactions
from .harness import ConfigError, ResultsTable, RunConfig, load_config, run_offline_eval
from .kg import load_triples
from .report import emit_report

EXIT_CONFIG_ERROR = 2
EXIT_PARTIAL_FAILURE = 3


@click.group()
def main() -> None:
    """Path-explanation toolkit for recommender outputs."""


def _load_config(config_path: str, seed: int | None, out: str | None, ks: tuple[int, ...]) -> RunConfig:
    try:
        cfg = load_config(config_path, seed=seed, out_dir=out, top_ks=ks or None)
        cfg.validate()
        return cfg
    except (ConfigError, OSError, KeyError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="output directory override")
@click.option("--seed", type=int, default=None)
def ingest(config_path: str, out: str | None, seed: int | None) -> None:
    """Load, filter and split the dataset; persist canonical artifacts."""
    cfg = _load_config(config_path, seed, out, ())
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
    binarized = binarize(filtered)
    folds = kfold_split(binarized, cfg.folds, cfg.seed)
    graph.save_triples(out_dir / "kg_canonical.tsv")
    export_fold_manifest(folds, out_dir / "fold_manifest.csv")
    stats = {
        "dataset_original": dataset.stats(),
        "dataset_processed": filtered.stats(),
        "graph": graph.stats(),
    }
    (out_dir / "ingest_stats.json").write_text(json.dumps(stats, indent=2, sort_keys=True), encoding="utf-8")
    click.echo(json.dumps(stats, indent=2, sort_keys=True))


@main.command(name="eval")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="output directory override")
@click.option("--seed", type=int, default=None)
@click.option("--k", "ks", type=int, multiple=True, help="top-k values override")
def eval_cmd(config_path: str, out: str | None, seed: int | None, ks: tuple[int, ...]) -> None:
    """Run the full offline evaluation sweep and emit reports."""
    cfg = _load_config(config_path, seed, out, ks)
    table = run_offline_eval(cfg)
    emit_report(table, cfg.out_dir)
    for (model, scorer, k), values in sorted(table.rows.items()):
        click.echo(
            f"{model}/{scorer}@{k}: "
            + " ".join(f"{m}={values[m]:.4f}" for m in ("mid", "tid", "lir", "etd", "tpd", "sep"))
        )
    if table.errors:
        click.echo(f"{len(table.errors)} stage(s) failed; see errors.json", err=True)
        sys.exit(EXIT_PARTIAL_FAILURE)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--k", "ks", type=int, multiple=True)
def explain(config_path: str, out: str | None, seed: int | None, ks: tuple[int, ...]) -> None:
    """Run the sweep and list the explanation artifacts (no report tables)."""
    cfg = _load_config(config_path, seed, out, ks)
    table = run_offline_eval(cfg)
    produced = sorted(p.name for p in Path(cfg.out_dir).glob("expl_*.csv"))
    click.echo("\n".join(produced) if produced else "no explanations produced")
    if table.errors:
        sys.exit(EXIT_PARTIAL_FAILURE)


@main.command()
@click.option("--results", "results_path", required=True, type=click.Path(exists=True), help="results.json from eval")
@click.option("--out", type=click.Path(), required=True)
@click.option(
    "--format",
    "formats",
    type=click.Choice(["csv", "markdown"]),
    multiple=True,
    default=("csv", "markdown"),
)
def report(results_path: str, out: str, formats: tuple[str, ...]) -> None:
    """Re-emit metric tables from a persisted results file."""
    try:
        payload = json.loads(Path(results_path).read_text(encoding="utf-8"))
        table = ResultsTable.from_json(payload)
    except (OSError, ValueError, KeyError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    for path in emit_report(table, out, formats):
        click.echo(str(path))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None, help="trial service YAML")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=None, help="overrides PATHX_PORT")
@click.option("--static", "static_dir", type=click.Path(), default=None, help="built UI assets to mount at /app")
def serve(config_path: str | None, host: str, port: int | None, static_dir: str | None) -> None:
    """Start the trial service."""
    import os

    import uvicorn
    import yaml

    from .data import ColumnSchema
    from .service import TrialConfig, TrialService, create_app

    try:
        if config_path:
            raw = yaml.safe_load(Path(config_path).read_text(encoding="utf-8")) or {}
            base = Path(config_path).parent

            def resolve(p):
                p = Path(p)
                return p if p.is_absolute() else base / p

            schema_raw = dict(raw.get("schema", {}))
            cfg = TrialConfig(
                dataset_path=resolve(raw["dataset"]),
                schema=ColumnSchema(
                    user=schema_raw.get("user", "user"),
                    item=schema_raw.get("item", "item"),
                    rating=schema_raw.get("rating"),
                    timestamp=schema_raw.get("timestamp"),
                    weight=schema_raw.get("weight"),
                    delimiter=schema_raw.get("delimiter", ","),
                    has_header=bool(schema_raw.get("has_header", True)),
                ),
                kg_path=resolve(raw["kg"]),
                data_dir=Path(os.environ.get("PATHX_DATA_DIR", raw.get("data_dir", "trial_data"))),
                seed=int(os.environ.get("PATHX_SEED", raw.get("seed", 0))),
                scorers=tuple(raw.get("scorers", ("explod_v2", "pem"))),
                ease_lam=float(raw.get("ease_lam", 500.0)),
                kg_delimiter=raw.get("kg_delimiter", "\t"),
                kg_item_flag_column=bool(raw.get("kg_item_flag_column", False)),
                names_path=resolve(raw["names"]) if raw.get("names") else None,
            )
            service = TrialService(cfg)
            app = create_app(service, static_dir=static_dir)
        else:
            app = create_app(static_dir=static_dir)
    except (KeyError, ValueError, OSError, RuntimeError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    uvicorn.run(app, host=host, port=port or int(os.environ.get("PATHX_PORT", "8000")))


if __name__ == "__main__":
    main()
