"""Deterministic CSV and markdown emission of aggregated results.

The markdown table mirrors the item-metrics/attribute-metrics layout
(MID, TID, LIR | ETD, TPD, SEP) with the best scorer value per recommender
in bold and non-significant scorer pairs (Wilcoxon p > 0.05) underlined.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

from .harness import PATH_METRICS, ResultsTable

SIGNIFICANCE_LEVEL = 0.05


def _fmt(value: float) -> str:
    return f"{value:.4f}"


def write_metrics_csv(table: ResultsTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["recommender", "scorer", "k", *PATH_METRICS, "explained", "unexplainable_users"]
        )
        for (model, scorer, k), values in sorted(table.rows.items()):
            writer.writerow(
                [model, scorer, k]
                + [_fmt(values[m]) for m in PATH_METRICS]
                + [_fmt(values.get("explained", 0.0)), _fmt(values.get("unexplainable_users", 0.0))]
            )


def write_user_rows_csv(table: ResultsTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["recommender", "scorer", "k", "user", "mid", "lir", "etd", "sep"])
        for (model, scorer, k), rows in sorted(table.per_user.items()):
            for row in sorted(rows, key=lambda r: r.user):
                writer.writerow(
                    [model, scorer, k, row.user, _fmt(row.mid), _fmt(row.lir), _fmt(row.etd), _fmt(row.sep)]
                )


def write_ranking_csv(table: ResultsTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["recommender", "metric", "k", "value"])
        for model in sorted(table.ranking):
            for metric in sorted(table.ranking[model]):
                for k, value in sorted(table.ranking[model][metric].items()):
                    writer.writerow([model, metric, k, _fmt(value)])


def _non_significant_scorers(table: ResultsTable, model: str, k: int, metric: str) -> set[str]:
    """Scorers belonging to at least one pair whose p-value exceeds the
    significance level for this metric cell."""
    marked: set[str] = set()
    for (m, kk, met, a, b), p in table.significance.items():
        if (m, kk, met) == (model, k, metric) and p > SIGNIFICANCE_LEVEL:
            marked.add(a)
            marked.add(b)
    return marked


def render_markdown(table: ResultsTable) -> str:
    lines: list[str] = ["# Offline explanation path metrics", ""]
    for k in sorted(set(table.top_ks)):
        lines.append(f"## Top-{k} recommendations")
        lines.append("")
        lines.append(
            "| Recommender | Scorer | MID | TID | LIR | ETD | TPD | SEP |"
        )
        lines.append("|---|---|---|---|---|---|---|---|")
        for model in table.models:
            present = [s for s in table.scorers if (model, s, k) in table.rows]
            if not present:
                continue
            best = {
                metric: max(table.rows[(model, s, k)][metric] for s in present)
                for metric in PATH_METRICS
            }
            for scorer in present:
                values = table.rows[(model, scorer, k)]
                cells = []
                for metric in PATH_METRICS:
                    text = _fmt(values[metric])
                    if scorer in _non_significant_scorers(table, model, k, metric):
                        text = f"<u>{text}</u>"
                    if values[metric] == best[metric]:
                        text = f"**{text}**"
                    cells.append(text)
                lines.append(f"| {model} | {scorer} | " + " | ".join(cells) + " |")
        lines.append("")
    if table.ranking:
        lines.append("## Ranking metrics (mean over folds)")
        lines.append("")
        ks: list[int] = sorted({k for bundle in table.ranking.values() for per_k in bundle.values() for k in per_k})
        header = "| Recommender | Metric | " + " | ".join(f"k={k}" for k in ks) + " |"
        lines.append(header)
        lines.append("|---|---|" + "---|" * len(ks))
        for model in sorted(table.ranking):
            for metric in sorted(table.ranking[model]):
                per_k = table.ranking[model][metric]
                row = " | ".join(_fmt(per_k[k]) if k in per_k else "-" for k in ks)
                lines.append(f"| {model} | {metric} | {row} |")
        lines.append("")
    if table.errors:
        lines.append("## Errors")
        lines.append("")
        for err in table.errors:
            parts = [err.get("stage", "?"), err.get("model", ""), err.get("scorer", ""), err.get("fold", "")]
            label = "/".join(p for p in parts if p)
            lines.append(f"- `{label}`: {err.get('error', 'unknown failure')}")
        lines.append("")
    lines.append(
        "_Bold marks the best scorer per recommender and metric; underlines join "
        f"scorer pairs whose Wilcoxon p-value exceeds {SIGNIFICANCE_LEVEL}._"
    )
    lines.append("")
    return "\n".join(lines)


def emit_report(table: ResultsTable, out_dir: str | Path, formats: Iterable[str] = ("csv", "markdown")) -> list[Path]:
    """Write the requested report files and return their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    formats = set(formats)
    if "csv" in formats:
        metrics_path = out / "metrics.csv"
        write_metrics_csv(table, metrics_path)
        written.append(metrics_path)
        users_path = out / "metrics_users.csv"
        write_user_rows_csv(table, users_path)
        written.append(users_path)
        if table.ranking:
            ranking_path = out / "ranking_metrics.csv"
            write_ranking_csv(table, ranking_path)
            written.append(ranking_path)
    if "markdown" in formats:
        report_path = out / "report.md"
        report_path.write_text(render_markdown(table), encoding="utf-8")
        written.append(report_path)
    return written
