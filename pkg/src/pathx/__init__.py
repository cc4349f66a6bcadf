"""Knowledge-graph path explanations for recommender outputs.

Core pieces: a triple-store knowledge graph, interaction datasets with
coverage filtering and fold splitting, five implicit-feedback recommenders,
three post-hoc attribute scorers with sentence rendering, the six offline
path metrics, ranking metrics, and a within-subjects trial service.
"""

from .data import ColumnSchema, Dataset, FoldSplit, Interaction, binarize, elicitation_ranking, filter_by_kg_coverage, kfold_split, load_interactions
from .explain import Explanation, ScoreContext, build_explanation, rank_attributes, score_explod, score_explod_v2, score_pem
from .harness import ResultsTable, RunConfig, load_config, run_offline_eval
from .kg import KnowledgeGraph, Triple, load_triples
from .metrics import EwmaProfile, build_ewma_profile, etd, lir, mid, mid_per_user, sep, tid_tpd
from .ranking import ranking_metrics
from .recommenders import ModelSpec, RankedList, fit
from .report import emit_report
from .stats import WilcoxonResult, wilcoxon_signed_rank

__version__ = "0.1.0"

__all__ = [
    "ColumnSchema",
    "Dataset",
    "EwmaProfile",
    "Explanation",
    "FoldSplit",
    "Interaction",
    "KnowledgeGraph",
    "ModelSpec",
    "RankedList",
    "ResultsTable",
    "RunConfig",
    "ScoreContext",
    "Triple",
    "WilcoxonResult",
    "binarize",
    "build_ewma_profile",
    "build_explanation",
    "elicitation_ranking",
    "emit_report",
    "etd",
    "filter_by_kg_coverage",
    "fit",
    "kfold_split",
    "lir",
    "load_config",
    "load_interactions",
    "load_triples",
    "mid",
    "mid_per_user",
    "rank_attributes",
    "ranking_metrics",
    "run_offline_eval",
    "score_explod",
    "score_explod_v2",
    "score_pem",
    "sep",
    "tid_tpd",
    "wilcoxon_signed_rank",
]
