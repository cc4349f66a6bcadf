"""Within-subjects trial logic: sessions, elicitation, paired explanation
bundles with randomized side assignment, Likert capture and export.

Each participant picks ten liked items from a 100-item elicitation list,
receives five recommendations from a linear item-item model refit with
their profile appended as a synthetic user, and compares the two scorers'
sentences side by side without ever learning which scorer is which.
"""

from __future__ import annotations

import json
import random
import secrets
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Sequence

from ..data import ColumnSchema, Dataset, Interaction, binarize, elicitation_ranking, filter_by_kg_coverage, load_interactions
from ..explain import SCORERS
from ..harness import explain_list, load_names
from ..kg import DEFAULT_HIERARCHY_EDGES, KnowledgeGraph, load_triples
from ..recommenders import EaseModel
from .store import EventLog, SessionRecord, SessionStore

LIKERT_ANSWERS = ("MuchMoreA", "MoreA", "Equal", "MoreB", "MuchMoreB")

_SYNTHETIC_PREFIX = "__session__:"


class TrialError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass(frozen=True)
class TrialConfig:
    dataset_path: Path
    schema: ColumnSchema
    kg_path: Path
    data_dir: Path
    seed: int = 0
    scorers: tuple[str, str] = ("explod_v2", "pem")
    elicitation_size: int = 100
    profile_size: int = 10
    n_recommendations: int = 5
    ease_lam: float = 500.0
    alpha: float = 0.5
    beta_w: float = 0.5
    max_attrs: int = 3
    max_items: int = 3
    kg_delimiter: str = "\t"
    kg_item_flag_column: bool = False
    hierarchy_edges: tuple[str, ...] = DEFAULT_HIERARCHY_EDGES
    names_path: Path | None = None

    def __post_init__(self):
        if len(self.scorers) != 2 or len(set(self.scorers)) != 2:
            raise ValueError("the trial compares exactly two distinct scorers")
        for scorer in self.scorers:
            if scorer not in SCORERS:
                raise ValueError(f"unknown scorer {scorer!r}")


def load_questions() -> list[dict[str, Any]]:
    payload = resources.files("pathx.service").joinpath("questions.json").read_text(encoding="utf-8")
    return json.loads(payload)


def resolve_answer(answer: str, sides: Mapping[str, str]) -> tuple[str, str]:
    """Map a raw Likert answer to (favored scorer name, strength)."""
    if answer == "Equal":
        return "equal", "equal"
    side = "A" if answer.endswith("A") else "B"
    strength = "much_more" if answer.startswith("Much") else "more"
    return sides[side], strength


class TrialService:
    """Stateful facade over the dataset, graph, store and recommender."""

    def __init__(self, cfg: TrialConfig):
        self.cfg = cfg
        raw = load_interactions(cfg.dataset_path, cfg.schema)
        self.graph: KnowledgeGraph = load_triples(
            cfg.kg_path,
            delimiter=cfg.kg_delimiter,
            item_flag_column=cfg.kg_item_flag_column,
            items=None if cfg.kg_item_flag_column else raw.items,
            hierarchy_edges=cfg.hierarchy_edges,
        )
        self.raw = filter_by_kg_coverage(raw, self.graph)
        if len(self.raw) == 0:
            raise ValueError("no interaction survives knowledge-graph coverage filtering")
        self.base = binarize(self.raw)
        self.catalog = frozenset(self.base.items)
        self.elicitation_items: tuple[str, ...] = tuple(
            elicitation_ranking(self.raw, cfg.elicitation_size)
        )
        self.names: dict[str, str] = load_names(cfg.names_path) if cfg.names_path else {}
        self.questions = load_questions()
        self.store = SessionStore(EventLog(Path(cfg.data_dir) / "trial_events.jsonl"))
        # mutations of one session are serialized; reads stay lock-free
        self._session_locks: dict[str, threading.Lock] = {}

    # -- helpers -------------------------------------------------------------

    def _session(self, session_id: str) -> SessionRecord:
        session = self.store.get(session_id)
        if session is None:
            raise TrialError(404, f"unknown session {session_id!r}")
        return session

    def _rng(self, session_id: str, purpose: str) -> random.Random:
        return random.Random(f"{self.cfg.seed}:{session_id}:{purpose}")

    def _lock_for(self, session_id: str) -> threading.Lock:
        return self._session_locks.setdefault(session_id, threading.Lock())

    def display_name(self, item: str) -> str:
        return self.names.get(item, item)

    # -- operations ----------------------------------------------------------

    def session_state(self, session_id: str) -> str:
        return self._session(session_id).state

    def create_session(self, demographics: Mapping[str, Any]) -> str:
        required = ("nationality", "education", "age_band", "gender", "rs_familiarity")
        missing = [f for f in required if demographics.get(f) in (None, "")]
        if missing:
            raise TrialError(400, f"missing demographic fields: {', '.join(missing)}")
        session_id = secrets.token_urlsafe(16)
        self.store.record(
            "session_created", session_id, {"demographics": {f: demographics[f] for f in required}}
        )
        return session_id

    def elicitation_for(self, session_id: str) -> list[tuple[str, str]]:
        """The top elicitation items in this session's stable shuffled order."""
        self._session(session_id)
        order = list(self.elicitation_items)
        self._rng(session_id, "elicitation").shuffle(order)
        return [(item, self.display_name(item)) for item in order]

    def submit_profile(self, session_id: str, items: Sequence[str]) -> dict[str, Any]:
        with self._lock_for(session_id):
            session = self._session(session_id)
            if session.state != "created":
                raise TrialError(409, f"profile already submitted (state={session.state})")
            if len(items) != self.cfg.profile_size:
                raise TrialError(
                    400, f"profile must contain exactly {self.cfg.profile_size} items, got {len(items)}"
                )
            if len(set(items)) != len(items):
                raise TrialError(400, "profile items must be distinct")
            allowed = set(self.elicitation_items)
            unknown = sorted(set(items) - allowed)
            if unknown:
                raise TrialError(400, f"items outside the elicitation catalog: {', '.join(unknown)}")

            sides = self._assign_sides(session_id)
            entries = self._build_bundle(session_id, tuple(items), sides)
            self.store.record("profile_submitted", session_id, {"items": list(items)})
            self.store.record("bundle_created", session_id, {"sides": sides, "entries": entries})
            return {"sides": sides, "entries": entries}

    def _assign_sides(self, session_id: str) -> dict[str, str]:
        first_on_a = self._rng(session_id, "sides").random() < 0.5
        s0, s1 = self.cfg.scorers
        return {"A": s0, "B": s1} if first_on_a else {"A": s1, "B": s0}

    def _build_bundle(
        self, session_id: str, profile: tuple[str, ...], sides: Mapping[str, str]
    ) -> list[dict[str, Any]]:
        synthetic_user = _SYNTHETIC_PREFIX + session_id
        train = Dataset(
            list(self.base.interactions)
            + [Interaction(user=synthetic_user, item=item, rating=1.0) for item in profile],
            self.base.recency_mode,
        )
        model = EaseModel(train, lam=self.cfg.ease_lam)
        ranked = model.recommend(synthetic_user, self.cfg.n_recommendations)
        recommended = [item for item, _ in ranked.items]
        sentences: dict[str, dict[str, str]] = {}
        for scorer in self.cfg.scorers:
            explained = explain_list(
                self.graph,
                frozenset(profile),
                recommended,
                self.catalog,
                scorer,
                alpha=self.cfg.alpha,
                beta_w=self.cfg.beta_w,
                names=self.names or None,
                max_attrs=self.cfg.max_attrs,
                max_items=self.cfg.max_items,
            )
            sentences[scorer] = {
                entry.recommended: (entry.explanation.sentence if entry.explanation else "")
                for entry in explained
            }
        return [
            {
                "recommended": item,
                "recommended_name": self.display_name(item),
                "sentence_a": sentences[sides["A"]][item],
                "sentence_b": sentences[sides["B"]][item],
            }
            for item in recommended
        ]

    def comparison(self, session_id: str) -> dict[str, Any]:
        session = self._session(session_id)
        if session.state == "created":
            raise TrialError(409, "profile not submitted yet")
        return {"entries": session.bundle, "questions": self.questions}

    def submit_responses(self, session_id: str, responses: Sequence[Mapping[str, Any]]) -> None:
        with self._lock_for(session_id):
            session = self._session(session_id)
            if session.state == "completed":
                raise TrialError(409, "session already completed")
            if session.state != "profiled":
                raise TrialError(409, "profile must be submitted before responses")
            expected = {q["question_id"] for q in self.questions}
            seen = [int(r["question_id"]) for r in responses]
            if sorted(seen) != sorted(expected):
                raise TrialError(400, f"exactly one answer per question {sorted(expected)} required")
            goal_by_id = {q["question_id"]: q["goal"] for q in self.questions}
            stored = []
            for r in sorted(responses, key=lambda r: int(r["question_id"])):
                answer = str(r["answer"])
                if answer not in LIKERT_ANSWERS:
                    raise TrialError(400, f"invalid answer {answer!r}")
                favored, strength = resolve_answer(answer, session.sides)
                stored.append(
                    {
                        "question_id": int(r["question_id"]),
                        "goal": goal_by_id[int(r["question_id"])],
                        "answer": answer,
                        "favored_scorer": favored,
                        "strength": strength,
                    }
                )
            self.store.record("responses_submitted", session_id, {"responses": stored})

    def export(self) -> dict[str, Any]:
        """Raw resolved rows plus per-question divergent-bar counts."""
        completed = self.store.completed()
        s0, s1 = self.cfg.scorers
        bucket_keys = [f"much_more_{s0}", f"more_{s0}", "equal", f"more_{s1}", f"much_more_{s1}"]
        aggregation = [
            {
                "question_id": q["question_id"],
                "goal": q["goal"],
                "text": q["text"],
                "counts": {key: 0 for key in bucket_keys},
            }
            for q in self.questions
        ]
        by_question = {entry["question_id"]: entry for entry in aggregation}
        rows = []
        for session in completed:
            for response in session.responses:
                rows.append({"session_id": session.session_id, **response})
                if response["strength"] == "equal":
                    bucket = "equal"
                else:
                    bucket = f"{response['strength']}_{response['favored_scorer']}"
                by_question[response["question_id"]]["counts"][bucket] += 1
        return {
            "completed_sessions": len(completed),
            "scorers": [s0, s1],
            "rows": rows,
            "aggregation": aggregation,
            "empty": not completed,
        }

    def export_csv(self) -> str:
        payload = self.export()
        lines = ["session_id,question_id,goal,answer,favored_scorer,strength"]
        for row in payload["rows"]:
            lines.append(
                f"{row['session_id']},{row['question_id']},{row['goal']},"
                f"{row['answer']},{row['favored_scorer']},{row['strength']}"
            )
        if payload["empty"]:
            lines.append("# no completed sessions")
        return "\n".join(lines) + "\n"
