"""Pydantic request/response models for the trial HTTP API.

Scorer identities never appear in participant-facing payloads; clients see
only side labels A and B.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

LikertAnswer = Literal["MuchMoreA", "MoreA", "Equal", "MoreB", "MuchMoreB"]


class Demographics(BaseModel):
    nationality: str = Field(min_length=1)
    education: str = Field(min_length=1)
    age_band: str = Field(min_length=1)
    gender: str = Field(min_length=1)
    rs_familiarity: bool


class SessionCreated(BaseModel):
    session_id: str
    state: Literal["created"] = "created"


class SessionStatus(BaseModel):
    session_id: str
    state: Literal["created", "profiled", "completed"]


class ElicitationItem(BaseModel):
    item: str
    name: str


class ElicitationResponse(BaseModel):
    session_id: str
    items: list[ElicitationItem]


class ProfileSubmission(BaseModel):
    items: list[str] = Field(min_length=1)


class ComparisonEntry(BaseModel):
    recommended: str
    recommended_name: str
    sentence_a: str
    sentence_b: str


class Question(BaseModel):
    question_id: int
    goal: str
    text: str


class ComparisonBundle(BaseModel):
    session_id: str
    entries: list[ComparisonEntry]
    questions: list[Question]


class LikertResponse(BaseModel):
    question_id: int = Field(ge=1, le=6)
    answer: LikertAnswer


class ResponsesSubmission(BaseModel):
    responses: list[LikertResponse]


class CompletionReceipt(BaseModel):
    session_id: str
    state: Literal["completed"] = "completed"


class QuestionAggregate(BaseModel):
    question_id: int
    goal: str
    text: str
    counts: dict[str, int]


class ExportRow(BaseModel):
    session_id: str
    question_id: int
    goal: str
    answer: LikertAnswer
    favored_scorer: str  # scorer name, or "equal"
    strength: Literal["much_more", "more", "equal"]


class ExportPayload(BaseModel):
    completed_sessions: int
    scorers: list[str]
    rows: list[ExportRow]
    aggregation: list[QuestionAggregate]
    empty: bool = False
