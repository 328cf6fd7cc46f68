"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class MapSummary(BaseModel):
    name: str
    kind: str
    nodes: int
    edges: int
    title: str = ""


class MapListResponse(BaseModel):
    maps: list[MapSummary]


class ValidationResponse(BaseModel):
    ok: bool
    errors: list[str]
    checks: dict[str, int]


class PipelineRunRequest(BaseModel):
    config_path: str = Field(description="pipeline config JSON, relative to the workspace")
    stages: list[str] = Field(default=["all"])
    force: bool = False
    seed: int | None = None


class StageReportResponse(BaseModel):
    reports: list[dict]


class OverlayRequest(BaseModel):
    config_path: str
    name: str
    mode: str = Field(description="subset_size | metric_color | cited_by")
    subset_path: str | None = None
    subset_ids: list[str] | None = None
    metric_path: str | None = None
    year_max: int | None = None
    force: bool = False


class OverlayResponse(BaseModel):
    name: str
    bundle: str
    validation: ValidationResponse
