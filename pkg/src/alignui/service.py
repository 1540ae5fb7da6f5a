"""HTTP service binding the engine together for the preference studio.

Owns persistence: the live dataset snapshot (swap-on-write, lock-free reads),
the append-only selections log, and the per-condition dataset variants
materialized once at startup so every endpoint agrees on the same subsets.
"""

from __future__ import annotations

import json
import os
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import codegen, dataset as ds, experiment, gateway as gw, reasoning
from .catalog import UnknownControl, parse_kind, spec_to_json
from .config import ServiceConfig
from .dataset import Aspect, TaskEntry, UnknownAspect, parse_aspect
from .experiment import (
    Condition,
    ComparisonPair,
    IndexOutOfRange,
    SUBSET_SIZES,
    assignment_for_participant,
    parse_condition,
)


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


class SelectionLog:
    """Append-only JSONL log; the single writer is serialized by a lock."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        line = json.dumps(record, sort_keys=True)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(line + "\n")

    def records(self) -> list[dict]:
        if not self.path.exists():
            return []
        out = []
        with open(self.path, "r", encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    out.append(json.loads(line))
        return out


class DatasetStore:
    """Snapshot-and-swap holder; readers take the current snapshot lock-free."""

    def __init__(self, snapshot: ds.PreferenceDataset):
        self._snapshot = snapshot
        self._write_lock = threading.Lock()

    def snapshot(self) -> ds.PreferenceDataset:
        return self._snapshot

    def merge(self, selections, new_entries=None) -> ds.PreferenceDataset:
        with self._write_lock:
            merged = ds.merge(self._snapshot, selections, new_entries)
            self._snapshot = merged
            return merged


class GenerateRequest(BaseModel):
    task: str = Field(min_length=1)
    aspects: list[str] = Field(min_length=1)
    condition: str = "withpref30"
    runs: Optional[int] = Field(default=None, ge=1)
    offline: Optional[bool] = None


class PreferenceVote(BaseModel):
    participant: str = Field(min_length=1)
    task: str = Field(min_length=1)
    aspect: str
    kind: str
    reason: str = ""
    condition: Optional[str] = None


class ComparisonVote(BaseModel):
    participant: str = Field(min_length=1)
    task: str = Field(min_length=1)
    aspect: str
    left: str
    right: str
    chosen: str


def _task_entry_for(name: str, snapshot: ds.PreferenceDataset) -> Optional[TaskEntry]:
    try:
        return snapshot.task(name).entry
    except ds.NotFound:
        return None


def _entry_for_new_task(name: str) -> TaskEntry:
    description = experiment.EVAL_TASKS.get(name, name.replace("_", " "))
    tags = reasoning.derive_requirement_tags(description)
    if not tags:
        tags = frozenset({"continuous_value"})
    return TaskEntry(
        name=name,
        description=description,
        requirement_tags=tags,
        goal_style="exploration",
    )


def create_app(
    config: Optional[ServiceConfig] = None,
    gateway: Optional[gw.Gateway] = None,
    base_dataset: Optional[ds.PreferenceDataset] = None,
) -> FastAPI:
    config = config or ServiceConfig()
    if base_dataset is None:
        if config.dataset_path:
            base_dataset = ds.load_file(config.dataset_path)
        else:
            base_dataset = ds.bundled_dataset("full")
    if gateway is None:
        gateway = gw.gateway_from_config(config.gateway)

    # Per-condition variants fixed at startup; sizes beyond the dataset's
    # respondents_per_cell are simply unavailable.
    variants: dict[Condition, Optional[ds.PreferenceDataset]] = {
        Condition.WITHOUTPREF: None,
        Condition.WITHPREF30: base_dataset,
    }
    for condition in (Condition.WITHPREF10, Condition.WITHPREF25):
        n = SUBSET_SIZES[condition]
        if n < base_dataset.respondents_per_cell:
            variants[condition] = ds.subsample(base_dataset, n, config.subsample_seed)
        elif n == base_dataset.respondents_per_cell:
            variants[condition] = base_dataset

    store = DatasetStore(base_dataset)
    log = SelectionLog(config.selections_path)

    # Rebuild the live snapshot (and the duplicate-submission guard) from
    # previously collected votes.
    replay = []
    replayed_items = set()
    for record in log.records():
        if "chosen" in record:
            try:
                pair = ComparisonPair(
                    parse_condition(record["left"]), parse_condition(record["right"])
                )
                replayed_items.add(
                    (record["participant"], record["task"], record["aspect"], pair.key())
                )
            except (KeyError, ValueError):
                pass
            continue
        if "kind" not in record:
            continue
        try:
            replay.append(
                (
                    record["task"],
                    parse_aspect(record["aspect"]),
                    parse_kind(record["kind"]),
                    record.get("reason") or None,
                )
            )
        except (KeyError, UnknownAspect, UnknownControl):
            continue
    if replay:
        new_entries = {
            task: _entry_for_new_task(task)
            for task, _, _, _ in replay
            if _task_entry_for(task, store.snapshot()) is None
        }
        store.merge(replay, new_entries)

    app = FastAPI(title="alignui", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=config.cors,
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store
    app.state.log = log
    app.state.gateway = gateway
    app.state.config = config
    app.state.variants = variants
    app.state.issued = {}
    app.state.submitted = replayed_items

    @app.exception_handler(RequestValidationError)
    async def schema_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.get("/v1/health")
    def health():
        return {"status": "ok"}

    @app.post("/v1/generate")
    def generate(body: GenerateRequest):
        try:
            aspects = tuple(parse_aspect(a) for a in body.aspects)
        except UnknownAspect as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        if len(set(aspects)) != len(aspects):
            raise HTTPException(status_code=400, detail="aspects must be unique")
        try:
            condition = parse_condition(body.condition)
        except IndexOutOfRange as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        if condition not in variants:
            raise HTTPException(
                status_code=422,
                detail=f"condition {condition.value} unavailable for this dataset",
            )
        variant = variants[condition]

        ctx = reasoning.UserContext(task_description=body.task, aspects=aspects)
        offline = config.offline if body.offline is None else body.offline
        if offline:
            if variant is None:
                raise HTTPException(
                    status_code=422,
                    detail="offline generation needs a dataset condition",
                )
            try:
                recommendation = reasoning.fallback_recommendation(ctx, variant)
            except reasoning.NoRelevantTask as exc:
                raise HTTPException(status_code=422, detail=str(exc))
        else:
            runs = body.runs or config.n_runs
            try:
                recommendation = reasoning.reason_ensemble(
                    ctx, variant, None, gateway, runs
                )
            except reasoning.EnsembleFailed as exc:
                raise HTTPException(status_code=503, detail=str(exc))
            except gw.GatewayError as exc:
                raise HTTPException(status_code=502, detail=str(exc))

        entry = _task_entry_for(body.task, store.snapshot())
        kinds = recommendation.kinds()
        specs = (
            codegen.emit_abstract_spec(kinds, entry) if kinds else []
        )
        return {
            "recommendation": recommendation.to_json(),
            "specs": [spec_to_json(spec) for spec in specs],
            "condition": condition.value,
        }

    @app.post("/v1/preferences", status_code=201)
    def record_preference(body: PreferenceVote):
        try:
            aspect = parse_aspect(body.aspect)
            kind = parse_kind(body.kind)
        except (UnknownAspect, UnknownControl) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

        snapshot = store.snapshot()
        new_entries = None
        if _task_entry_for(body.task, snapshot) is None:
            new_entries = {body.task: _entry_for_new_task(body.task)}
        merged = store.merge(
            [(body.task, aspect, kind, body.reason or None)], new_entries
        )
        line = {
            "timestamp": _utc_now(),
            "participant": body.participant,
            "task": body.task,
            "aspect": aspect.value,
            "kind": kind.value,
            "reason": body.reason,
        }
        if body.condition:
            line["condition"] = body.condition
        log.append(line)
        return {"status": "recorded", "total_pieces": ds.total_pieces(merged)}

    @app.get("/v1/tasks")
    def tasks():
        snapshot = store.snapshot()
        return {
            "dataset_tasks": [
                {
                    "name": task.entry.name,
                    "description": task.entry.description,
                    "requirements": sorted(task.entry.requirement_tags),
                    "goal_style": task.entry.goal_style,
                }
                for task in snapshot.tasks
            ],
            "evaluation_tasks": [
                {"name": name, "description": description}
                for name, description in experiment.EVAL_TASKS.items()
            ],
        }

    @app.get("/v1/dataset/summary")
    def dataset_summary():
        snapshot = store.snapshot()
        cells = []
        for task in snapshot.tasks:
            for record in task.records:
                cells.append(
                    {
                        "task": task.entry.name,
                        "aspect": record.aspect.value,
                        "total": record.total(),
                        "counts": {
                            kind.value: count
                            for kind, count in sorted(
                                record.counts.items(), key=lambda kc: kc[0].value
                            )
                            if count > 0
                        },
                    }
                )
        return {
            "provenance": snapshot.provenance,
            "respondents_per_cell": snapshot.respondents_per_cell,
            "total_pieces": ds.total_pieces(snapshot),
            "cells": cells,
        }

    @app.get("/v1/experiment/assignment")
    def assignment(participant: str = Query(min_length=1)):
        issued = assignment_for_participant(participant, config.assignment_salt)
        app.state.issued[participant] = issued
        return issued.to_json()

    @app.post("/v1/experiment/selection", status_code=201)
    def record_selection(body: ComparisonVote):
        issued = app.state.issued.get(body.participant)
        if issued is None:
            raise HTTPException(
                status_code=404,
                detail=f"no assignment issued for participant {body.participant!r}",
            )
        try:
            aspect = parse_aspect(body.aspect)
            left = parse_condition(body.left)
            right = parse_condition(body.right)
            chosen = parse_condition(body.chosen)
        except (UnknownAspect, IndexOutOfRange) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        try:
            pair = ComparisonPair(left, right)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

        matches = any(
            item.task == body.task and item.aspect is aspect and item.pair == pair
            for item in issued.items
        )
        if not matches or chosen not in pair:
            raise HTTPException(
                status_code=409,
                detail="selection does not match an item in the issued assignment",
            )
        item_key = (body.participant, body.task, aspect.value, pair.key())
        if item_key in app.state.submitted:
            raise HTTPException(status_code=409, detail="item already submitted")
        app.state.submitted.add(item_key)

        log.append(
            {
                "timestamp": _utc_now(),
                "participant": body.participant,
                "task": body.task,
                "aspect": aspect.value,
                "left": pair.left.value,
                "right": pair.right.value,
                "chosen": chosen.value,
            }
        )
        return {"status": "recorded"}

    if config.studio_dist and os.path.isdir(config.studio_dist):
        app.mount(
            "/studio",
            StaticFiles(directory=config.studio_dist, html=True),
            name="studio",
        )

    return app
