"""JSON-over-HTTP facade for the pipeline, plus static serving for the web UI.

Endpoints: GET /api/health, POST /api/compose, GET/PUT /api/profile/{id}.
Result lists are resolved by a provider; the bundled one maps normalized query
strings to result-list files in a fixture directory, so the whole service runs
without a live search engine.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import re
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Protocol

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .errors import SchemaError
from .ingest import FetchPolicy, ResultList, load_result_list
from .page_builder import build_page, load_template
from .pipeline import PipelineConfig, PipelineReport, segment_select
from .profiles import Profile, load_profile, save_profile
from .scorer import ScoreConfig, tokenize
from .segmenter import SegConfig

PREVIEW_CHARS = 200


class ResultProvider(Protocol):
    def resolve(self, query: str) -> ResultList | None: ...


class FixtureResultProvider:
    """Maps a query to <directory>/<slug>.json where the slug is the trimmed,
    lowercased query with whitespace runs replaced by underscores."""

    def __init__(self, directory: str):
        self.directory = directory

    def resolve(self, query: str) -> ResultList | None:
        slug = re.sub(r"\s+", "_", query.strip().lower())
        path = os.path.join(self.directory, f"{slug}.json")
        if not os.path.isfile(path):
            return None
        return load_result_list(path)


@dataclass
class ServiceConfig:
    profile_store: str
    fixture_dir: str | None = None
    provider: ResultProvider | None = None
    template_path: str | None = None
    static_dir: str | None = None
    fetch: FetchPolicy = FetchPolicy()
    seg: SegConfig = SegConfig()
    score: ScoreConfig = ScoreConfig()
    pinned_now: str | None = None       # ISO-8601; pins {{GENERATED_AT}} for tests/demos


def _bad_request(message: str) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": message})


def _candidate_view(ws) -> dict:
    return {
        "source_url": ws.segment.source_url,
        "heading": ws.segment.heading,
        "score": ws.score,
        "query_density": ws.query_density,
        "profile_density": ws.profile_density,
        "text_preview": ws.segment.text[:PREVIEW_CHARS],
    }


def _report_view(report: PipelineReport) -> dict:
    return {
        "pages_fetched": report.pages_fetched,
        "pages_skipped": report.pages_skipped,
        "segments_total": report.segments_total,
        "candidates_selected": report.candidates_selected,
        "stage_ms": report.stage_ms,
    }


def create_app(cfg: ServiceConfig) -> FastAPI:
    app = FastAPI(title="digestweaver", docs_url=None, redoc_url=None)
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    provider: ResultProvider | None = cfg.provider
    if provider is None and cfg.fixture_dir:
        provider = FixtureResultProvider(cfg.fixture_dir)

    pinned = None
    if cfg.pinned_now:
        pinned = datetime.fromisoformat(cfg.pinned_now.replace("Z", "+00:00"))
        if pinned.tzinfo is None:
            pinned = pinned.replace(tzinfo=timezone.utc)

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/api/compose")
    async def compose_endpoint(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _bad_request("request body must be JSON")
        if not isinstance(body, dict):
            return _bad_request("request body must be a JSON object")

        query = body.get("query")
        if not isinstance(query, str) or not query.strip():
            return _bad_request("query must be a non-empty string")
        profile_id = body.get("profile_id", "default")
        if not isinstance(profile_id, str) or not profile_id:
            return _bad_request("profile_id must be a non-empty string")

        score_kwargs = {}
        for name, low, high in (("delta", 0.0, None), ("alpha", 0.0, 1.0), ("beta", 0.0, 1.0)):
            value = body.get(name)
            if value is None:
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                return _bad_request(f"{name} must be a number")
            if value < low or (high is not None and value > high):
                return _bad_request(f"{name} out of range")
            score_kwargs[name] = float(value)

        fetch = cfg.fetch
        top_n = body.get("top_n")
        if top_n is not None:
            if isinstance(top_n, bool) or not isinstance(top_n, int) or top_n < 1:
                return _bad_request("top_n must be a positive integer")
            fetch = dataclasses.replace(fetch, top_n=top_n)

        if provider is None:
            return JSONResponse(status_code=404, content={"detail": "no result provider configured"})
        try:
            result_list = provider.resolve(query)
        except SchemaError as exc:
            return _bad_request(f"result list unusable: {exc}")
        if result_list is None:
            return JSONResponse(status_code=404,
                                content={"detail": f"no result list for query {query!r}"})

        try:
            score = dataclasses.replace(cfg.score, **score_kwargs)
        except ValueError as exc:
            return _bad_request(str(exc))
        pipeline_cfg = PipelineConfig(
            fetch=fetch, seg=cfg.seg, score=score,
            template_path=cfg.template_path, profile_id=profile_id,
        )
        profile = load_profile(cfg.profile_store, profile_id)
        tpl = load_template(cfg.template_path)
        candidates, report = segment_select(result_list, profile, pipeline_cfg)
        t0 = time.perf_counter()
        page = build_page(candidates, tpl, result_list.query, now=pinned)
        report.stage_ms["build"] = (time.perf_counter() - t0) * 1000.0
        return {
            "html": page.html,
            "candidates": [_candidate_view(ws) for ws in candidates],
            "report": _report_view(report),
        }

    @app.get("/api/profile/{profile_id}")
    def profile_get(profile_id: str) -> dict:
        profile = load_profile(cfg.profile_store, profile_id)
        return {"terms": profile.terms}

    @app.put("/api/profile/{profile_id}")
    async def profile_put(profile_id: str, request: Request):
        try:
            body = await request.json()
        except Exception:
            return _bad_request("request body must be JSON")
        if not isinstance(body, dict) or not isinstance(body.get("terms"), dict):
            return _bad_request('body must look like {"terms": {term: weight}}')
        terms: dict[str, float] = {}
        for raw, weight in body["terms"].items():
            if isinstance(weight, bool) or not isinstance(weight, (int, float)) or weight < 0:
                return _bad_request(f"weight for {raw!r} must be a non-negative number")
            for tok in tokenize(str(raw)):
                terms.setdefault(tok, float(weight))
        save_profile(cfg.profile_store, Profile(profile_id=profile_id, terms=terms))
        return {"terms": load_profile(cfg.profile_store, profile_id).terms}

    if cfg.static_dir:
        app.mount("/", StaticFiles(directory=cfg.static_dir, html=True), name="ui")

    return app


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(prog="digestweaver-service")
    parser.add_argument("--fixture-dir", required=True,
                        help="directory of <query-slug>.json result lists")
    parser.add_argument("--profile-store", required=True)
    parser.add_argument("--template")
    parser.add_argument("--static-dir", help="built web UI to serve under /")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8400)
    parser.add_argument("--pinned-now", help="pin {{GENERATED_AT}} (ISO-8601), for demos/tests")
    args = parser.parse_args(argv)

    cfg = ServiceConfig(
        profile_store=args.profile_store,
        fixture_dir=args.fixture_dir,
        template_path=args.template,
        static_dir=args.static_dir,
        pinned_now=args.pinned_now,
    )
    import uvicorn

    uvicorn.run(create_app(cfg), host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
