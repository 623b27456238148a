"""End-to-end orchestration: candidate selection and page composition.

Both entry points are plain function compositions of the stage modules, kept
separate so callers can inspect the candidate set before building a page.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from datetime import datetime

from .ingest import FetchPolicy, ResultList, fetch_all
from .page_builder import ComposedPage, build_page, load_template
from .profiles import Profile
from .scorer import CandidateSet, ScoreConfig, select_candidates, weigh_matrix
from .segmenter import SegConfig, build_segment_matrix


@dataclass(frozen=True)
class PipelineConfig:
    fetch: FetchPolicy = FetchPolicy()
    seg: SegConfig = SegConfig()
    score: ScoreConfig = ScoreConfig()
    template_path: str | None = None
    profile_id: str = "default"


@dataclass
class PipelineReport:
    pages_fetched: int = 0
    pages_skipped: int = 0
    segments_total: int = 0
    candidates_selected: int = 0
    stage_ms: dict[str, float] = field(default_factory=dict)


def segment_select(
    result_list: ResultList,
    m: Profile,
    cfg: PipelineConfig,
) -> tuple[CandidateSet, PipelineReport]:
    """Fetch, segment, weigh, select: returns the candidate set plus counters."""
    report = PipelineReport()

    t0 = time.perf_counter()
    pages = fetch_all(result_list, cfg.fetch)
    t1 = time.perf_counter()
    report.stage_ms["fetch"] = (t1 - t0) * 1000.0
    report.pages_fetched = sum(1 for p in pages if p.fetch_status == "ok")
    report.pages_skipped = len(pages) - report.pages_fetched

    omega = build_segment_matrix(pages, cfg.seg)
    t2 = time.perf_counter()
    report.stage_ms["segment"] = (t2 - t1) * 1000.0
    report.segments_total = sum(len(row) for row in omega.rows)

    phi = weigh_matrix(omega, result_list.query, m, cfg.score)
    candidates = select_candidates(phi, cfg.score)
    t3 = time.perf_counter()
    report.stage_ms["score"] = (t3 - t2) * 1000.0
    report.candidates_selected = len(candidates)

    return candidates, report


def compose(
    result_list: ResultList,
    m: Profile,
    cfg: PipelineConfig,
    now: datetime | None = None,
) -> tuple[ComposedPage, PipelineReport]:
    """Run segment_select, then fill the template (explicit path or built-in)."""
    tpl = load_template(cfg.template_path)
    candidates, report = segment_select(result_list, m, cfg)
    t0 = time.perf_counter()
    page = build_page(candidates, tpl, result_list.query, now=now)
    report.stage_ms["build"] = (time.perf_counter() - t0) * 1000.0
    return page, report
