"""Command-line front door: compose digests, inspect segments and scores,
edit profile stores.

Exit codes: 0 success, 1 bad input (schema, template, store), 2 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone

from .errors import DigestWeaverError
from .ingest import FetchPolicy, RawPage, SearchResultEntry, fetch_all, load_result_list
from .pipeline import PipelineConfig, compose
from .profiles import Profile, load_profile, normalize_terms, save_profile
from .scorer import ScoreConfig, load_stopwords, weigh_matrix
from .segmenter import SegConfig, SegmentMatrix, build_segment_matrix, parse_html, segment_page


def _parse_now(value: str) -> datetime:
    moment = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return moment


def _round6(x: float) -> float:
    return float(f"{x:.6f}")


def _segment_dump(matrix: SegmentMatrix) -> list:
    return [
        [
            {"i": s.page_index, "j": s.seg_index, "heading": s.heading,
             "char_len": s.char_len, "text": s.text}
            for s in row
        ]
        for row in matrix.rows
    ]


def _score_dump(phi) -> list:
    return [
        [
            {"i": ws.segment.page_index, "j": ws.segment.seg_index,
             "query_density": _round6(ws.query_density),
             "profile_density": _round6(ws.profile_density),
             "score": _round6(ws.score)}
            for ws in row
        ]
        for row in phi
    ]


def _add_score_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--delta", type=float, default=ScoreConfig.delta)
    parser.add_argument("--alpha", type=float, default=ScoreConfig.alpha)
    parser.add_argument("--beta", type=float, default=ScoreConfig.beta)
    parser.add_argument("--stopwords", help="file overriding the built-in stopword list")


def _add_fetch_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--top-n", type=int, default=FetchPolicy.top_n)
    parser.add_argument("--offline", action="store_true",
                        help="read pages from html_path entries instead of HTTP")
    parser.add_argument("--parallelism", type=int, default=FetchPolicy.parallelism)
    parser.add_argument("--cache-dir")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="digestweaver")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_compose = sub.add_parser("compose", help="build a digest page from a result list")
    p_compose.add_argument("--results", required=True)
    p_compose.add_argument("--profile-store")
    p_compose.add_argument("--profile-id", default="default")
    p_compose.add_argument("--template")
    p_compose.add_argument("--out", required=True)
    p_compose.add_argument("--now", help="pin the generated-at timestamp (ISO-8601)")
    _add_score_flags(p_compose)
    _add_fetch_flags(p_compose)

    p_segment = sub.add_parser("segment", help="dump the segments of one HTML file")
    p_segment.add_argument("--page", required=True)
    p_segment.add_argument("--min-chars", type=int, default=SegConfig.min_chars)
    p_segment.add_argument("--max-chars", type=int, default=SegConfig.max_chars)

    p_score = sub.add_parser("score", help="dump the scored segment matrix")
    p_score.add_argument("--results", required=True)
    p_score.add_argument("--profile-store")
    p_score.add_argument("--profile-id", default="default")
    _add_score_flags(p_score)
    _add_fetch_flags(p_score)

    p_profile = sub.add_parser("profile", help="edit or show a stored profile")
    profile_sub = p_profile.add_subparsers(dest="action", required=True)
    p_set = profile_sub.add_parser("set", help="replace the profile's terms")
    p_set.add_argument("--store", required=True)
    p_set.add_argument("--id", required=True, dest="profile_id")
    p_set.add_argument("terms", nargs="*")
    p_get = profile_sub.add_parser("get", help="print the stored terms")
    p_get.add_argument("--store", required=True)
    p_get.add_argument("--id", required=True, dest="profile_id")
    return parser


def _score_config(args) -> ScoreConfig:
    stop = load_stopwords(args.stopwords) if args.stopwords else ScoreConfig.stopwords
    return ScoreConfig(alpha=args.alpha, beta=args.beta, delta=args.delta, stopwords=stop)


def _fetch_policy(args) -> FetchPolicy:
    return FetchPolicy(
        mode="offline" if args.offline else "online",
        top_n=args.top_n,
        parallelism=args.parallelism,
        cache_dir=args.cache_dir,
    )


def _load_args_profile(args) -> Profile:
    if not args.profile_store:
        return Profile(profile_id=args.profile_id, terms={})
    return load_profile(args.profile_store, args.profile_id)


def _cmd_compose(args) -> int:
    cfg = PipelineConfig(
        fetch=_fetch_policy(args),
        score=_score_config(args),
        template_path=args.template,
        profile_id=args.profile_id,
    )
    result_list = load_result_list(args.results)
    profile = _load_args_profile(args)
    now = _parse_now(args.now) if args.now else None
    page, report = compose(result_list, profile, cfg, now=now)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(page.html)
    print(
        f"pages_fetched={report.pages_fetched} pages_skipped={report.pages_skipped} "
        f"segments_total={report.segments_total} candidates_selected={report.candidates_selected} "
        + " ".join(f"{stage}_ms={ms:.1f}" for stage, ms in report.stage_ms.items()),
        file=sys.stderr,
    )
    return 0


def _cmd_segment(args) -> int:
    with open(args.page, "rb") as fh:
        body = fh.read()
    cfg = SegConfig(min_chars=args.min_chars, max_chars=args.max_chars)
    entry = SearchResultEntry(rank=1, url=f"file://{args.page}")
    page = RawPage(source=entry, body=body, media_type="text/html")
    row = segment_page(parse_html(page, cfg.strip_tags), 0, entry.url, cfg)
    print(json.dumps(_segment_dump(SegmentMatrix(rows=[row])), ensure_ascii=False, indent=2))
    return 0


def _cmd_score(args) -> int:
    cfg = PipelineConfig(fetch=_fetch_policy(args), score=_score_config(args))
    result_list = load_result_list(args.results)
    profile = _load_args_profile(args)
    pages = fetch_all(result_list, cfg.fetch)
    omega = build_segment_matrix(pages, cfg.seg)
    phi = weigh_matrix(omega, result_list.query, profile, cfg.score)
    print(json.dumps(_score_dump(phi), ensure_ascii=False, indent=2))
    return 0


def _cmd_profile(args) -> int:
    if args.action == "set":
        terms = normalize_terms(args.terms)
        save_profile(args.store, Profile(profile_id=args.profile_id,
                                         terms={t.term: t.weight for t in terms}))
    profile = load_profile(args.store, args.profile_id)
    print(json.dumps({"terms": profile.terms}, ensure_ascii=False, sort_keys=True))
    return 0


def run(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "compose": _cmd_compose,
        "segment": _cmd_segment,
        "score": _cmd_score,
        "profile": _cmd_profile,
    }
    try:
        return handlers[args.subcommand](args)
    except (DigestWeaverError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
