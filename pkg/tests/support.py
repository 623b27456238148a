"""Shared helpers for the test suite: segment builders, random scoring
instances, and a comparison harness against the brute-force oracle."""

from digestweaver.profiles import Profile
from digestweaver.scorer import ScoreConfig, select_candidates, weigh_matrix
from digestweaver.segmenter import Segment, SegmentMatrix

import oracle

# Tokens that survive the tokenizer unchanged (lowercase, >= 2 chars, no stopwords).
VOCAB = [
    "alpine", "bamboo", "canyon", "dunes", "ember", "fjord", "granite",
    "harbor", "indigo", "juniper", "krill", "lagoon", "mesa", "nectar",
]


def make_segment(i, j, text, url="https://example.test/page", fragment=None):
    return Segment(page_index=i, seg_index=j, text=text,
                   html_fragment=fragment if fragment is not None else f"<p>{text}</p>",
                   source_url=url)


def random_instance(rng):
    """One randomized scoring instance: <=5 pages x <=10 segments of random
    token bags, a random query, profile, and config."""
    rows = []
    previous_bags = []
    for i in range(rng.randint(1, 5)):
        row = []
        for j in range(rng.randint(0, 10)):
            if previous_bags and rng.random() < 0.25:
                bag = list(rng.choice(previous_bags))
                rng.shuffle(bag)              # same token set, new order
            else:
                bag = rng.choices(VOCAB, k=rng.randint(1, 30))
            previous_bags.append(bag)
            row.append(make_segment(i, j, " ".join(bag)))
        rows.append(row)

    query = " ".join(rng.sample(VOCAB, rng.randint(1, 3)))
    profile_terms = {
        term: rng.choice([0.25, 0.5, 0.75, 1.0])
        for term in rng.sample(VOCAB, rng.randint(0, 3))
    }
    alpha, beta = 0.0, 0.0
    while alpha + beta == 0.0:
        alpha = rng.choice([0.0, 0.25, 0.5, 0.75, 1.0])
        beta = rng.choice([0.0, 0.25, 0.5, 0.75, 1.0])
    cfg = ScoreConfig(
        alpha=alpha,
        beta=beta,
        delta=rng.choice([0.0, 0.01, 0.05, 0.1, 0.3]),
        max_candidates=rng.choice([1, 3, 12]),
    )
    return rows, query, profile_terms, cfg


def run_implementation(rows, query, profile_terms, cfg):
    phi = weigh_matrix(SegmentMatrix(rows=rows), query,
                       Profile(profile_id="t", terms=profile_terms), cfg)
    return select_candidates(phi, cfg)


def run_oracle(rows, query, profile_terms, cfg):
    triples = [[(s.page_index, s.seg_index, s.text) for s in row] for row in rows]
    return oracle.brute_force_select(
        triples, query, profile_terms,
        alpha=cfg.alpha, beta=cfg.beta, delta=cfg.delta,
        max_candidates=cfg.max_candidates, stopwords=cfg.stopwords,
    )


def assert_matches_oracle(rows, query, profile_terms, cfg, tolerance=1e-9):
    got = run_implementation(rows, query, profile_terms, cfg)
    want = run_oracle(rows, query, profile_terms, cfg)
    got_ids = [(ws.segment.page_index, ws.segment.seg_index) for ws in got]
    want_ids = [(c["i"], c["j"]) for c in want]
    assert got_ids == want_ids, f"membership/order mismatch: {got_ids} != {want_ids}"
    for ws, ref in zip(got, want):
        assert abs(ws.query_density - ref["qd"]) <= tolerance
        assert abs(ws.profile_density - ref["pd"]) <= tolerance
        assert abs(ws.score - ref["score"]) <= tolerance


# ---------------------------------------------------------------------------
# Random HTML pages for segmenter property tests
# ---------------------------------------------------------------------------

_WORDS = [
    "harbor", "lantern", "orchard", "gravel", "monsoon", "stencil", "copper",
    "meadow", "cobalt", "thicket", "parapet", "drizzle", "saffron", "mortar",
    "pelican", "quarry", "ribbon", "satchel", "trellis", "umber", "velvet",
]


def _sentence(rng, lo=4, hi=14):
    return " ".join(rng.choices(_WORDS, k=rng.randint(lo, hi))) + "."


def gen_page(rng):
    """One varied, possibly malformed HTML page: nested containers, tables,
    lists, boilerplate, scripts, comments, unclosed and stray tags."""
    parts = ["<html><head><title>fixture</title>",
             "<style>p { color: red }</style></head><body>"]

    def paragraph():
        parts.append(f"<p>{_sentence(rng)}</p>")

    def heading():
        level = rng.randint(1, 6)
        parts.append(f"<h{level}>{_sentence(rng, 2, 5)}</h{level}>")

    def table():
        parts.append("<table>")
        for _ in range(rng.randint(1, 3)):
            parts.append("<tr>")
            for _ in range(rng.randint(1, 3)):
                parts.append(f"<td>{_sentence(rng, 2, 6)}</td>")
            parts.append("</tr>")
        parts.append("</table>")

    def listing():
        parts.append("<ul>")
        for _ in range(rng.randint(1, 4)):
            parts.append(f"<li>{_sentence(rng, 2, 8)}" + ("" if rng.random() < 0.4 else "</li>"))
        parts.append("</ul>")

    def nested_divs():
        depth = rng.randint(1, 4)
        parts.append("<div>" * depth)
        parts.append(f"<div>{_sentence(rng)}</div>")
        if rng.random() < 0.5:
            paragraph()
        parts.append("</div>" * (depth if rng.random() < 0.7 else max(0, depth - 1)))

    def boilerplate():
        tag = rng.choice(["nav", "footer", "aside"])
        parts.append(f"<{tag}><p>{_sentence(rng)}</p></{tag}>")

    def junk():
        parts.append(rng.choice([
            "<script>var x = '<p>not content</p>';</script>",
            "<!-- commented <p>out</p> -->",
            "<noscript><p>enable js</p></noscript>",
            "<svg><text>vector</text></svg>",
            "</div>",                         # stray close
            "<p>",                            # dangling open
            "<blockquote>" + _sentence(rng),  # unclosed quote
        ]))

    actions = [paragraph, paragraph, heading, table, listing, nested_divs,
               boilerplate, junk]
    for _ in range(rng.randint(6, 18)):
        rng.choice(actions)()
    parts.append("</body></html>")
    return "".join(parts)
