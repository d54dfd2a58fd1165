"""Deterministic synthetic corpora with ground-truth manifests.

Each generator plants a known structure and returns a manifest describing
it, computed from the construction itself (plain counting, no engine
calls), so the manifests can serve as independent oracles in tests.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .ingest import RawRecord
from .model import Publication

_SURNAMES = [
    "Smith", "Keller", "Navarro", "Okafor", "Lindqvist", "Moreau", "Tanaka",
    "Chen", "Petrov", "Almeida", "Haugen", "Bianchi", "Kowalski", "Duran",
    "Svensson", "Ferraro", "Banerjee", "Small", "Novak", "Castillo", "Meyer",
    "Visser", "Horvath", "Eriksen", "Braun", "Santos", "Rousseau", "White", "Price",
]
_SOURCES = [
    "J INFORMETR", "SCIENTOMETRICS", "PHYS REV E", "J DOC", "INF PROCESS MANAG",
    "SOC NETWORKS", "PHYS REP", "J AM SOC INF SCI", "RES POLICY", "NATURE",
]


def _author(rng: random.Random, i: int) -> str:
    return f"{rng.choice(_SURNAMES)}{i % 97:02d}, {chr(ord('A') + i % 26)}"


# -- random citation networks -----------------------------------------------------

def random_citation_network(
    n: int, density: float, seed: int, same_year_fraction: float = 0.2
) -> tuple[list[Publication], list[tuple[str, str]]]:
    """Random temporally-valid citation graph (acyclic by construction,
    apart from same-year pairs that build_network may need to repair)."""
    rng = random.Random(seed)
    years = sorted(rng.randint(1990, 2013) for _ in range(n))
    pubs = [
        Publication(
            id=f"n{i:04d}",
            first_author=_author(rng, i),
            title=f"Study {i} of synthetic phenomena",
            source=rng.choice(_SOURCES),
            year=years[i],
            external_citations=rng.randint(0, 200),
        )
        for i in range(n)
    ]
    edges = []
    for i in range(n):
        for j in range(i):
            if years[i] == years[j] and rng.random() < same_year_fraction * density:
                edges.append((pubs[j].id, pubs[i].id))  # same-year, either direction
            elif rng.random() < density:
                edges.append((pubs[i].id, pubs[j].id))  # newer cites older
    return pubs, edges


def random_dag_subnet(n: int, density: float, seed: int):
    """Small random DAG as a built network (cycles repaired), for oracles."""
    from .model import build_network

    pubs, edges = random_citation_network(n, density, seed)
    return build_network(pubs, edges).network


# -- citation-matching corpus -------------------------------------------------------

@dataclass
class MatchingCorpus:
    records: list[RawRecord]
    truth_edges: set[tuple[str, str]]          # expected (citing id, cited id)
    doi_case_edges: set[tuple[str, str]]       # subset that must match via DOI
    ambiguous_raws: set[str]                   # reference strings planted ambiguous
    book_id: str
    book_citers: set[str]
    noise_raws: set[str]                       # unmatched, below the threshold
    record_ids: list[str]


def matching_corpus(seed: int = 17, n_records: int = 5000) -> MatchingCorpus:
    """Corpus with known links: DOI-only matches, noisy 4-tuple matches,
    deliberate ambiguities, sub-threshold noise references, and one book
    cited by 12 records."""
    rng = random.Random(seed)
    years = [1990 + (i * 23) % 24 for i in range(n_records)]
    years.sort()

    surname = [f"{rng.choice(_SURNAMES)}{i:04d}" for i in range(n_records)]
    initial = [chr(ord('A') + i % 26) for i in range(n_records)]
    volume = [str(1 + (i % 120)) for i in range(n_records)]
    page = [str(100 + i) for i in range(n_records)]  # unique page per record
    has_doi = [rng.random() < 0.6 for i in range(n_records)]
    doi = [f"10.{1000 + i % 97}/synth.{i}" if has_doi[i] else None for i in range(n_records)]

    # deliberate ambiguity: pairs of old records sharing a full 4-tuple,
    # early enough that later records can cite them
    ambiguous_pairs = [(50 + 2 * k, 51 + 2 * k) for k in range(10)]
    ambiguous_targets = set()
    for a, b in ambiguous_pairs:
        surname[b] = surname[a]
        initial[b] = initial[a]
        years[b] = years[a]
        volume[b] = volume[a]
        page[b] = page[a]
        doi[a] = doi[b] = None
        ambiguous_targets.add(a)
        ambiguous_targets.add(b)

    ids = []
    for i in range(n_records):
        if doi[i]:
            ids.append(doi[i].lower())
        else:
            base = f"{surname[i].upper()} {initial[i]}|{years[i]}|{volume[i]}|{page[i]}"
            ids.append(base)
    # records sharing a tuple get content-sorted suffixes, mirroring matching
    for a, b in ambiguous_pairs:
        first, second = sorted((a, b), key=lambda i: (f"Title {i}",))
        ids[first] = f"{ids[first]}#1"
        ids[second] = f"{ids[second]}#2"

    def cite_string(j: int, style: str) -> str:
        # commas separate CR fields, so author variants stay comma-free
        name = f"{surname[j]} {initial[j]}"
        if style == "cased":
            name = f"{surname[j].upper()} {initial[j]}."
        elif style == "dotted":
            name = f"{surname[j]} {initial[j]}."
        src = rng.choice(_SOURCES)
        return f"{name}, {years[j]}, {src}, V{volume[j]}, P{page[j]}"

    records: list[RawRecord] = []
    truth_edges: set[tuple[str, str]] = set()
    doi_case_edges: set[tuple[str, str]] = set()
    ambiguous_raws: set[str] = set()
    noise_raws: set[str] = set()

    book_citers = set(rng.sample(range(n_records // 3, n_records), 12))
    book_raw = "GARFIELD E, 1979, CITATION INDEXING THEORY"
    book_id = "GARFIELD E|1979||"

    for i in range(n_records):
        crs: list[str] = []
        n_refs = rng.randint(3, 9) if i > 20 else rng.randint(0, 2)
        candidates = list(range(max(0, i - 400), i))
        rng.shuffle(candidates)
        picked = 0
        for j in candidates:
            if picked >= n_refs:
                break
            if years[j] > years[i]:
                continue
            if j in ambiguous_targets:
                continue
            picked += 1
            style = rng.choice(["plain", "cased", "dotted", "doi", "doi_bad_author"])
            if style in ("doi", "doi_bad_author") and doi[j]:
                author = f"{surname[j]} {initial[j]}"
                if style == "doi_bad_author":
                    author = f"{surname[j][::-1].title()} {initial[j]}"
                    doi_case_edges.add((ids[i], ids[j]))
                prefix = rng.choice(["", "", "https://doi.org/"])
                crs.append(f"{author}, {years[j]}, {rng.choice(_SOURCES)}, "
                           f"V{volume[j]}, P{page[j]}, DOI {prefix}{doi[j].upper()}")
            else:
                crs.append(cite_string(j, style if style in ("plain", "cased", "dotted") else "plain"))
            truth_edges.add((ids[i], ids[j]))
        # deliberately ambiguous reference
        if i >= n_records // 3 and rng.random() < 0.01:
            a, _ = ambiguous_pairs[rng.randrange(len(ambiguous_pairs))]
            if years[a] <= years[i]:
                raw = cite_string(a, "plain")
                crs.append(raw)
                ambiguous_raws.add(raw)
        # unmatched noise, each reference unique so none crosses the
        # incomplete-record threshold
        if rng.random() < 0.05:
            raw = f"Obscure{i} Z, {max(1900, years[i] - 30)}, LOST ARCH, V1, P{i % 50}"
            crs.append(raw)
            noise_raws.add(raw)
        if i in book_citers:
            crs.append(book_raw)

        tags = {
            "AU": ["; ".join([f"{surname[i]}, {initial[i]}", _author(rng, i + 7)])],
            "TI": [f"Title {i} on the structure of synthetic literature"],
            "SO": [rng.choice(_SOURCES)],
            "PY": [str(years[i])],
            "VL": [volume[i]],
            "BP": [page[i]],
        }
        if crs:
            tags["CR"] = crs
        if doi[i]:
            tags["DI"] = [doi[i].upper()]
        records.append(RawRecord(tags=tags, line_span=(0, 0)))

    return MatchingCorpus(
        records=records,
        truth_edges=truth_edges,
        doi_case_edges=doi_case_edges,
        ambiguous_raws=ambiguous_raws,
        book_id=book_id,
        book_citers={ids[i] for i in book_citers},
        noise_raws=noise_raws,
        record_ids=ids,
    )


# -- workflow corpus (search -> component -> expand -> remove -> expand) -------------

@dataclass
class WorkflowCorpus:
    publications: list[Publication]
    edges: list[tuple[str, str]]
    search_pattern: str
    manifest: dict


def workflow_corpus(seed: int = 29) -> WorkflowCorpus:
    """Fixture shaped like a search-and-expand literature walk.

    Planted so that a title search hits 113 publications of which 7 are
    isolated false positives, predecessor expansion at threshold 10 adds
    exactly 18, six planted removals follow, and successor expansion at
    threshold 4 adds exactly 57.  The manifest holds the expected member
    count after each step, derived while planting.
    """
    rng = random.Random(seed)
    pubs: list[Publication] = []
    edges: list[tuple[str, str]] = []

    def add_pub(pid, year, title, source="PHYS REV E"):
        pubs.append(Publication(
            id=pid, first_author=_author(rng, len(pubs)), title=title,
            source=source, year=year, external_citations=rng.randint(0, 300),
        ))

    core_ids = [f"core{i:03d}" for i in range(106)]
    core_year = {}
    for i, pid in enumerate(core_ids):
        year = 2003 + (i * 10) // 106
        core_year[pid] = year
        add_pub(pid, year, f"Fast community detection approach {i} for complex networks")
    # a chain through the core keeps it one connected component
    for i in range(1, 106):
        edges.append((core_ids[i], core_ids[i - 1]))
    for i in range(2, 106):  # extra in-core citations
        for j in rng.sample(range(max(0, i - 20), i - 1), k=min(3, i - 1)):
            edges.append((core_ids[i], core_ids[j]))

    fp_ids = [f"fp{i}" for i in range(7)]
    for i, pid in enumerate(fp_ids):
        add_pub(pid, 2005 + i, f"Marine microbial communities and the detection of sequences {i}",
                source="NATURE")

    pred_ids = [f"pred{i:02d}" for i in range(18)]
    pred_citers: dict[str, set[str]] = {}
    for k, pid in enumerate(pred_ids):
        add_pub(pid, 1998 + k % 5, f"Statistical mechanics of complex {k} systems")
        citers = set(rng.sample(core_ids, 10 + k % 6))
        pred_citers[pid] = citers
        for c in citers:
            edges.append((c, pid))

    removal_ids = [pred_ids[i] for i in (0, 3, 7, 11, 13, 16)]

    succ_ids = [f"succ{i:02d}" for i in range(57)]
    kept_members = set(core_ids) | (set(pred_ids) - set(removal_ids))
    succ_targets: dict[str, set[str]] = {}
    for k, pid in enumerate(succ_ids):
        year = 2011 + k % 3
        add_pub(pid, year, f"Advances {k} in modular structure of graphs")
        eligible = [c for c in core_ids if core_year[c] <= year]
        targets = set(rng.sample(eligible, 4 + k % 3))
        succ_targets[pid] = targets
        for c in targets:
            edges.append((pid, c))

    # background: never uses the banned search token, cites planted sets sparsely
    n_background = 2312
    bg_ids = [f"bg{i:04d}" for i in range(n_background)]
    member_citations_from_bg: dict[str, int] = {}
    core_citations_by_bg: dict[str, int] = {}
    for i, pid in enumerate(bg_ids):
        year = 1998 + (i * 16) // n_background
        add_pub(pid, year, f"Background study {i} of condensed matter", source="PHYS REV B")
    by_id = {p.id: p for p in pubs}
    for i, pid in enumerate(bg_ids):
        year = by_id[pid].year
        for j in rng.sample(range(n_background), k=min(4, i)):
            other = bg_ids[j]
            # strictly-older or same-year with id tie-break: keeps this layer cycle-free
            if other != pid and (by_id[other].year < year or (by_id[other].year == year and other < pid)):
                edges.append((pid, other))
        # at most 2 citations into the core per background publication,
        # and at most 3 member-citations landing on any single outside target
        if rng.random() < 0.15:
            for c in rng.sample(core_ids, k=rng.randint(1, 2)):
                if core_year[c] <= year and core_citations_by_bg.get(pid, 0) < 2:
                    edges.append((pid, c))
                    core_citations_by_bg[pid] = core_citations_by_bg.get(pid, 0) + 1
        if rng.random() < 0.1 and year < 2003:
            if member_citations_from_bg.get(pid, 0) < 3:
                citers = rng.sample(core_ids, k=rng.randint(1, 3))
                for c in citers:
                    edges.append((c, pid))
                member_citations_from_bg[pid] = member_citations_from_bg.get(pid, 0) + len(citers)
        if rng.random() < 0.2:
            fp = rng.choice(fp_ids)
            if by_id[fp].year <= year:
                edges.append((pid, fp))

    edges = sorted(set(edges))

    # self-checks with plain counting (no engine involvement)
    matching = [p.id for p in pubs if "communit" in p.title.lower()
                and " detect" in p.title.lower()[p.title.lower().find("communit"):]]
    assert sorted(matching) == sorted(core_ids + fp_ids), "search plant is off"
    hit_set = set(matching)
    inner = [e for e in edges if e[0] in hit_set and e[1] in hit_set]
    touched = {a for a, _ in inner} | {b for _, b in inner}
    assert touched == set(core_ids), "false positives must be isolated among the hits"

    members = set(core_ids)
    outside_counts: dict[str, int] = {}
    for a, b in edges:
        if a in members and b not in members:
            outside_counts[b] = outside_counts.get(b, 0) + 1
    qualified = {p for p, c in outside_counts.items() if c >= 10}
    assert qualified == set(pred_ids), f"pred plant off: {qualified ^ set(pred_ids)}"

    members_after_removal = (members | set(pred_ids)) - set(removal_ids)
    citing_counts: dict[str, int] = {}
    for a, b in edges:
        if b in members_after_removal and a not in members_after_removal:
            citing_counts[a] = citing_counts.get(a, 0) + 1
    qualified_succ = {p for p, c in citing_counts.items() if c >= 4}
    assert qualified_succ == set(succ_ids), f"succ plant off: {qualified_succ ^ set(succ_ids)}"

    manifest = {
        "total_publications": len(pubs),
        "total_raw_edges": len(edges),
        "search_pattern": "*communit* detect*",
        "steps": [
            {"op": "search_drill", "expected_members": 113},
            {"op": "keep_largest_component", "expected_members": 106},
            {"op": "expand_predecessors", "min_relations": 10, "expected_members": 124},
            {"op": "remove", "ids": removal_ids, "expected_members": 118},
            {"op": "expand_successors", "min_relations": 4, "expected_members": 175},
        ],
        "removal_ids": removal_ids,
        "predecessor_ids": pred_ids,
        "successor_ids": succ_ids,
    }
    return WorkflowCorpus(
        publications=pubs,
        edges=edges,
        search_pattern="*communit* detect*",
        manifest=manifest,
    )


# -- million-scale corpus ------------------------------------------------------------

def scale_corpus(
    n_publications: int = 1_000_000,
    n_edges: int = 10_000_000,
    seed: int = 3,
    recency_scale: float = 150.0,
) -> tuple[list[Publication], np.ndarray]:
    """Large citation-network-shaped corpus, numpy-vectorized.

    Publications are chronological by index; each edge cites a
    recency-biased earlier publication, plus a sprinkle of same-year
    mutual pairs so cycle repair has work to do.  Edges are returned as an
    (m, 2) index array, the documented large-scale input to build_network.
    """
    rng = np.random.default_rng(seed)
    idx = np.arange(n_publications)
    years = (1970 + 44 * np.sqrt(idx / n_publications)).astype(np.int64)

    citing = rng.integers(low=1, high=n_publications, size=n_edges)
    offsets = rng.geometric(1.0 / recency_scale, size=n_edges)
    cited = citing - offsets
    ok = cited >= 0
    citing, cited = citing[ok], cited[ok]

    n_mutual = 2000
    a = rng.integers(low=0, high=n_publications - 1, size=n_mutual)
    b = a + 1
    same_year = years[a] == years[b]
    a, b = a[same_year], b[same_year]
    citing = np.concatenate((citing, a, b))
    cited = np.concatenate((cited, b, a))

    edges = np.stack([citing, cited], axis=1).astype(np.int64)

    year_list = years.tolist()
    pubs = [
        Publication(
            id=f"p{i:07d}",
            first_author="Author Q",
            title="scale study",
            source="SYNTH",
            year=year_list[i],
        )
        for i in range(n_publications)
    ]
    return pubs, edges
