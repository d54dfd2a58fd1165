#!/usr/bin/env python3
"""Record a real service conversation for the UI-loop test.

Drives the session service through the exact request sequence the browser
client issues (create, frame, two marks, hover details, drill with
intermediates, expand with successors at min 2, back, forward, each
mutation followed by a frame fetch) and stores every exchange verbatim.
The vitest suite replays them FIFO, asserting the UI sends byte-identical
requests and rendering from the recorded responses.
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from citnet.ingest import PAIR_CITATIONS_HEADER, PAIR_PUBLICATIONS_HEADER
from citnet.service import create_app
from citnet.synth import workflow_corpus

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "ui-session.json"


def pair_texts():
    corpus = workflow_corpus()
    pub_lines = ["\t".join(PAIR_PUBLICATIONS_HEADER)]
    for p in corpus.publications:
        authors = "; ".join([p.first_author, *p.co_authors])
        ext = str(p.external_citations) if p.external_known else ""
        pub_lines.append("\t".join([p.id, authors, p.title, p.source, str(p.year),
                                    p.doi or "", ext]))
    cit_lines = ["\t".join(PAIR_CITATIONS_HEADER)]
    cit_lines += [f"{a}\t{b}" for a, b in corpus.edges]
    return "\n".join(pub_lines) + "\n", "\n".join(cit_lines) + "\n"


def main() -> int:
    client = TestClient(create_app())
    exchanges = []

    def call(method: str, path: str, body=None, params=None):
        if params:
            from urllib.parse import urlencode
            path = f"{path}?{urlencode(params)}"
        resp = client.request(method, path, json=body)
        assert resp.status_code < 300, f"{method} {path} -> {resp.status_code}: {resp.text}"
        exchanges.append({
            "method": method,
            "path": path,
            "body": body,
            "status": resp.status_code,
            "response": resp.json(),
        })
        return resp.json()

    pubs, cites = pair_texts()
    created = call("POST", "/v1/sessions",
                   {"format": "pairs", "publications": pubs, "citations": cites})
    sid = created["session_id"]

    frame_params = {"display_count": 40, "transitive_reduction": "false"}
    frame = call("GET", f"/v1/sessions/{sid}/frame", params=frame_params)
    # the two most-cited publications of the planted topic chain: they have
    # intermediates between them and shared successors, so every step of the
    # loop changes the picture
    chain = [n["id"] for n in frame["nodes"] if n["id"].startswith("core")]
    n0, n1 = chain[0], chain[1]

    call("POST", f"/v1/sessions/{sid}/mark", {"ids": [n0], "marked": True})
    call("GET", f"/v1/sessions/{sid}/frame", params=frame_params)
    call("POST", f"/v1/sessions/{sid}/mark", {"ids": [n1], "marked": True})
    call("GET", f"/v1/sessions/{sid}/frame", params=frame_params)

    call("GET", f"/v1/sessions/{sid}/publications/{n0}")

    call("POST", f"/v1/sessions/{sid}/drill", {
        "mode": "by_marked",
        "include_predecessors": False,
        "include_successors": False,
        "include_intermediates": True,
        "min_relations": 1,
    })
    call("GET", f"/v1/sessions/{sid}/frame", params=frame_params)

    call("POST", f"/v1/sessions/{sid}/expand", {
        "add_predecessors": False,
        "add_successors": True,
        "add_intermediates": False,
        "min_relations": 2,
    })
    call("GET", f"/v1/sessions/{sid}/frame", params=frame_params)

    call("POST", f"/v1/sessions/{sid}/back", None)
    call("GET", f"/v1/sessions/{sid}/frame", params=frame_params)
    call("POST", f"/v1/sessions/{sid}/forward", None)
    call("GET", f"/v1/sessions/{sid}/frame", params=frame_params)

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"exchanges": exchanges}, indent=2), encoding="utf-8")
    print(f"recorded {len(exchanges)} exchanges -> {OUT}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
