#!/usr/bin/env python3
"""Generate the bundled synthetic corpora to disk.

Writes, under the output directory:
  matching/export.txt          tagged export with ground-truth links
  matching/manifest.json       truth edges, ambiguities, book plant
  workflow/pubs.tsv, cites.tsv pair files for the search-and-expand fixture
  workflow/manifest.json       expected member count after each step
  workflow/script.json         ready-to-run pipeline for `citnet drill`
"""

import argparse
import json
from pathlib import Path

from citnet.ingest import format_wos_export, write_pair_files
from citnet.synth import matching_corpus, workflow_corpus


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="corpora", help="output directory")
    ap.add_argument("--records", type=int, default=5000, help="matching corpus size")
    ap.add_argument("--seed", type=int, default=17)
    args = ap.parse_args()

    out = Path(args.out)
    (out / "matching").mkdir(parents=True, exist_ok=True)
    (out / "workflow").mkdir(parents=True, exist_ok=True)

    mc = matching_corpus(seed=args.seed, n_records=args.records)
    (out / "matching" / "export.txt").write_text(format_wos_export(mc.records), encoding="utf-8")
    (out / "matching" / "manifest.json").write_text(json.dumps({
        "records": args.records,
        "truth_edges": sorted(map(list, mc.truth_edges)),
        "doi_precedence_edges": sorted(map(list, mc.doi_case_edges)),
        "ambiguous_references": sorted(mc.ambiguous_raws),
        "book_id": mc.book_id,
        "book_citers": sorted(mc.book_citers),
    }, indent=2), encoding="utf-8")
    print(f"matching corpus: {args.records} records, {len(mc.truth_edges)} truth edges")

    wc = workflow_corpus()
    write_pair_files(wc.publications, wc.edges,
                     out / "workflow" / "pubs.tsv", out / "workflow" / "cites.tsv")
    (out / "workflow" / "manifest.json").write_text(
        json.dumps(wc.manifest, indent=2), encoding="utf-8")
    (out / "workflow" / "script.json").write_text(json.dumps({
        "steps": [
            {"op": "search_drill", "pattern": wc.manifest["search_pattern"]},
            {"op": "keep_largest_component"},
            {"op": "expand", "predecessors": True, "min_relations": 10},
            {"op": "remove", "ids": wc.manifest["removal_ids"]},
            {"op": "expand", "successors": True, "min_relations": 4},
        ]
    }, indent=2), encoding="utf-8")
    print(f"workflow corpus: {wc.manifest['total_publications']} publications, "
          f"{wc.manifest['total_raw_edges']} edges -> {out / 'workflow'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
