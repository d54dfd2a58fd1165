#!/usr/bin/env python3
"""Build, reduce and cluster a million-publication synthetic network.

Mirrors the large-corpus workflow at half the scale of the biggest
published runs: 1,000,000 publications and 10,000,000 raw citation
relations, with recency-biased references and a sprinkle of same-year
mutual citations for the cycle repair to clean up.
"""

import argparse
import resource
import time

from citnet import analytics, dagops
from citnet.model import build_network
from citnet.synth import scale_corpus


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--publications", type=int, default=1_000_000)
    ap.add_argument("--edges", type=int, default=10_000_000)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--resolution", type=float, default=1.0)
    args = ap.parse_args()

    t0 = time.monotonic()
    pubs, edges = scale_corpus(args.publications, args.edges, seed=args.seed)
    t1 = time.monotonic()
    print(f"generate   {t1 - t0:7.1f}s  ({len(pubs):,} publications, {len(edges):,} raw edges)")

    built = build_network(pubs, edges)
    net = built.network
    t2 = time.monotonic()
    print(f"build      {t2 - t1:7.1f}s  ({net.n_edges:,} edges kept, {len(built.dropped):,} dropped)")

    subset = dagops.transitive_reduction(net)
    t3 = time.monotonic()
    print(f"reduce     {t3 - t2:7.1f}s  ({subset.essential_count:,} essential edges)")

    part = analytics.cluster(net, resolution=args.resolution, seed=args.seed)
    t4 = time.monotonic()
    print(f"cluster    {t4 - t3:7.1f}s  ({part.n_clusters:,} clusters, quality {part.quality:,.1f})")

    peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1e6
    print(f"total      {t4 - t0:7.1f}s  peak RSS {peak:.2f} GB")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
