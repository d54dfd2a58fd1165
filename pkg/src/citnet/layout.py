"""Historiograph layout.

The displayed subset (most-cited publications of the current network) is
stacked into year layers, oldest at the top, so that every citation flows
upward: the layer of a citing publication is always below the layer of the
cited one, also within a single year.  Horizontal positions live on a
discrete grid of m points and minimize

    sum_ij (s_ij d_ij^2 - alpha d_ij^beta),   d_ij = |x_i - x_j|,

subject to a minimum same-layer separation, where s_ij is a random-walk
closeness of the two publications in the undirected citation graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dagops import transitive_reduction
from .errors import ContractError
from .model import NetworkView, Subnet, induce_subnet

FRAME_VERSION = 1


@dataclass(frozen=True)
class LayoutParams:
    display_count: int = 40
    alpha: float = 0.1
    beta: float = 0.5
    grid_points: int = 100           # m in the grid {0/(m-1), ..., (m-1)/(m-1)}
    min_separation: int = 5          # same-layer distance in grid points
    max_per_layer: int = 10
    use_transitive_reduction: bool = False
    seed: int = 0
    restarts: int = 10
    walk_steps: int = 3              # random-walk truncation T
    stop_probability: float = 0.5    # per-step stop chance of the walk
    score_scope: str = "full"        # internal scores from the full network or the view

    def __post_init__(self):
        if self.display_count < 1:
            raise ContractError("display_count must be >= 1")
        if not (self.grid_points > self.min_separation >= 1):
            raise ContractError("need grid_points > min_separation >= 1")
        if self.alpha < 0 or self.beta <= 0:
            raise ContractError("alpha must be >= 0 and beta > 0")
        if self.score_scope not in ("full", "view"):
            raise ContractError("score_scope must be 'full' or 'view'")


@dataclass(frozen=True)
class FrameNode:
    id: str
    label: str
    year: int
    layer: int
    x: float
    marked: bool
    selected: bool
    group: "int | None"
    internal_score: int


@dataclass(frozen=True)
class FrameEdge:
    citing: str
    cited: str
    essential: bool


@dataclass(frozen=True)
class LayoutFrame:
    nodes: tuple[FrameNode, ...]
    edges: tuple[FrameEdge, ...]
    layer_years: tuple[int, ...]     # year represented by each layer, top to bottom
    grid_points: int
    min_separation: int
    use_transitive_reduction: bool

    def to_dict(self) -> dict:
        return {
            "version": FRAME_VERSION,
            "grid_points": self.grid_points,
            "min_separation": self.min_separation,
            "transitive_reduction": self.use_transitive_reduction,
            "layer_years": list(self.layer_years),
            "nodes": [
                {
                    "id": n.id, "label": n.label, "year": n.year, "layer": n.layer,
                    "x": n.x, "marked": n.marked, "selected": n.selected,
                    "group": n.group, "internal_score": n.internal_score,
                }
                for n in self.nodes
            ],
            "edges": [
                {"citing": e.citing, "cited": e.cited, "essential": e.essential}
                for e in self.edges
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)


def frame_from_dict(doc: dict) -> LayoutFrame:
    if doc.get("version") != FRAME_VERSION:
        raise ContractError(f"unsupported frame version: {doc.get('version')!r}")
    return LayoutFrame(
        nodes=tuple(
            FrameNode(
                id=n["id"], label=n["label"], year=n["year"], layer=n["layer"],
                x=n["x"], marked=n["marked"], selected=n["selected"],
                group=n["group"], internal_score=n["internal_score"],
            )
            for n in doc["nodes"]
        ),
        edges=tuple(FrameEdge(e["citing"], e["cited"], e["essential"]) for e in doc["edges"]),
        layer_years=tuple(doc["layer_years"]),
        grid_points=doc["grid_points"],
        min_separation=doc["min_separation"],
        use_transitive_reduction=doc["transitive_reduction"],
    )


# -- displayed subset ---------------------------------------------------------

def display_subset(view: NetworkView, display_count: int, score_scope: str = "full") -> list[str]:
    """The most frequently cited members, ranked by internal citation score
    with ties to the older publication, then the id.  Returns the whole view
    when it is smaller than ``display_count``."""
    if display_count < 1:
        raise ContractError("display_count must be >= 1")
    net = view.network
    if score_scope == "view":
        sub = view.subnet
        indeg = np.bincount(sub.cited, minlength=sub.n)
        scores = {pid: int(indeg[i]) for i, pid in enumerate(sub.node_ids)}
    else:
        scores = {pid: net.internal_citations(pid) for pid in view.member_ids}
    ranked = sorted(
        view.member_ids,
        key=lambda pid: (-scores[pid], net.publication(pid).year, pid),
    )
    return ranked[:display_count]


# -- layer assignment ------------------------------------------------------------

def assign_layers(sub: Subnet, max_per_layer: int = 10) -> tuple[dict[int, int], list[int]]:
    """Layer index per node (0 = topmost = oldest) and the year of each layer.

    Years are stacked oldest-first.  Within one year, a longest-path rule
    over the year's internal citations puts a citing publication one step
    below the lowest publication it cites; oversize layers are then split
    into runs of at most ``max_per_layer``, ordered by descending internal
    score.
    """
    if max_per_layer < 1:
        raise ContractError("max_per_layer must be >= 1")
    years = sub.years
    layer_of: dict[int, int] = {}
    layer_years: list[int] = []
    if sub.n == 0:
        return layer_of, layer_years

    indeg = np.bincount(sub.cited, minlength=sub.n)
    for year in sorted(set(years.tolist())):
        nodes = np.flatnonzero(years == year).tolist()
        depth = _same_year_depths(sub, nodes, year)
        by_depth: dict[int, list[int]] = {}
        for i in nodes:
            by_depth.setdefault(depth[i], []).append(i)
        for d in sorted(by_depth):
            row = sorted(by_depth[d], key=lambda i: (-int(indeg[i]), sub.node_ids[i]))
            for start in range(0, len(row), max_per_layer):
                for i in row[start:start + max_per_layer]:
                    layer_of[i] = len(layer_years)
                layer_years.append(year)
    return layer_of, layer_years


def _same_year_depths(sub: Subnet, nodes: list[int], year: int) -> dict[int, int]:
    """Depth = 1 + max depth of same-year cited publications (0 when none).

    Iterative post-order evaluation, so long same-year chains cannot hit the
    recursion limit.
    """
    node_set = set(nodes)
    memo: dict[int, int] = {}
    for start in nodes:
        stack = [(start, iter([j for j in sub.out_neighbors(start).tolist() if j in node_set]))]
        seen_on_stack = {start}
        while stack:
            i, it = stack[-1]
            advanced = False
            for j in it:
                if j in memo or j in seen_on_stack:
                    continue
                stack.append((j, iter([k for k in sub.out_neighbors(j).tolist() if k in node_set])))
                seen_on_stack.add(j)
                advanced = True
                break
            if not advanced:
                best = -1
                for j in sub.out_neighbors(i).tolist():
                    if j in node_set:
                        best = max(best, memo[j])
                memo[i] = best + 1
                stack.pop()
                seen_on_stack.discard(i)
    return memo


# -- random-walk closeness ----------------------------------------------------------

def closeness(sub: Subnet, walk_steps: int = 3, stop_probability: float = 0.5) -> np.ndarray:
    """Probability that a stopping random walk started at i ends at j.

    The walk moves uniformly over undirected neighbors and stops after each
    step with probability ``stop_probability``; contributions are truncated
    after ``walk_steps`` steps.  The result is symmetrized.  Isolated
    publications get zero rows and columns.
    """
    n = sub.n
    if n == 0:
        return np.zeros((0, 0))
    adj = np.zeros((n, n))
    for a, b in zip(sub.citing.tolist(), sub.cited.tolist()):
        adj[a, b] = 1.0
        adj[b, a] = 1.0
    deg = adj.sum(axis=1)
    p = np.divide(adj, deg[:, None], out=np.zeros_like(adj), where=deg[:, None] > 0)
    s = np.zeros((n, n))
    pt = np.eye(n)
    for t in range(1, walk_steps + 1):
        pt = pt @ p
        s += stop_probability * (1.0 - stop_probability) ** (t - 1) * pt
    return 0.5 * (s + s.T)


# -- horizontal optimization -----------------------------------------------------------

def energy(s: np.ndarray, x: np.ndarray, alpha: float, beta: float) -> float:
    """The layout energy over all ordered pairs, with 0**beta taken as 0."""
    d = np.abs(x[:, None] - x[None, :])
    rep = np.where(d > 0, d ** beta, 0.0)
    e = s * d * d - alpha * rep
    np.fill_diagonal(e, 0.0)
    return float(e.sum())


def optimize_x(
    s: np.ndarray,
    layer_of: Sequence[int],
    params: LayoutParams,
) -> np.ndarray:
    """Grid positions minimizing the layout energy under the same-layer
    separation constraint, by seeded restarts of single-node coordinate
    descent over the grid."""
    n = s.shape[0]
    if n == 0:
        return np.zeros(0)
    m = params.grid_points
    sep = params.min_separation
    layers = np.asarray(layer_of, dtype=np.int64)
    occupancy = np.bincount(layers)
    worst = int(occupancy.max())
    if (worst - 1) * sep > m - 1:
        raise ContractError(
            f"layer with {worst} publications cannot keep {sep} grid points of "
            f"separation on a {m}-point grid; increase grid_points or lower max_per_layer"
        )
    rng = np.random.default_rng(params.seed)
    grid = np.arange(m) / (m - 1)
    best_x: np.ndarray | None = None
    best_e = np.inf
    for _ in range(max(1, params.restarts)):
        g = random_feasible_assignment(layers, m, sep, rng)
        g = _descend(s, layers, g, m, sep, params.alpha, params.beta, rng)
        e = energy(s, grid[g], params.alpha, params.beta)
        if e < best_e - 1e-15:
            best_e = e
            best_x = grid[g]
    assert best_x is not None
    return best_x


def random_feasible_assignment(
    layers: np.ndarray, m: int, sep: int, rng: np.random.Generator
) -> np.ndarray:
    """Uniform random grid slots with pairwise same-layer gaps >= sep."""
    n = layers.shape[0]
    g = np.zeros(n, dtype=np.int64)
    for layer in np.unique(layers):
        idx = np.flatnonzero(layers == layer)
        k = idx.shape[0]
        # sorted distinct picks from a compressed range, then re-expanded,
        # give positions with pairwise gaps >= sep
        compressed = m - (k - 1) * (sep - 1)
        picks = np.sort(rng.choice(compressed, size=k, replace=False))
        slots = picks + np.arange(k) * (sep - 1)
        rng.shuffle(idx)
        g[idx] = slots
    return g


def _descend(s, layers, g, m, sep, alpha, beta, rng) -> np.ndarray:
    n = g.shape[0]
    grid = np.arange(m) / (m - 1)
    order = np.arange(n)
    for _ in range(200):
        moved = False
        rng.shuffle(order)
        for i in order.tolist():
            others = np.arange(n) != i
            xo = grid[g[others]]
            si = s[i, others]
            d = np.abs(grid[:, None] - xo[None, :])
            rep = np.where(d > 0, d ** beta, 0.0)
            contrib = (d * d) @ si - alpha * rep.sum(axis=1)
            mates = g[(layers == layers[i]) & others]
            feasible = np.ones(m, dtype=bool)
            for gm in mates.tolist():
                lo = max(0, gm - sep + 1)
                feasible[lo:gm + sep] = False
            contrib[~feasible] = np.inf
            best = int(np.argmin(contrib))
            if contrib[best] < contrib[g[i]] - 1e-12:
                g[i] = best
                moved = True
        if not moved:
            break
    return g


# -- frame composition ---------------------------------------------------------------

def compose_frame(view: NetworkView, params: LayoutParams | None = None) -> LayoutFrame:
    """Full pipeline: displayed subset, layers, closeness, grid positions,
    drawn edges (optionally only the transitive reduction)."""
    params = params or LayoutParams()
    shown = display_subset(view, params.display_count, params.score_scope)
    if not shown:
        return LayoutFrame((), (), (), params.grid_points, params.min_separation,
                           params.use_transitive_reduction)
    net = view.network
    sub = induce_subnet(net, frozenset(shown))
    layer_of, layer_years = assign_layers(sub, params.max_per_layer)
    s = closeness(sub, params.walk_steps, params.stop_probability)
    layers_arr = [layer_of[i] for i in range(sub.n)]
    x = optimize_x(s, layers_arr, params)

    reduction = transitive_reduction(sub)
    essential = dict(
        ((c, d), ess) for c, d, ess in zip(
            reduction.citing.tolist(), reduction.cited.tolist(), reduction.essential_mask.tolist()
        )
    )
    scores = {pid: net.internal_citations(pid) for pid in shown}
    order = {pid: k for k, pid in enumerate(shown)}
    nodes = []
    for pid in shown:  # display rank order: renderers draw labels greedily in-order
        i = sub.index[pid]
        pub = net.publication(pid)
        nodes.append(FrameNode(
            id=pid,
            label=pub.label,
            year=pub.year,
            layer=layer_of[i],
            x=float(x[i]),
            marked=pid in view.marked,
            selected=pid in view.selected,
            group=view.groups.get(pid),
            internal_score=scores[pid],
        ))
    edges = []
    for a, b in zip(sub.citing.tolist(), sub.cited.tolist()):
        ess = essential[(a, b)]
        if params.use_transitive_reduction and not ess:
            continue
        edges.append(FrameEdge(citing=sub.node_ids[a], cited=sub.node_ids[b], essential=bool(ess)))
    edges.sort(key=lambda e: (order[e.citing], order[e.cited]))
    return LayoutFrame(
        nodes=tuple(nodes),
        edges=tuple(edges),
        layer_years=tuple(layer_years),
        grid_points=params.grid_points,
        min_separation=params.min_separation,
        use_transitive_reduction=params.use_transitive_reduction,
    )
