"""Static SVG rendering of layout frames.

Mirrors the interactive drawing conventions: circles for publications,
squares for marked ones, a red border for selected ones, group colors
(grey when ungrouped), curved citation lines, and greedy label placement
by descending internal score so labels never overlap.
"""

from __future__ import annotations

from .layout import LayoutFrame

GROUP_COLORS = [
    "#4e79a7", "#59a14f", "#e15759", "#f28e2b", "#b07aa1",
    "#76b7b2", "#edc948", "#ff9da7", "#9c755f", "#bab0ac",
]
UNGROUPED = "#bdbdbd"


def _color(group: "int | None") -> str:
    if group is None:
        return UNGROUPED
    return GROUP_COLORS[(group - 1) % len(GROUP_COLORS)]


def render_svg(frame: LayoutFrame, width: int = 1000, height: int = 700,
               margin: int = 50, font_size: int = 11) -> str:
    n_layers = len(frame.layer_years)
    span_x = width - 2 * margin
    span_y = height - 2 * margin

    def sx(x: float) -> float:
        return margin + x * span_x

    def sy(layer: int) -> float:
        if n_layers <= 1:
            return margin + span_y / 2
        return margin + layer * span_y / (n_layers - 1)

    parts: list[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]

    # year captions, one per first layer of each year
    seen_years: set[int] = set()
    for layer, year in enumerate(frame.layer_years):
        if year in seen_years:
            continue
        seen_years.add(year)
        parts.append(
            f'<text x="4" y="{sy(layer):.1f}" font-size="{font_size - 1}" '
            f'fill="#888" dominant-baseline="middle">{year}</text>'
        )

    pos = {n.id: (sx(n.x), sy(n.layer)) for n in frame.nodes}
    for e in frame.edges:
        x1, y1 = pos[e.citing]
        x2, y2 = pos[e.cited]
        bow = 0.12 * (y1 - y2) * (1 if x2 >= x1 else -1)
        cx = (x1 + x2) / 2 + bow
        cy = (y1 + y2) / 2
        parts.append(
            f'<path d="M {x1:.1f} {y1:.1f} Q {cx:.1f} {cy:.1f} {x2:.1f} {y2:.1f}" '
            f'fill="none" stroke="#b9c6d4" stroke-width="1"/>'
        )

    # nodes (frame order is descending internal score)
    for n in frame.nodes:
        x, y = pos[n.id]
        stroke = "#d62728" if n.selected else "#4d4d4d"
        stroke_w = 2 if n.selected else 1
        fill = _color(n.group)
        if n.marked:
            parts.append(
                f'<rect x="{x - 5:.1f}" y="{y - 5:.1f}" width="10" height="10" '
                f'fill="{fill}" stroke="{stroke}" stroke-width="{stroke_w}"/>'
            )
        else:
            parts.append(
                f'<circle cx="{x:.1f}" cy="{y:.1f}" r="5" '
                f'fill="{fill}" stroke="{stroke}" stroke-width="{stroke_w}"/>'
            )

    # greedy labels, high scores first, skipping overlaps
    taken: list[tuple[float, float, float, float]] = []
    for n in frame.nodes:
        x, y = pos[n.id]
        w = 0.62 * font_size * max(1, len(n.label))
        box = (x - w / 2, y + 7, x + w / 2, y + 7 + font_size)
        if any(not (box[2] < t[0] or box[0] > t[2] or box[3] < t[1] or box[1] > t[3]) for t in taken):
            continue
        taken.append(box)
        parts.append(
            f'<text x="{x:.1f}" y="{y + 7 + font_size:.1f}" font-size="{font_size}" '
            f'text-anchor="middle" fill="#222">{_escape(n.label)}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
