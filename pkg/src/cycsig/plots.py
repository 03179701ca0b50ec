"""Hand-emitted SVG plots: stacked rank bars and frequency curves.

No plotting dependency; output is deterministic for identical inputs.
"""

from __future__ import annotations

from pathlib import Path

from .experiments import FrequencyCurves, RankTable

__all__ = ["stacked_bar_svg", "curves_svg", "write_svg"]

_PALETTE = [
    "#4878cf", "#ee854a", "#6acc65", "#d65f5f", "#956cb4",
    "#8c613c", "#dc7ec0", "#797979", "#d5bb67", "#82c6e2",
]

_W, _H = 720, 420
_ML, _MR, _MT, _MB = 60, 150, 20, 45


def _axes(title_y: str) -> list[str]:
    x0, y0 = _ML, _H - _MB
    x1, y1 = _W - _MR, _MT
    parts = [
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="#333" stroke-width="1"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#333" stroke-width="1"/>',
        f'<text x="{x0 - 42}" y="{(_MT + y0) // 2}" font-size="12" transform="rotate(-90 {x0 - 42} {(_MT + y0) // 2})" text-anchor="middle">{title_y}</text>',
        f'<text x="{(x0 + x1) // 2}" y="{_H - 8}" font-size="12" text-anchor="middle">segment length</text>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = y0 - frac * (y0 - y1)
        parts.append(f'<line x1="{x0 - 4}" y1="{y:.1f}" x2="{x0}" y2="{y:.1f}" stroke="#333"/>')
        parts.append(f'<text x="{x0 - 8}" y="{y + 4:.1f}" font-size="10" text-anchor="end">{frac:g}</text>')
    return parts


def _x_ticks(lengths: tuple[int, ...]) -> list[str]:
    x0, x1 = _ML, _W - _MR
    y0 = _H - _MB
    parts = []
    if not lengths:
        return parts
    step = max(1, len(lengths) // 8)
    for i in range(0, len(lengths), step):
        x = x0 + (i + 0.5) / len(lengths) * (x1 - x0)
        parts.append(f'<line x1="{x:.1f}" y1="{y0}" x2="{x:.1f}" y2="{y0 + 4}" stroke="#333"/>')
        parts.append(f'<text x="{x:.1f}" y="{y0 + 16}" font-size="10" text-anchor="middle">{lengths[i]}</text>')
    return parts


def _legend(entries: list[tuple[str, str]]) -> list[str]:
    parts = []
    x = _W - _MR + 12
    for i, (label, color) in enumerate(entries):
        y = _MT + 14 + 18 * i
        parts.append(f'<rect x="{x}" y="{y - 9}" width="12" height="12" fill="{color}"/>')
        label = label if len(label) <= 18 else label[:15] + "..."
        parts.append(f'<text x="{x + 17}" y="{y + 2}" font-size="11">{label}</text>')
    return parts


def _document(body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">\n<rect width="{_W}" height="{_H}" fill="white"/>\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def stacked_bar_svg(table: RankTable) -> str:
    """Stacked bars of rank shares per segment length."""
    body = _axes("share of segments")
    x0, x1 = _ML, _W - _MR
    y0, y1 = _H - _MB, _MT
    n = len(table.lengths)
    if n:
        body += _x_ticks(table.lengths)
        totals = table.totals()
        width = (x1 - x0) / n
        for i in range(n):
            total = max(int(totals[i]), 1)
            acc = 0.0
            for rank in range(table.max_rank + 1):
                share = table.counts[i, rank] / total
                if share == 0:
                    continue
                top = y0 - (acc + share) * (y0 - y1)
                body.append(
                    f'<rect x="{x0 + i * width + 0.5:.2f}" y="{top:.2f}" '
                    f'width="{max(width - 1, 0.5):.2f}" height="{share * (y0 - y1):.2f}" '
                    f'fill="{_PALETTE[rank % len(_PALETTE)]}"/>'
                )
                acc += share
        body += _legend([(f"rank {r}", _PALETTE[r % len(_PALETTE)]) for r in range(table.max_rank + 1)])
    return _document(body)


def curves_svg(curves: FrequencyCurves, labels: dict[str, str] | None = None) -> str:
    """Frequency polylines per subspace key."""
    labels = labels or {}
    body = _axes("frequency")
    x0, x1 = _ML, _W - _MR
    y0, y1 = _H - _MB, _MT
    n = len(curves.lengths)
    if n:
        body += _x_ticks(curves.lengths)
        keys = sorted(curves.curves, key=lambda k: (-curves.curves[k].max(), k))
        ymax = max((float(curves.curves[k].max()) for k in keys), default=0.0)
        ymax = max(ymax, 1e-9)
        legend = []
        for j, key in enumerate(keys):
            color = _PALETTE[j % len(_PALETTE)]
            pts = []
            for i in range(n):
                x = x0 + (i + 0.5) / n * (x1 - x0)
                y = y0 - float(curves.curves[key][i]) / ymax * (y0 - y1)
                pts.append(f"{x:.2f},{y:.2f}")
            body.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color}" stroke-width="1.6"/>')
            legend.append((labels.get(key, key), color))
        body += _legend(legend)
        body.append(
            f'<text x="{x0 + 4}" y="{y1 + 10}" font-size="10" fill="#555">max {ymax:.3g}</text>'
        )
    return _document(body)


def write_svg(path: str | Path, svg: str) -> None:
    Path(path).write_text(svg)
