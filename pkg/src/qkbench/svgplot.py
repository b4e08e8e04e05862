"""Minimal static SVG charts (bars and lines) with axes and labels.

Deliberately tiny: benchmark artifacts need deterministic, dependency-free
figures, not an interactive plotting stack. Numbers behind every chart are
also written as CSV by the callers; charts are derived artifacts.
"""
from __future__ import annotations

from pathlib import Path

WIDTH, HEIGHT = 640, 400
MARGIN = {"left": 64, "right": 24, "top": 40, "bottom": 56}
PALETTE = ("#9467bd", "#ff7f0e", "#8c8c8c", "#4d4d4d", "#2ca02c", "#1f77b4")


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".") or "0"


def _header(title: str) -> list[str]:
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        lines.append(
            f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" font-size="15">{_esc(title)}</text>'
        )
    return lines


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _y_axis(lines: list[str], lo: float, hi: float, ylabel: str, x0, x1, y0, y1) -> None:
    span = hi - lo or 1.0
    for k in range(6):
        val = lo + span * k / 5
        y = y1 - (y1 - y0) * k / 5
        lines.append(
            f'<line x1="{x0}" y1="{y:.1f}" x2="{x1}" y2="{y:.1f}" stroke="#dddddd"/>'
        )
        lines.append(
            f'<text x="{x0 - 6}" y="{y + 4:.1f}" text-anchor="end" font-size="11">{_fmt(val)}</text>'
        )
    if ylabel:
        cy = (y0 + y1) / 2
        lines.append(
            f'<text x="16" y="{cy:.1f}" font-size="12" text-anchor="middle" '
            f'transform="rotate(-90 16 {cy:.1f})">{_esc(ylabel)}</text>'
        )


def bar_chart(
    path: str | Path,
    categories: list[str],
    series: list[tuple[str, list[float]]],
    title: str = "",
    ylabel: str = "",
) -> Path:
    """Grouped vertical bars: one group per category, one bar per series."""
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = MARGIN["top"], HEIGHT - MARGIN["bottom"]
    values = [v for _, vals in series for v in vals]
    hi = max(1.0, max(values)) if values else 1.0
    lo = min(0.0, min(values)) if values else 0.0
    span = hi - lo or 1.0
    lines = _header(title)
    _y_axis(lines, lo, hi, ylabel, x0, x1, y0, y1)
    n_cat, n_series = len(categories), len(series)
    group_w = (x1 - x0) / max(n_cat, 1)
    bar_w = group_w * 0.8 / max(n_series, 1)
    for c, cat in enumerate(categories):
        gx = x0 + c * group_w
        for k, (_, vals) in enumerate(series):
            v = vals[c]
            h = (v - lo) / span * (y1 - y0)
            bx = gx + group_w * 0.1 + k * bar_w
            lines.append(
                f'<rect x="{bx:.1f}" y="{y1 - h:.1f}" width="{bar_w:.1f}" height="{h:.1f}" '
                f'fill="{PALETTE[k % len(PALETTE)]}"/>'
            )
            lines.append(
                f'<text x="{bx + bar_w / 2:.1f}" y="{y1 - h - 4:.1f}" text-anchor="middle" '
                f'font-size="9">{_fmt(v)}</text>'
            )
        lines.append(
            f'<text x="{gx + group_w / 2:.1f}" y="{y1 + 16}" text-anchor="middle" '
            f'font-size="11">{_esc(str(cat))}</text>'
        )
    _legend(lines, [name for name, _ in series])
    lines.append(f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black"/>')
    lines.append("</svg>")
    out = Path(path)
    out.write_text("\n".join(lines) + "\n")
    return out


def line_chart(
    path: str | Path,
    series: list[tuple[str, list[float], list[float]]],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
) -> Path:
    """Polyline chart with markers; series are (name, xs, ys)."""
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = MARGIN["top"], HEIGHT - MARGIN["bottom"]
    all_x = [x for _, xs, _ in series for x in xs]
    all_y = [y for _, _, ys in series for y in ys]
    if not all_x:
        raise ValueError("line_chart needs at least one point")
    xlo, xhi = min(all_x), max(all_x)
    ylo, yhi = min(min(all_y), 0.0), max(max(all_y), 1e-12)
    xspan = (xhi - xlo) or 1.0
    yspan = (yhi - ylo) or 1.0
    lines = _header(title)
    _y_axis(lines, ylo, yhi, ylabel, x0, x1, y0, y1)

    def px(x: float) -> float:
        return x0 + (x - xlo) / xspan * (x1 - x0)

    def py(y: float) -> float:
        return y1 - (y - ylo) / yspan * (y1 - y0)

    for k, (name, xs, ys) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in zip(xs, ys))
        lines.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y in zip(xs, ys):
            lines.append(f'<circle cx="{px(x):.1f}" cy="{py(y):.1f}" r="3" fill="{color}"/>')
    for k in range(5):
        xv = xlo + xspan * k / 4
        lines.append(
            f'<text x="{px(xv):.1f}" y="{y1 + 16}" text-anchor="middle" font-size="11">{_fmt(xv)}</text>'
        )
    if xlabel:
        lines.append(
            f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" '
            f'font-size="12">{_esc(xlabel)}</text>'
        )
    _legend(lines, [name for name, _, _ in series])
    lines.append(f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black"/>')
    lines.append("</svg>")
    out = Path(path)
    out.write_text("\n".join(lines) + "\n")
    return out


def _legend(lines: list[str], names: list[str]) -> None:
    x = WIDTH - MARGIN["right"] - 130
    for k, name in enumerate(names):
        y = MARGIN["top"] + 8 + 16 * k
        lines.append(
            f'<rect x="{x}" y="{y - 9}" width="10" height="10" fill="{PALETTE[k % len(PALETTE)]}"/>'
        )
        lines.append(f'<text x="{x + 14}" y="{y}" font-size="11">{_esc(name)}</text>')
