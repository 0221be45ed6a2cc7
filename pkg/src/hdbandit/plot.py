"""Dependency-free SVG line charts for the CSV outputs."""

import math
from xml.sax.saxutils import escape

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

WIDTH, HEIGHT = 760, 480
LEFT, RIGHT, TOP, BOTTOM = 70, 230, 40, 60


def _fmt(v):
    return f"{v:.2f}"


def _nice_ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-12 * abs(hi):
        ticks.append(round(v, 12))
        v += step
    return ticks


def line_chart(series, title, xlabel, ylabel, log_y=False, bands=None):
    """Render ``{label: [(x, y), ...]}`` as an SVG document string.

    ``bands`` optionally maps a label to ``[(x, lo, hi), ...]`` drawn as a
    translucent envelope behind the line.
    """
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    if bands:
        ys += [v for pts in bands.values() for _, lo, hi in pts for v in (lo, hi)]
    if not xs:
        raise ValueError("nothing to plot")
    if log_y:
        if min(ys) <= 0:
            raise ValueError("log-scale axis needs positive values")
        ys_t = [math.log10(y) for y in ys]
    else:
        ys_t = ys
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys_t), max(ys_t)
    if x1 == x0:
        x1 = x0 + 1
    if log_y:
        y0, y1 = math.floor(y0), math.ceil(y1)
    if y1 == y0:
        y1 = y0 + 1
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        yt = math.log10(y) if log_y else y
        return TOP + ph - (yt - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" data-y-scale="{"log" if log_y else "linear"}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-size="15" '
        f'font-family="sans-serif">{escape(title)}</text>',
        f'<g id="axes" stroke="black" stroke-width="1">'
        f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}"/>'
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}"/></g>',
    ]

    tick_parts = ['<g id="ticks" font-size="11" font-family="sans-serif">']
    for xt in _nice_ticks(x0, x1):
        tick_parts.append(
            f'<line x1="{_fmt(px(xt))}" y1="{TOP + ph}" x2="{_fmt(px(xt))}" y2="{TOP + ph + 5}" '
            f'stroke="black"/><text x="{_fmt(px(xt))}" y="{TOP + ph + 18}" '
            f'text-anchor="middle">{xt:g}</text>'
        )
    if log_y:
        yticks = [10.0**e for e in range(int(y0), int(y1) + 1)]
    else:
        yticks = _nice_ticks(y0, y1)
    for yt in yticks:
        tick_parts.append(
            f'<line x1="{LEFT - 5}" y1="{_fmt(py(yt))}" x2="{LEFT}" y2="{_fmt(py(yt))}" '
            f'stroke="black"/><text x="{LEFT - 8}" y="{_fmt(py(yt) + 4)}" '
            f'text-anchor="end">{yt:g}</text>'
        )
    tick_parts.append("</g>")
    out.append("".join(tick_parts))
    out.append(
        f'<text x="{LEFT + pw / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle" font-size="13" '
        f'font-family="sans-serif">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="18" y="{TOP + ph / 2:.0f}" text-anchor="middle" font-size="13" '
        f'font-family="sans-serif" transform="rotate(-90 18 {TOP + ph / 2:.0f})">'
        f'{escape(ylabel)}</text>'
    )

    for i, (label, pts) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        if bands and label in bands and bands[label]:
            band = bands[label]
            upper = " ".join(f"{_fmt(px(x))},{_fmt(py(hi))}" for x, _, hi in band)
            lower = " ".join(f"{_fmt(px(x))},{_fmt(py(lo))}" for x, lo, _ in reversed(band))
            out.append(f'<polygon points="{upper} {lower}" fill="{color}" '
                       f'fill-opacity="0.15" stroke="none"/>')
        pts_s = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in pts)
        out.append(f'<polyline class="series" data-label="{escape(label, {chr(34): "&quot;"})}" '
                   f'fill="none" stroke="{color}" stroke-width="1.8" points="{pts_s}"/>')
        ly = TOP + 14 + 18 * i
        out.append(
            f'<line x1="{WIDTH - RIGHT + 15}" y1="{ly}" x2="{WIDTH - RIGHT + 40}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"/>'
            f'<text x="{WIDTH - RIGHT + 46}" y="{ly + 4}" font-size="11" '
            f'font-family="sans-serif">{escape(label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
