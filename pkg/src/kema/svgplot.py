"""Minimal native SVG output: scatter plots and polyline curves only.

Output is deterministic (no timestamps) so repeated runs are byte-identical.
"""

PALETTE = ["#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b"]

_W, _H, _PAD = 480, 360, 40


def _scaler(values, lo_px, hi_px):
    vmin, vmax = min(values), max(values)
    span = vmax - vmin or 1.0

    def to_px(v):
        return lo_px + (v - vmin) / span * (hi_px - lo_px)

    return to_px


def scatter_svg(points, groups, title=""):
    """SVG scatter of 2-D points (2 x n), one palette color per group value."""
    xs, ys = points[0], points[1]
    sx = _scaler(list(xs), _PAD, _W - _PAD)
    sy = _scaler(list(ys), _H - _PAD, _PAD)
    uniq = sorted(set(int(g) for g in groups))
    color = {g: PALETTE[i % len(PALETTE)] for i, g in enumerate(uniq)}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_W // 2}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>'
        )
    for x, y, g in zip(xs, ys, groups):
        parts.append(
            f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.5" '
            f'fill="{color[int(g)]}" fill-opacity="0.7"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def curves_svg(curves, title=""):
    """SVG polylines for a list of (label, xs, ys) series on shared axes."""
    all_x = [x for _, xs, _ in curves for x in xs]
    all_y = [y for _, _, ys in curves for y in ys]
    sx = _scaler(all_x, _PAD, _W - _PAD)
    sy = _scaler(all_y + [0.0], _H - _PAD, _PAD)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<line x1="{_PAD}" y1="{_H - _PAD}" x2="{_W - _PAD}" y2="{_H - _PAD}" '
        'stroke="black"/>',
        f'<line x1="{_PAD}" y1="{_PAD}" x2="{_PAD}" y2="{_H - _PAD}" stroke="black"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_W // 2}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>'
        )
    for i, (label, xs, ys) in enumerate(curves):
        col = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{col}" stroke-width="1.5"/>')
        parts.append(
            f'<text x="{_W - _PAD + 4}" y="{_PAD + 16 * i + 10}" font-family="sans-serif" '
            f'font-size="11" fill="{col}" text-anchor="end">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path, content):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(content)
