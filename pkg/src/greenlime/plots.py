"""Dependency-free SVG boxplots of per-run NWISE and slope coefficients."""
import csv
import io
from pathlib import Path

import numpy as np

QUANTILE_COLUMNS = ("unit", "metric", "sampler", "n_samples", "whislo", "q1", "median", "q3", "whishi", "count")
COLORS = {"lime": "#d95f02", "ode": "#1b9e77"}

WIDTH, HEIGHT = 480, 320
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 30, 50


def box_stats(values, whis=1.5):
    """(whislo, q1, median, q3, whishi) with Tukey whiskers; NaNs are dropped."""
    x = np.asarray(values, dtype=np.float64)
    x = x[~np.isnan(x)]
    if x.size == 0:
        return None
    q1, med, q3 = np.percentile(x, [25, 50, 75])
    iqr = q3 - q1
    hi = x[x <= q3 + whis * iqr]
    lo = x[x >= q1 - whis * iqr]
    whishi = max(float(hi.max()), q3) if hi.size else q3
    whislo = min(float(lo.min()), q1) if lo.size else q1
    return float(whislo), float(q1), float(med), float(q3), float(whishi)


def _fmt(v):
    return f"{v:.2f}"


def _series(res, unit, metric):
    groups = []
    for n in res.config.n_samples:
        for sampler in res.config.samplers:
            c = res.cell(unit, sampler, n)
            if metric == "nwise":
                groups.append((sampler, n, None, c.nwise))
            else:
                for j in range(c.slopes.shape[1]):
                    groups.append((sampler, n, j, c.slopes[:, j]))
    return groups


def render_boxplot(title, groups, stats):
    """SVG text for side-by-side boxes; each box carries its quartiles as data attributes."""
    finite = [s for s in stats if s is not None]
    lo = min((s[0] for s in finite), default=0.0)
    hi = max((s[4] for s in finite), default=1.0)
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    plot_w = WIDTH - LEFT - RIGHT
    plot_h = HEIGHT - TOP - BOTTOM

    def ypix(v):
        return TOP + plot_h * (hi - v) / (hi - lo)

    slot = plot_w / max(len(groups), 1)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="18" text-anchor="middle" font-family="sans-serif" font-size="13">{title}</text>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + plot_h}" stroke="black"/>',
        f'<line x1="{LEFT}" y1="{TOP + plot_h}" x2="{WIDTH - RIGHT}" y2="{TOP + plot_h}" stroke="black"/>',
    ]
    for k in range(5):
        v = lo + (hi - lo) * k / 4
        y = ypix(v)
        out.append(f'<line x1="{LEFT - 4}" y1="{_fmt(y)}" x2="{LEFT}" y2="{_fmt(y)}" stroke="black"/>')
        out.append(
            f'<text x="{LEFT - 6}" y="{_fmt(y + 4)}" text-anchor="end" font-family="sans-serif" font-size="10">{v:.4g}</text>'
        )
    for i, ((sampler, n, j, _), s) in enumerate(zip(groups, stats)):
        cx = LEFT + slot * (i + 0.5)
        label = f"{sampler} n={n}" if j is None else f"{sampler} n={n} b{j + 1}"
        out.append(
            f'<text x="{_fmt(cx)}" y="{TOP + plot_h + 16}" text-anchor="middle" font-family="sans-serif" font-size="9">{label}</text>'
        )
        if s is None:
            continue
        whislo, q1, med, q3, whishi = s
        half = min(slot * 0.3, 20)
        color = COLORS.get(sampler, "#7570b3")
        out.append(
            f'<g class="box" data-sampler="{sampler}" data-n="{n}" data-feature="{"" if j is None else j}" '
            f'data-whislo="{whislo!r}" data-q1="{q1!r}" data-median="{med!r}" data-q3="{q3!r}" data-whishi="{whishi!r}">'
        )
        out.append(f'<line x1="{_fmt(cx)}" y1="{_fmt(ypix(whishi))}" x2="{_fmt(cx)}" y2="{_fmt(ypix(q3))}" stroke="black"/>')
        out.append(f'<line x1="{_fmt(cx)}" y1="{_fmt(ypix(q1))}" x2="{_fmt(cx)}" y2="{_fmt(ypix(whislo))}" stroke="black"/>')
        top, bottom = ypix(q3), ypix(q1)
        out.append(
            f'<rect x="{_fmt(cx - half)}" y="{_fmt(top)}" width="{_fmt(2 * half)}" height="{_fmt(max(bottom - top, 0.5))}" '
            f'fill="{color}" fill-opacity="0.6" stroke="black"/>'
        )
        out.append(f'<line x1="{_fmt(cx - half)}" y1="{_fmt(ypix(med))}" x2="{_fmt(cx + half)}" y2="{_fmt(ypix(med))}" stroke="black" stroke-width="2"/>')
        for w in (whislo, whishi):
            out.append(f'<line x1="{_fmt(cx - half / 2)}" y1="{_fmt(ypix(w))}" x2="{_fmt(cx + half / 2)}" y2="{_fmt(ypix(w))}" stroke="black"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plots(res, out_dir):
    """Write nwise_unit<k>.svg, slope_unit<k>.svg and quantiles.csv; returns written paths.

    An experiment without cells writes nothing and returns an empty list.
    """
    if not res.cells:
        return []
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(QUANTILE_COLUMNS)
    written = []
    for unit in range(len(res.config.reference_points)):
        for metric, stem, title in (("nwise", "nwise", "NWISE"), ("slope", "slope", "slope coefficient")):
            groups = _series(res, unit, metric)
            stats = [box_stats(values) for *_, values in groups]
            for (sampler, n, j, values), s in zip(groups, stats):
                name = metric if j is None else f"slope{j + 1}"
                count = int(np.count_nonzero(~np.isnan(values)))
                writer.writerow([unit, name, sampler, n] + (["nan"] * 5 if s is None else [repr(v) for v in s]) + [count])
            path = out_dir / f"{stem}_unit{unit}.svg"
            path.write_text(render_boxplot(f"{title}, unit {unit}", groups, stats), encoding="utf-8")
            written.append(path)
    qpath = out_dir / "quantiles.csv"
    qpath.write_text(buf.getvalue(), encoding="utf-8")
    written.append(qpath)
    return written
