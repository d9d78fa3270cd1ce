"""CSV and SVG outputs for Monte Carlo summaries."""
from __future__ import annotations

import csv
import math
from pathlib import Path
from xml.sax.saxutils import escape

from .harness import BIN_WIDTH, TrialRow, TrialSummary

TRIAL_COLUMNS = ["trial_id", "algorithm", "n", "param_r_or_C", "epsilon", "delta",
                 "order_seed", "reward_seed", "returned_arm", "best_arm", "gap",
                 "total_pulls", "peak_residency", "wall_ms"]
REGRET_COLUMNS = ["horizon", "regret"]
AGGREGATE_COLUMNS = ["algorithm", "trials", "errors", "success_count", "success_rate",
                     "frac_gap_le_0.05", "mean_pulls", "max_pulls", "mean_peak_residency",
                     "max_peak_residency", "mean_regret"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_trials_csv(summary: TrialSummary, path: str | Path, wall_time: bool = True) -> None:
    """Per-trial rows. Regret runs carry two extra trailing columns.

    ``wall_time=False`` leaves ``wall_ms`` blank so reruns are byte-identical.
    """
    regret = any(row.regret is not None for row in summary.rows)
    header = TRIAL_COLUMNS + (REGRET_COLUMNS if regret else [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in summary.rows:
            values = [getattr(row, col) for col in TRIAL_COLUMNS]
            if not wall_time:
                values[-1] = None
            if regret:
                values += [row.horizon, row.regret]
            w.writerow([_fmt(v) for v in values])


def write_aggregate_csv(summary: TrialSummary, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGGREGATE_COLUMNS)
        w.writerow([_fmt(v) for v in (
            summary.algorithm, summary.trials, summary.errors, summary.success_count,
            summary.success_rate, summary.fraction_gap_at_most(0.05), summary.mean_pulls,
            summary.max_pulls, summary.mean_peak, summary.max_peak, summary.mean_regret)])


def histogram_bins_shown(summary: TrialSummary) -> int:
    if not summary.rows:
        return 0
    max_gap = max(row.gap for row in summary.rows)
    return max(1, math.ceil(round(max_gap / BIN_WIDTH, 9)))


def render_histogram_svg(summary: TrialSummary, title: str = "") -> str:
    """Bar chart of returned-arm gaps: gap bins on x, counts on y."""
    bins = histogram_bins_shown(summary)
    hist = summary.gap_histogram[:bins]
    width, height, pad = 640, 360, 50
    plot_w, plot_h = width - 2 * pad, height - 2 * pad
    top = max(hist, default=0) or 1
    bar_w = plot_w / max(bins, 1)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
    ]
    for k, count in enumerate(hist):
        h = plot_h * count / top
        x = pad + k * bar_w
        parts.append(
            f'<rect class="bar" data-bin="{k}" data-count="{count}" x="{x:.2f}" '
            f'y="{height - pad - h:.2f}" width="{max(bar_w - 1, 0.5):.2f}" height="{h:.2f}" '
            f'fill="steelblue"/>')
    parts.append(
        f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle" font-size="12">'
        f'Gap between means of the best arm and the returned arm (bin {BIN_WIDTH})</text>')
    parts.append(
        f'<text x="15" y="{height / 2}" font-size="12" transform="rotate(-90 15 {height / 2})" '
        f'text-anchor="middle">Count</text>')
    parts.append(f'<text x="{pad}" y="{height - pad + 15}" font-size="10">0</text>')
    parts.append(f'<text x="{width - pad}" y="{height - pad + 15}" font-size="10" '
                 f'text-anchor="end">{bins * BIN_WIDTH:g}</text>')
    parts.append(f'<text x="{pad - 5}" y="{pad}" font-size="10" text-anchor="end">{top}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_report(summary: TrialSummary, trials_csv: str | Path | None = None,
                aggregate_csv: str | Path | None = None, svg: str | Path | None = None,
                wall_time: bool = True, title: str = "") -> None:
    if trials_csv is not None:
        write_trials_csv(summary, trials_csv, wall_time=wall_time)
    if aggregate_csv is not None:
        write_aggregate_csv(summary, aggregate_csv)
    if svg is not None:
        Path(svg).write_text(render_histogram_svg(summary, title))


def _num(text: str):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            return text


def read_trials_csv(path: str | Path) -> TrialSummary:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for rec in reader:
            vals = {k: _num(v) for k, v in rec.items()}
            vals["gap"] = float(vals["gap"])
            vals["epsilon"] = float(vals["epsilon"])
            vals["delta"] = float(vals["delta"])
            if vals.get("wall_ms") is None:
                vals["wall_ms"] = math.nan
            rows.append(TrialRow(**vals))
    algorithm = rows[0].algorithm if rows else ""
    return TrialSummary(algorithm, rows)

