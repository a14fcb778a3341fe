"""Rendering metric reports: aligned tables, delimited files, figures.

The aligned table prints every index to 4 decimal places; the delimited
(tab-separated) and structured key-value forms keep full float precision
so downstream tooling loses nothing. Figures are rendered headlessly to
PNG files next to the reports.
"""

from __future__ import annotations

from pathlib import Path

from .metrics import TABLE_COLUMNS, MetricsReport

STRUCTURED_FIELDS = tuple(key for key, _ in TABLE_COLUMNS) + ("i_af", "i_bf")


def format_value(value: float, decimals: int = 4) -> str:
    if value != value:  # NaN
        return "nan"
    if value == float("inf"):
        return "inf"
    if value == float("-inf"):
        return "-inf"
    return f"{value:.{decimals}f}"


def format_table(rows) -> str:
    """Aligned table, one row per (label, MetricsReport) pair.

    Numeric cells are right-aligned and method labels never contain the
    column separator run, so a reader can split each line on whitespace
    and take the last ten tokens as the indices.
    """
    headers = [header for _, header in TABLE_COLUMNS]
    labels = [label for label, _ in rows]
    cells = [
        [format_value(v) for v in report.column_values()] for _, report in rows
    ]
    label_width = max(len("Method"), *(len(l) for l in labels)) if labels else 6
    widths = [
        max(len(headers[i]), *(len(row[i]) for row in cells)) if cells else len(headers[i])
        for i in range(len(headers))
    ]
    lines = [
        "Method".ljust(label_width)
        + "".join("  " + headers[i].rjust(widths[i]) for i in range(len(headers)))
    ]
    for label, row in zip(labels, cells):
        lines.append(
            label.ljust(label_width)
            + "".join("  " + row[i].rjust(widths[i]) for i in range(len(headers)))
        )
    return "\n".join(lines) + "\n"


def format_delimited(rows) -> str:
    """Tab-separated rows with full-precision values and MI components."""
    lines = ["method\t" + "\t".join(STRUCTURED_FIELDS)]
    for label, report in rows:
        doc = report.to_dict()
        lines.append(label + "\t" + "\t".join(repr(doc[k]) for k in STRUCTURED_FIELDS))
    return "\n".join(lines) + "\n"


def format_structured(report: MetricsReport) -> str:
    """Key-value lines for one report, full precision."""
    doc = report.to_dict()
    lines = [f"{key}\t{doc[key]!r}" for key in STRUCTURED_FIELDS]
    lines.append(f"reference\t{report.reference}")
    lines.append(f"psnr_formula\t{report.psnr_formula}")
    lines.append("degenerate\t" + (",".join(report.degenerate) or "-"))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Figures


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    return plt


_PNG_META = {"Software": None}  # keep output bytes stable across runs


def save_image_panel(path, panels) -> Path:
    """Grid of grayscale panels, one per (title, Image) pair."""
    plt = _pyplot()
    n = len(panels)
    ncols = 2 if n > 1 else 1
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(4 * ncols, 4 * nrows))
    axes = [axes] if n == 1 else list(axes.ravel())
    for ax in axes[n:]:
        ax.axis("off")
    for ax, (title, img) in zip(axes, panels):
        ax.imshow(img.data, cmap="gray", vmin=0, vmax=255, interpolation="nearest")
        ax.set_title(title)
        ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
    return Path(path)


def save_metrics_chart(path, rows) -> Path:
    """One small bar panel per index comparing the methods."""
    plt = _pyplot()
    fig, axes = plt.subplots(2, 5, figsize=(15, 6))
    labels = [label for label, _ in rows]
    colors = ["#4878d0", "#ee854a", "#6acc64", "#d65f5f"]
    for ax, (key, header) in zip(axes.ravel(), TABLE_COLUMNS):
        values = [getattr(report, key) for _, report in rows]
        plotted = [0.0 if v != v or v in (float("inf"), float("-inf")) else v for v in values]
        ax.bar(range(len(rows)), plotted, color=colors[: len(rows)])
        ax.set_xticks(range(len(rows)))
        ax.set_xticklabels(labels, rotation=20, fontsize=8)
        ax.set_title(header, fontsize=10)
        for x, (v, p) in enumerate(zip(values, plotted)):
            ax.text(x, p, format_value(v, 2), ha="center", va="bottom", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
    return Path(path)


def save_training_curve(path, rmse_history) -> Path:
    """Per-epoch training RMSE line."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    epochs = range(1, len(rmse_history) + 1)
    ax.plot(list(epochs), list(rmse_history), marker="o", markersize=3)
    ax.set_xlabel("epoch")
    ax.set_ylabel("training RMSE (gray levels)")
    ax.set_title("Hybrid training convergence")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
    return Path(path)
