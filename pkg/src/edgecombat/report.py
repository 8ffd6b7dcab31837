"""Report rendering: metrics CSVs, summary text, and matplotlib figures.

Every CSV starts with a comment line carrying the tool version and the
scenario hash so outputs are traceable and reruns are byte-comparable.
"""
from __future__ import annotations

import csv
import io
from decimal import Decimal
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .engine import MetricsTimeSeries  # noqa: E402
from .expense import ExpenseReport  # noqa: E402

TOOL_VERSION = "0.1.0"

METRICS_COLUMNS = [
    "t",
    "victim_util",
    "primary_util",
    "latency",
    "link_util",
    "active_bots",
    "expense",
    "la",
    "ra",
]

_CENT = Decimal("0.01")


def _header_comment(scenario_hash: str) -> str:
    return f"# edgecombat v{TOOL_VERSION} scenario={scenario_hash}"


def metrics_csv(ts: MetricsTimeSeries, scenario_hash: str) -> str:
    buf = io.StringIO()
    buf.write(_header_comment(scenario_hash) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(METRICS_COLUMNS)
    for r in ts.rows:
        writer.writerow(
            [
                r.t,
                f"{r.victim_util:.6f}",
                f"{r.primary_util:.6f}",
                f"{r.latency:.6f}",
                f"{r.link_util:.6f}",
                r.active_bots,
                str(r.cumulative_expense.quantize(_CENT)),
                r.la,
                r.ra,
            ]
        )
    return buf.getvalue()


def summary_text(ts: MetricsTimeSeries, scenario_hash: str) -> str:
    s = ts.summary()
    lines = [
        _header_comment(scenario_hash),
        f"ticks:                  {s['ticks']}",
        f"attack waves started:   {s['waves_started']}",
        f"mean victim util:       {s['mean_victim_util']:.4f}",
        f"max victim util:        {s['max_victim_util']:.4f}",
        f"mean primary util:      {s['mean_primary_util']:.4f}",
        f"max primary util:       {s['max_primary_util']:.4f}",
        f"mean benign latency:    {s['mean_latency_s']:.4f} s",
        f"max benign latency:     {s['max_latency_s']:.4f} s",
        f"mean link util:         {s['mean_link_util']:.4f}",
        f"total attacker expense: ${s['total_expense']}",
    ]
    if s["attacker_quit_time_s"] is not None:
        lines.append(f"attacker quit at:       {s['attacker_quit_time_s']} s")
    else:
        lines.append("attacker quit at:       never (campaign completed)")
    return "\n".join(lines) + "\n"


def sweep_csv(results: dict[int, MetricsTimeSeries], scenario_hash: str) -> str:
    buf = io.StringIO()
    buf.write(_header_comment(scenario_hash) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "defenders",
            "mean_primary_util",
            "mean_latency",
            "mean_victim_util",
            "mean_link_util",
            "total_expense",
            "quit_time_s",
        ]
    )
    for count in sorted(results):
        ts = results[count]
        writer.writerow(
            [
                count,
                f"{ts.mean('primary_util'):.6f}",
                f"{ts.mean('latency'):.6f}",
                f"{ts.mean('victim_util'):.6f}",
                f"{ts.mean('link_util'):.6f}",
                str(ts.final_expense.quantize(_CENT)),
                ts.quit_time_s if ts.quit_time_s is not None else "",
            ]
        )
    return buf.getvalue()


def plot_metrics(ts: MetricsTimeSeries, path: Path, title: str = "") -> None:
    """Four-panel time series: primary load, latency, link load, victim load."""
    t = [r.t for r in ts.rows]
    fig, axes = plt.subplots(2, 2, figsize=(11, 7), sharex=True)
    panels = [
        ("primary defender utilization", [r.primary_util for r in ts.rows]),
        ("benign latency (s)", [r.latency for r in ts.rows]),
        ("victim link utilization", [r.link_util for r in ts.rows]),
        ("victim utilization", [r.victim_util for r in ts.rows]),
    ]
    for ax, (label, series) in zip(axes.flat, panels):
        ax.plot(t, series, lw=0.8)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    for ax in axes[1]:
        ax.set_xlabel("time (s)")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_sweep(results: dict[int, MetricsTimeSeries], path: Path) -> None:
    """Overlay primary utilization and latency for each defender count."""
    fig, (ax_util, ax_lat) = plt.subplots(2, 1, figsize=(10, 7), sharex=True)
    for count in sorted(results):
        ts = results[count]
        t = [r.t for r in ts.rows]
        ax_util.plot(t, [r.primary_util for r in ts.rows], lw=0.8,
                     label=f"{count} defender(s)")
        ax_lat.plot(t, [r.latency for r in ts.rows], lw=0.8,
                    label=f"{count} defender(s)")
    ax_util.set_ylabel("primary defender utilization")
    ax_lat.set_ylabel("benign latency (s)")
    ax_lat.set_xlabel("time (s)")
    for ax in (ax_util, ax_lat):
        ax.grid(True, alpha=0.3)
        ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_amplification(report: ExpenseReport, path: Path) -> None:
    """Heatmap of the amplification factor per (defender, vulnerability)."""
    fig, ax = plt.subplots(figsize=(9, 5))
    image = ax.imshow(report.lambdas, aspect="auto", cmap="viridis")
    ax.set_xlabel("vulnerability")
    ax.set_ylabel("defender")
    ax.set_xticks(range(len(report.lambdas[0])))
    ax.set_xticklabels(range(1, len(report.lambdas[0]) + 1))
    ax.set_yticks(range(len(report.lambdas)))
    ax.set_yticklabels(range(1, len(report.lambdas) + 1))
    fig.colorbar(image, ax=ax, label="amplification")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def amplification_table_text(report: ExpenseReport) -> str:
    """Fixed-width amplification table plus the expense summary block."""
    n = len(report.lambdas[0])
    header = "      " + "".join(f"{'C' + str(j + 1):>9}" for j in range(n))
    lines = [header]
    for i, row in enumerate(report.lambdas):
        lines.append(f"D{i + 1:<4} " + "".join(f"{v:9.1f}" for v in row))
    lines.append("")
    i, j = report.max_cell
    lines.append(f"per-active-bot expense: ${report.pabe}")
    lines.append(f"individual expense:     ${report.individual_expense.quantize(_CENT)}")
    lines.append(
        f"max amplification:      {report.max_lambda:.1f}x (defender {i + 1}, "
        f"vulnerability {j + 1})"
    )
    lines.append(f"joint attack expense:   ${report.joint_expense.quantize(_CENT)}")
    return "\n".join(lines) + "\n"
