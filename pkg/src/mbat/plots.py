"""Render simulation reports to figure files (PNG/PDF/SVG by extension)."""

from __future__ import annotations

from matplotlib.figure import Figure

from .sims import CapacityReport, DriftReport


def save_capacity_figure(report: CapacityReport, path: str) -> None:
    """Success fraction with its confidence interval, plus the two dot levels."""
    p = report.params
    fig = Figure(figsize=(7.0, 3.2))
    ax_frac, ax_dots = fig.subplots(1, 2)

    ax_frac.errorbar([0.0], [report.success_fraction],
                     yerr=[report.confidence_halfwidth], fmt="o", capsize=5)
    ax_frac.set_xlim(-1, 1)
    ax_frac.set_ylim(0, 1.05)
    ax_frac.set_xticks([])
    ax_frac.set_ylabel("success fraction")
    ax_frac.set_title(f"n={p.dimension} S={p.members} D={p.distractors}")
    ax_frac.grid(True, alpha=0.3)

    labels = ["min member"]
    values = [report.mean_min_member_dot]
    if report.mean_max_distractor_dot is not None:
        labels.append("max distractor")
        values.append(report.mean_max_distractor_dot)
    ax_dots.bar(labels, values, color=["tab:blue", "tab:orange"][: len(labels)])
    ax_dots.set_ylabel("mean dot with bundle")
    ax_dots.set_title(f"{p.trials} trials, {p.entry_kind}")
    ax_dots.grid(True, axis="y", alpha=0.3)

    fig.tight_layout()
    fig.savefig(path, dpi=150)


def save_drift_figure(report: DriftReport, path: str) -> None:
    """Geometric-mean norm ratio by chain depth with the min/max envelope."""
    p = report.params
    fig = Figure(figsize=(6.0, 3.6))
    ax = fig.subplots()
    depths = list(report.depths)
    ax.plot(depths, report.geomean_ratios, marker="o", label="geometric mean")
    ax.fill_between(depths, report.min_ratios, report.max_ratios,
                    alpha=0.25, label="min/max over trials")
    lo, hi = min(report.min_ratios), max(report.max_ratios)
    if lo > 0 and hi / lo > 10:
        ax.set_yscale("log")
    ax.set_xlabel("chain depth")
    ax.set_ylabel("norm ratio")
    ax.set_title(f"{p.matrix_kind}, n={p.dimension}, {p.trials} trials")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
