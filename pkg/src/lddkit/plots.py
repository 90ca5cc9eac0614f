"""Figure rendering for probe reports (written next to the CSV output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_probe_reports(reports, path: str, title: str = "probe estimates"):
    """Bar chart of event rates with 95% Wilson intervals and the (usually
    vacuous) theoretical floor exp(-theory_exponent) overlaid."""
    fig, ax = plt.subplots(figsize=(max(4.0, 1.2 * len(reports) + 2), 3.6))
    xs = range(len(reports))
    rates = [r.point_estimate for r in reports]
    los = [r.point_estimate - r.wilson_95[0] for r in reports]
    his = [r.wilson_95[1] - r.point_estimate for r in reports]
    ax.bar(xs, rates, color="#4878a8", width=0.6, label="event rate")
    ax.errorbar(xs, rates, yerr=[los, his], fmt="none", ecolor="black",
                capsize=3, lw=1)
    floors = [r.theory_lower_bound for r in reports]
    if any(f > 1e-12 for f in floors):
        ax.plot(xs, floors, "r_", markersize=14, label="theory floor")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([f"{r.probe.kind}\n{_short_target(r.probe)}" for r in reports],
                       fontsize=7)
    ax.set_ylabel("event rate")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def _short_target(probe):
    if probe.kind == "vertex_cluster":
        return str(probe.target[0])
    if len(probe.target) == 1:
        return f"{probe.target[0][0]}-{probe.target[0][1]}"
    return f"{len(probe.target)} edges"


def render_independence(report, path: str):
    """Unconditional vs conditional rate with intervals and the z score."""
    fig, ax = plt.subplots(figsize=(4.2, 3.4))
    entries = [("P(A cut)", report.unconditional)]
    if report.conditional is not None:
        entries.append(("P(A cut | B cut)", report.conditional))
    xs = range(len(entries))
    rates = [r.point_estimate for _, r in entries]
    los = [r.point_estimate - r.wilson_95[0] for _, r in entries]
    his = [r.wilson_95[1] - r.point_estimate for _, r in entries]
    ax.bar(xs, rates, color=["#4878a8", "#a87848"][:len(entries)], width=0.5)
    ax.errorbar(xs, rates, yerr=[los, his], fmt="none", ecolor="black",
                capsize=4, lw=1)
    ax.set_xticks(list(xs))
    ax.set_xticklabels([name for name, _ in entries], fontsize=8)
    ax.set_ylabel("cut rate")
    ax.set_title(f"independence probe, z = {report.z_score:.2f}")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
