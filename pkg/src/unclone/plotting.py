"""Figure rendering for curve data.

Kept separate from the evaluators so headless use never imports
matplotlib; the CLI renders a figure next to each written CSV.
"""
from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .games import WitnessedCurveRow


def render_curve_figure(rows: Sequence[WitnessedCurveRow], path: str) -> None:
    """Render the four bound curves plus the measured witness markers."""
    ns = [row.n for row in rows]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(ns, [r.classical for r in rows], label="classical", color="tab:red")
    ax.plot(ns, [r.conjugate for r in rows], label="conjugate", color="tab:blue")
    qprf_ns = [r.n for r in rows if 9.0 * 2.0 ** -r.n < 1.0]
    ax.plot(
        qprf_ns,
        [r.qprf for r in rows if 9.0 * 2.0 ** -r.n < 1.0],
        label="qPRF-masked",
        color="tab:green",
    )
    ax.plot(ns, [r.ideal for r in rows], label="ideal", color="tab:gray", ls="--")
    ax.scatter(
        ns,
        [r.measured_value for r in rows],
        label=f"measured ({rows[0].measured_attack})",
        color="tab:blue",
        marker="x",
        zorder=3,
    )
    ax.set_xlabel("message size n")
    ax.set_ylabel("Pr[both adversaries win]")
    ax.set_yscale("log")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Software": "unclone"})
    plt.close(fig)
