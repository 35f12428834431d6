"""The two canonical figures: error-count trajectories and the phase diagram.

Both functions render only what the CSV contains, return the matplotlib
figure (handy for tests), and write the image file given by the spec.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .reader import SchemaError, read_sweep_csv

CRITICAL_BRANCHING_FACTOR = 1.0

_TRAJECTORY_COLUMNS = ("epsilon", "m_eps", "t", "mean_R", "mean_ci95",
                       "exact_mean", "bound_mean")
_PHASE_COLUMNS = ("epsilon", "m_eps", "t", "mean_R", "zero_frac")


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input CSV, figure kind, output image, scale options."""

    input: str
    kind: str  # "trajectories" | "phase"
    out: str
    log_y: Optional[bool] = None  # None = auto (log when any m_eps > 1)
    dpi: int = 150
    t: Optional[int] = None  # phase diagram step; None = last step in CSV
    image_format: Optional[str] = None  # None = infer from `out` suffix


def _group_by_epsilon(rows: list[dict]) -> dict[float, list[dict]]:
    groups: dict[float, list[dict]] = {}
    for row in rows:
        groups.setdefault(row["epsilon"], []).append(row)
    for eps in groups:
        groups[eps].sort(key=lambda r: r["t"])
    return groups


def _save(fig, spec: FigureSpec) -> Path:
    out = Path(spec.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=spec.dpi, format=spec.image_format, bbox_inches="tight")
    return out


def plot_trajectories(spec: FigureSpec):
    """Mean erroneous count vs step, one curve per epsilon.

    Monte Carlo means are drawn solid with a 95% CI band, the exact means
    dashed, and the subcritical mean bound as a horizontal line where the
    CSV provides one.  The vertical axis switches to log scale when any
    epsilon in the file is supercritical (or on explicit request).
    """
    rows = read_sweep_csv(spec.input, _TRAJECTORY_COLUMNS)
    groups = _group_by_epsilon(rows)

    log_y = spec.log_y
    if log_y is None:
        log_y = any(r["m_eps"] is not None and r["m_eps"] > 1.0 for r in rows)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    colors = plt.cm.viridis([i / max(1, len(groups) - 1) for i in range(len(groups))])

    for color, (eps, series) in zip(colors, sorted(groups.items())):
        ts = [r["t"] for r in series]
        means = [r["mean_R"] for r in series]
        m_eps = series[0]["m_eps"]
        ax.plot(ts, means, color=color, label=f"Mε = {m_eps:g}")
        ci = [r["mean_ci95"] if r["mean_ci95"] is not None else 0.0 for r in series]
        lo = [max(0.0, m - c) for m, c in zip(means, ci) if m is not None]
        hi = [m + c for m, c in zip(means, ci) if m is not None]
        if len(lo) == len(ts):
            ax.fill_between(ts, lo, hi, color=color, alpha=0.15, linewidth=0)
        ax.plot(
            ts,
            [r["exact_mean"] for r in series],
            color=color,
            linestyle="--",
            linewidth=1.0,
        )
        bound = series[0]["bound_mean"]
        if bound is not None:
            ax.axhline(bound, color=color, linestyle=":", linewidth=1.0)

    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel("step t")
    ax.set_ylabel("mean erroneous candidates")
    ax.set_title("Erroneous-count trajectories (solid: MC, dashed: exact, dotted: bound)")
    ax.legend(fontsize=8)
    _save(fig, spec)
    return fig


def plot_phase(spec: FigureSpec):
    """Two panels vs branching factor at a fixed step: mean count (log
    scale) and zero-error fraction, with a marker at the critical point."""
    rows = read_sweep_csv(spec.input, _PHASE_COLUMNS)
    t_final = spec.t if spec.t is not None else max(r["t"] for r in rows)
    at_t = sorted(
        (r for r in rows if r["t"] == t_final), key=lambda r: r["m_eps"]
    )
    if not at_t:
        raise SchemaError(f"{spec.input}: no rows at t={t_final}")

    x = [r["m_eps"] for r in at_t]
    mean = [r["mean_R"] for r in at_t]
    zero = [r["zero_frac"] for r in at_t]

    fig, (ax_mean, ax_zero) = plt.subplots(
        2, 1, figsize=(6.5, 7.0), sharex=True
    )
    ax_mean.plot(x, mean, "o-", color="#1f4e79")
    exact = [r.get("exact_mean") for r in at_t]
    if all(v is not None for v in exact):
        ax_mean.plot(x, exact, "--", color="#1f4e79", linewidth=1.0, label="exact")
        ax_mean.legend(fontsize=8)
    ax_mean.set_yscale("log")
    ax_mean.set_ylabel(f"mean erroneous candidates at t={t_final}")
    ax_mean.set_title("Phase diagram across the critical point")

    ax_zero.plot(x, zero, "s-", color="#a63603")
    ax_zero.set_ylabel(f"fraction with zero errors at t={t_final}")
    ax_zero.set_xlabel("branching factor Mε")
    ax_zero.set_ylim(-0.05, 1.05)

    for ax in (ax_mean, ax_zero):
        ax.axvline(
            CRITICAL_BRANCHING_FACTOR, color="gray", linestyle="--", linewidth=1.0
        )
    _save(fig, spec)
    return fig
