"""Figure rendering for the CLI report path (written to files, never shown)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_step_figure",
    "save_trajectory_figure",
    "save_poles_figure",
    "save_bode_figure",
]


def save_step_figure(series, path: str) -> None:
    """series: mapping of label -> TimeSeries; all share the input curve."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    first = next(iter(series.values()))
    ax.plot(first.t, first.w, "k--", lw=1, label="w")
    for label, ts in series.items():
        ax.plot(ts.t, ts.y, lw=1.2, label=label)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("y")
    ax.set_title("Unit-step response")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_trajectory_figure(traj, eq, classification: str, path: str) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 5))
    ax.plot(traj.x1, traj.x2, lw=0.9)
    ax.plot([traj.x1[0]], [traj.x2[0]], "ko", ms=4, label="start")
    ax.plot([eq.x1_star], [eq.x2_star], "r*", ms=10, label="equilibrium")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title(f"State trajectory ({classification})")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_poles_figure(report, path: str) -> None:
    """v-plane root map with the stability sector boundary shaded."""
    fig, ax = plt.subplots(figsize=(5.5, 5))
    roots = report.v_roots
    ax.plot(roots.real, roots.imag, "x", ms=7, label="v-roots")
    lim = 1.2 * max(1.0, float(np.max(np.abs(roots))))
    half = report.base_order * math.pi / 2
    wedge = np.array([0, lim * math.cos(half), lim * math.cos(half), 0])
    wy = np.array([0, lim * math.sin(half), -lim * math.sin(half), 0])
    ax.fill(wedge, wy, color="red", alpha=0.25, label="unstable sector")
    ax.axhline(0, color="gray", lw=0.5)
    ax.axvline(0, color="gray", lw=0.5)
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_aspect("equal")
    ax.set_xlabel("Re v")
    ax.set_ylabel("Im v")
    ax.set_title(f"v = s^{report.base_order:g} roots: {report.verdict}")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_bode_figure(fr, path: str) -> None:
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    ax1.semilogx(fr.omega, fr.magnitude_db, lw=1.2)
    ax1.set_ylabel("magnitude [dB]")
    ax1.grid(True, which="both", alpha=0.3)
    ax1.set_title(f"Frequency response ({fr.which})")
    ax2.semilogx(fr.omega, fr.phase_deg, lw=1.2)
    ax2.set_ylabel("phase [deg]")
    ax2.set_xlabel("omega [rad/s]")
    ax2.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
