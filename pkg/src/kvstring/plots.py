"""Figure rendering for the CLI report paths (PNG next to the CSV/JSON)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def eigenvalue_map(rows, k0: int, path) -> None:
    """Scatter of the eigenvalues in the complex plane, branch split marked."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    re = np.array([r["re_lambda"] for r in rows])
    im = np.array([r["im_lambda"] for r in rows])
    over = np.array([r["k"] >= k0 for r in rows])
    ax.scatter(re[~over], im[~over], s=14, label="underdamped pairs")
    ax.scatter(re[over], im[over], s=14, marker="x", label="overdamped pairs")
    ax.set_xlabel("Re(lambda)")
    ax.set_ylabel("Im(lambda)")
    ax.set_xscale("symlog")
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def trajectory_norms(traj, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(traj.times, traj.h_norms, lw=1.2, label=f"|X(t)| ({traj.solver})")
    ax.set_xlabel("t")
    ax.set_ylabel("energy norm")
    ax.set_yscale("log" if np.all(traj.h_norms[traj.h_norms > 0]) else "linear")
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def solver_comparison(times, norm_spectral, norm_fd, rel_diff, path) -> None:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.0, 5.5), sharex=True)
    ax1.plot(times, norm_spectral, lw=1.2, label="spectral")
    ax1.plot(times, norm_fd, lw=1.0, ls="--", label="finite difference")
    ax1.set_ylabel("energy norm")
    ax1.legend(loc="best", fontsize=8)
    ax1.grid(alpha=0.3)
    ax2.plot(times, rel_diff, lw=1.0)
    ax2.set_xlabel("t")
    ax2.set_ylabel("relative discrepancy")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def verification_bounds(traj, report, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(traj.times, traj.h_norms, lw=1.3, label="|X(t)|")
    ax.plot(traj.times, report.uniform_bounds, lw=1.0, ls="--", label="uniform bound")
    ax.plot(traj.times, report.l2_bounds, lw=1.0, ls=":", label="L2 bound")
    ax.set_xlabel("t")
    ax.set_ylabel("energy norm")
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def suite_margins(ratios_uniform, ratios_l2, path) -> None:
    """Worst norm/bound ratio per scenario for both estimates."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    idx = np.arange(len(ratios_uniform))
    ax.plot(idx, ratios_uniform, ".", ms=5, label="uniform estimate")
    ax.plot(idx, ratios_l2, ".", ms=5, label="L2 estimate")
    ax.axhline(1.0, color="k", lw=0.8)
    ax.set_xlabel("scenario")
    ax.set_ylabel("worst norm/bound ratio")
    ax.set_ylim(0.0, 1.1)
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
