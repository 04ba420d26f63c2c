"""Optional figures for CLI reports (matplotlib, non-interactive backend)."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .recurrence import _distances, _float_matrix  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 3.6),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
}


def _save(fig, path: str) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fig.tight_layout()
    # fixed metadata keeps repeated runs byte-identical
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_returns(A, direction, eps: float, steps: int, path: str) -> str:
    """Distance of A^m γ/‖A^m γ‖ from γ against m, with the ε threshold."""
    d = _distances(_float_matrix(A), np.asarray(direction, dtype=float), steps)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        m = np.arange(1, steps + 1)
        ax.semilogy(m, np.maximum(d, 1e-17), ".", ms=3, color="C0", label="distance")
        ax.axhline(eps, color="C3", lw=1, ls="--", label=f"ε = {eps:g}")
        ax.set_xlabel("m")
        ax.set_ylabel(r"$\|A^m\gamma/\|A^m\gamma\| - \gamma\|$")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_roots(coeffs, p: int, witnesses, path: str) -> str:
    """Roots of an integer polynomial with the circles |z| = p^{ℓ/m} of the witnesses."""
    roots = np.roots(list(reversed([float(c) for c in coeffs]))) if len(coeffs) > 1 else np.array([])
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.2, 4.2))
        ax.plot(roots.real, roots.imag, "o", color="C0", label="roots")
        th = np.linspace(0, 2 * np.pi, 400)
        radii = {1.0} if p == 0 else {float(p) ** (l / m) for m, l in witnesses} | {1.0}
        for r in sorted(radii):
            ax.plot(r * np.cos(th), r * np.sin(th), lw=0.8, color="0.6")
        ax.set_aspect("equal")
        ax.set_xlabel("Re")
        ax.set_ylabel("Im")
        ax.legend(frameon=False, loc="upper right")
        return _save(fig, path)


def plot_residuals(valuations, path: str) -> str:
    """Residual valuation per Newton step."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(range(len(valuations)), valuations, "o-", color="C2")
        ax.set_xlabel("iteration")
        ax.set_ylabel("v(P(b))")
        return _save(fig, path)
