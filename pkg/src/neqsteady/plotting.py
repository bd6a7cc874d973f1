"""Render effective-temperature sweeps to image files (non-interactive backend)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

TITLES = {"a": "(a) full, $g_L = g_R$", "b": "(b) full, $g_R = 0.8 g_L$", "c": "(c) RWA, $g_L = g_R$"}


def render_fig2(rows: Sequence[Sequence[float]], panel: str, path: str | Path) -> Path:
    """Plot ``Teff_L`` (blue) and ``Teff_R`` (red) against ``delta``, one line pair per ``g``."""
    data = np.asarray(rows, dtype=float)
    couplings = sorted(set(data[:, 1]))
    fig, ax = plt.subplots(figsize=(4.5, 3.5), constrained_layout=True)
    shades = np.linspace(0.35, 1.0, len(couplings))
    for shade, g in zip(shades, couplings):
        sel = data[:, 1] == g
        ax.plot(data[sel, 0], data[sel, 2], color=plt.cm.Blues(shade), lw=1.2, label=f"g={g:g}")
        ax.plot(data[sel, 0], data[sel, 3], color=plt.cm.Reds(shade), lw=1.2)
    ax.set_xlabel(r"$\Delta = \omega_L - \omega_R$")
    ax.set_ylabel(r"$T^{\mathrm{eff}}$")
    ax.set_title(TITLES.get(panel, panel))
    ax.legend(fontsize="small", frameon=False)
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
