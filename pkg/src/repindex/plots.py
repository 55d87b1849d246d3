"""Figure rendering for cumulative reputation profiles.

Charts are written next to the delimited output by the CLI report path;
the Agg backend keeps rendering headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .trend import CumulativeProfile


def render_cumulative(profile: CumulativeProfile, path: Path) -> None:
    """Plot the cumulative reputation score against time and save it."""
    dates = [day for day, _ in profile.prefix]
    values = [value for _, value in profile.prefix]

    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(dates, values, lw=1.2, color="#1f5fa8")
    ax.axhline(0.0, color="0.6", lw=0.8, ls="--")
    title = f"Cumulative reputation: {profile.target}"
    if profile.trend:
        title += f" ({profile.trend} trending)"
    ax.set_title(title)
    ax.set_xlabel("date")
    ax.set_ylabel("cumulative score")
    ax.grid(True, alpha=0.3)
    fig.autofmt_xdate()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
