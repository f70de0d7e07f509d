"""Figure rendering for the report paths (file output only, Agg backend)."""

from __future__ import annotations


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_points(rows: list[dict], path: str, title: str) -> None:
    """Scatter of the lifted point set (k/n, {k*alpha})."""
    plt = _pyplot()
    xs = [float(r["k_over_n"]) for r in rows]
    ys = [float(r["x_k"]) for r in rows]
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(xs, ys, s=18, color="black")
    for r in rows:
        if r["rank"] == 1:
            ax.annotate("min", (float(r["k_over_n"]), float(r["x_k"])),
                        textcoords="offset points", xytext=(4, 4), fontsize=8)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_xlabel("k / n")
    ax.set_ylabel("{k alpha}")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_scan(rows: list[dict], path: str, title: str) -> None:
    """Longest cycle length and cycle count across a range of n."""
    plt = _pyplot()
    ns = [r["n"] for r in rows]
    longest = [r["longest"] for r in rows]
    counts = [r["cycle_count"] for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(ns, longest, "o-", color="black", label="longest cycle")
    ax.plot(ns, counts, "s--", color="gray", label="cycle count")
    ax.set_xlabel("n")
    ax.set_ylabel("length / count")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
