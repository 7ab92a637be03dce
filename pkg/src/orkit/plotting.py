"""Figure rendering for the report pipeline.

One PNG per report: the certified lower/upper complexity ratio and the
normalized weight of B against n, one series per family.  matplotlib is
imported lazily so that CLI commands that never plot stay fast.
"""

from __future__ import annotations


def render_report_figure(rows, path) -> None:
    """Render ratioLB and densityB versus n for the given report rows."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    families: dict[str, list] = {}
    for r in rows:
        families.setdefault(r.family, []).append(r)

    fig, (ax_ratio, ax_density) = plt.subplots(
        2, 1, figsize=(6.4, 6.4), sharex=True, constrained_layout=True
    )
    for name, group in families.items():
        xs = [r.n for r in group]
        ax_ratio.plot(xs, [float(r.ratio_lb) for r in group], marker="o", label=name)
        ax_density.plot(xs, [r.density_b for r in group], marker="s", label=name)
    ax_ratio.axhline(1.0, color="gray", linestyle="--", linewidth=1)
    ax_ratio.set_ylabel("orLower / orUpper")
    ax_ratio.set_xscale("log")
    ax_ratio.legend()
    ax_density.set_ylabel("weight(B) / n^(4/3)")
    ax_density.set_xlabel("n")
    ax_density.legend()
    fig.savefig(path, dpi=150)
    plt.close(fig)
