"""Report rendering: matplotlib figures written next to the delimited output.

Each renderer writes one PNG plus the CSV holding the plotted data, so the
figures can be regenerated or restyled externally.
"""
from __future__ import annotations

import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import conflation, distributions as dists, payoffs as po, simulate
from .scoring import SurvivalConfig

_TABLE_PS = (1e-1, 1e-2, 1e-3, 1e-4)


def render_conflation_report(out_dir: Path, alpha: float = 1.1) -> list[Path]:
    """Pseudo-overestimation tables for the Gaussian and a Pareto, with the
    corrected-probability ratio plotted against the exceedance probability."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    specs = {
        "gaussian": dists.gaussian(),
        "pareto": dists.pareto(alpha=alpha),
    }
    tables = {}
    for name, spec in specs.items():
        rows = conflation.pseudo_table(spec, _TABLE_PS)
        tables[name] = rows
        path = out_dir / f"table_{name}.csv"
        path.write_text(conflation.pseudo_table_csv(rows))
        written.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    for name, rows in tables.items():
        ax.plot([r.p for r in rows], [r.ratio for r in rows], marker="o", label=name)
    ax.set_xscale("log")
    ax.set_xlabel("exceedance probability p")
    ax.set_ylabel("p* / p")
    ax.set_title("De-binarization ratio: thin vs fat tails")
    ax.legend()
    fig.tight_layout()
    fig_path = out_dir / "conflation_ratio.png"
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)
    written.append(fig_path)
    return written


def render_payoff_report(out_dir: Path) -> list[Path]:
    """Named option structures over a price grid."""
    out_dir.mkdir(parents=True, exist_ok=True)
    structures = {
        "christmas_tree": (po.christmas_tree(100.0, 10.0, 20.0), np.linspace(50, 130, 401)),
        "butterfly": (po.butterfly(90.0, 100.0, 110.0), np.linspace(70, 130, 401)),
        "short_volatility": (po.short_volatility(), np.linspace(-3, 3, 401)),
    }
    buf = io.StringIO()
    buf.write("structure,x,payoff\n")
    fig, axes = plt.subplots(1, len(structures), figsize=(4 * len(structures), 3.2))
    for ax, (name, (g, grid)) in zip(np.atleast_1d(axes), structures.items()):
        values = g(grid)
        for x, v in zip(grid, values):
            buf.write(f"{name},{x:.6g},{v:.6g}\n")
        ax.plot(grid, values)
        ax.axhline(0.0, color="grey", lw=0.6)
        ax.set_title(name.replace("_", " "))
        ax.set_xlabel("x")
    np.atleast_1d(axes)[0].set_ylabel("payoff")
    fig.tight_layout()
    csv_path = out_dir / "payoff_curves.csv"
    csv_path.write_text(buf.getvalue())
    fig_path = out_dir / "payoff_structures.png"
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)
    return [csv_path, fig_path]


def render_simulation_report(
    out_dir: Path, seed: int = 7, horizon: int = 500, paths: int = 20
) -> list[Path]:
    """Binary vs continuous payoff streams under a thin and a fat generator.

    The binary track looks the same under both; the continuous track under
    the Pareto lives on a different scale. Generator settings are
    illustrative defaults.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    generators = {
        "gaussian": dists.gaussian(),
        "pareto_1.16": dists.pareto(alpha=1.16),
    }
    hit_p = 0.1
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
    csv_buf = io.StringIO()
    csv_buf.write("generator,payoff_id,path,period,value\n")
    for ax, (gname, gen) in zip(axes, generators.items()):
        k = dists.quantile_threshold(gen, hit_p)
        cfg = simulate.SimulationConfig(
            generator=gen,
            payoffs=(("binary", po.binary(k)), ("linear", po.linear())),
            horizon=horizon,
            paths=paths,
            seed=seed,
            survival=None,
        )
        result = simulate.run(cfg, keep_paths=True)
        for pname, cum in result.cumulative.items():
            for i in range(min(paths, 10)):
                ax.plot(cum[i], lw=0.7, alpha=0.7,
                        color="tab:blue" if pname == "binary" else "tab:red")
                for t in range(horizon):
                    csv_buf.write(f"{gname},{pname},{i},{t + 1},{cum[i, t]:.6g}\n")
        ax.set_title(f"{gname} (binary blue, continuous red)")
        ax.set_xlabel("period")
    axes[0].set_ylabel("cumulative payoff")
    fig.tight_layout()
    csv_path = out_dir / "simulation_paths.csv"
    csv_path.write_text(csv_buf.getvalue())
    fig_path = out_dir / "simulation_paths.png"
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)
    return [csv_path, fig_path]


def render_all(out_dir: Path, seed: int = 7) -> list[Path]:
    written = []
    written += render_conflation_report(out_dir)
    written += render_payoff_report(out_dir)
    written += render_simulation_report(out_dir, seed=seed)
    return written
