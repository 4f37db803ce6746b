"""Render grushin3d CSV exports into figures.

Three figure kinds are supported, one per documented export schema:

  regimes  - one or more trajectory exports (t,x,y,z,u,v,w0,H,K), drawn as
             3D curves; intended for the three qualitative geodesic regimes.
  ball     - a metric-ball boundary export (w0,t,rho,z); the (rho, z)
             polyline is revolved around the vertical axis.
  cutlocus - a geodesic-fan export (w0,phi,t,x,y,z); curves grouped by phi
             meeting on the cut line.

This package is a pure view of the exported data: numeric columns are never
recomputed or modified beyond axis scaling.  Schema mismatches exit nonzero.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field
from typing import List, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SCHEMAS = {
    "regimes": ["t", "x", "y", "z", "u", "v", "w0", "H", "K"],
    "ball": ["w0", "t", "rho", "z"],
    "cutlocus": ["w0", "phi", "t", "x", "y", "z"],
}


class RenderError(Exception):
    """Input files do not match the expected export schema."""


@dataclass
class PlotJob:
    kind: str
    inputs: List[str]
    output: str
    title: str = ""
    revolve_steps: int = 96

    def __post_init__(self):
        if self.kind not in SCHEMAS:
            raise RenderError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise RenderError("at least one input export is required")
        if self.kind in ("ball", "cutlocus") and len(self.inputs) != 1:
            raise RenderError(f"figure kind {self.kind!r} takes exactly one input")


def load_export(path: str, kind: str) -> dict:
    """Read one CSV export and check its header against the figure kind."""
    expected = SCHEMAS[kind]
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != expected:
                raise RenderError(
                    f"{path}: header {header} does not match the "
                    f"{kind!r} schema {expected}")
            rows = []
            for row in reader:
                if not row:
                    continue
                if len(row) != len(expected):
                    raise RenderError(f"{path}: ragged row of length {len(row)}")
                rows.append([float(v) for v in row])
    except OSError as exc:
        raise RenderError(f"{path}: {exc}") from exc
    except ValueError as exc:
        raise RenderError(f"{path}: non-numeric cell: {exc}") from exc
    if not rows:
        raise RenderError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    return {name: data[:, i] for i, name in enumerate(expected)}


def _render_regimes(job: PlotJob):
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d")
    curves = []
    for path in job.inputs:
        cols = load_export(path, "regimes")
        ax.plot(cols["x"], cols["y"], cols["z"], lw=1.4, label=path.split("/")[-1])
        curves.append(cols)
    ax.scatter([c["x"][0] for c in curves], [c["y"][0] for c in curves],
               [c["z"][0] for c in curves], color="k", s=18)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    ax.legend(fontsize=7)
    return fig, {"curves": curves}


def _render_ball(job: PlotJob):
    cols = load_export(job.inputs[0], "ball")
    rho, z = cols["rho"], cols["z"]
    theta = np.linspace(0.0, 2.0 * math.pi, job.revolve_steps)
    X = np.outer(rho, np.cos(theta))
    Y = np.outer(rho, np.sin(theta))
    Z = np.repeat(z[:, None], job.revolve_steps, axis=1)
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d")
    ax.plot_surface(X, Y, Z, rstride=1, cstride=4, alpha=0.65,
                    linewidth=0.1, cmap="viridis")
    ax.plot(rho, np.zeros_like(rho), z, color="k", lw=1.2)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    return fig, {"silhouette_rho": rho, "silhouette_z": z}


def _render_cutlocus(job: PlotJob):
    cols = load_export(job.inputs[0], "cutlocus")
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d")
    phis = np.unique(cols["phi"])
    for ph in phis:
        sel = cols["phi"] == ph
        ax.plot(cols["x"][sel], cols["y"][sel], cols["z"][sel], lw=0.9)
    # meeting point of the fan: every curve's last sample coincides
    ends = np.array([[cols[k][cols["phi"] == ph][-1] for k in ("x", "y", "z")]
                     for ph in phis])
    ax.scatter(ends[:, 0], ends[:, 1], ends[:, 2], color="r", s=22)
    zs = np.linspace(cols["z"].min(), cols["z"].max(), 8)
    ax.plot(np.full_like(zs, ends[0, 0]), np.full_like(zs, ends[0, 1]), zs,
            color="r", lw=1.0, ls="--")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    return fig, {"n_fans": len(phis), "meeting_points": ends}


def render(job: PlotJob) -> dict:
    """Render one figure; returns a summary with the arrays actually drawn."""
    if job.kind == "regimes":
        fig, info = _render_regimes(job)
    elif job.kind == "ball":
        fig, info = _render_ball(job)
    else:
        fig, info = _render_cutlocus(job)
    if job.title:
        fig.suptitle(job.title)
    fig.savefig(job.output, dpi=130)
    plt.close(fig)
    info["output"] = job.output
    return info


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="grushin3d-render",
        description="Render grushin3d CSV exports into figures")
    parser.add_argument("--kind", choices=sorted(SCHEMAS), required=True)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input export file(s)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)
    try:
        render(PlotJob(kind=args.kind, inputs=list(args.inputs),
                       output=args.out, title=args.title))
    except RenderError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
