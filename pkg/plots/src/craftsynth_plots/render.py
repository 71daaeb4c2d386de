"""Render figure-style reports from craftsynth experiment CSVs.

Reads only the versioned CSV contract (header line `#schema=v1`); no
physics is recomputed here.  Bound bands for the accuracy plots come
from the bound_lo/bound_hi columns, never from hard-coded formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import csv

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SUPPORTED_SCHEMA = "v1"
KINDS = ("fig1", "fig1_failrate", "fig2", "fig3", "fig5", "whitenoise")


class SchemaError(ValueError):
    pass


class EmptyInput(ValueError):
    pass


@dataclass
class PlotSpec:
    kind: str
    inputs: list
    output: str
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown plot kind {self.kind!r}")
        if not self.inputs:
            raise EmptyInput("no input files given")


def read_rows(path: str) -> list:
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("#schema="):
            raise SchemaError(f"{path}: missing schema header")
        version = first.strip().split("=", 1)[1]
        if version != SUPPORTED_SCHEMA:
            raise SchemaError(f"{path}: unsupported schema {version}")
        rows = list(csv.DictReader(fh))
    if not rows:
        raise EmptyInput(f"{path}: no data rows")
    return rows


def column(rows, name, cast=float):
    try:
        return np.array([cast(r[name]) for r in rows])
    except KeyError:
        raise SchemaError(f"missing column {name!r}")
    except ValueError:
        raise SchemaError(f"column {name!r} is not numeric")


def _truthy(rows, name):
    try:
        return np.array([r[name] == "True" for r in rows])
    except KeyError:
        raise SchemaError(f"missing column {name!r}")


def fig1_band_coords(rows):
    """(eps, lo, hi) arrays per (c, r) cell, straight from the columns."""
    cells = {}
    for r in rows:
        try:
            key = (float(r["c"]), float(r["r"]))
        except KeyError as err:
            raise SchemaError(f"missing column {err}")
        cells.setdefault(key, []).append(r)
    out = {}
    for key, group in sorted(cells.items()):
        eps = column(group, "eps")
        lo = column(group, "bound_lo")
        hi = column(group, "bound_hi")
        order = np.argsort(eps)
        out[key] = (eps[order], lo[order], hi[order])
    return out


def _new_axes(style):
    fig, ax = plt.subplots(figsize=style.get("figsize", (5.0, 3.6)),
                           dpi=style.get("dpi", 130))
    return fig, ax


def _render_fig1(rows, style):
    fig, ax = _new_axes(style)
    bands = fig1_band_coords(rows)
    cmap = plt.get_cmap("viridis")
    keys = sorted(bands)
    for i, key in enumerate(keys):
        eps, lo, hi = bands[key]
        color = cmap(i / max(len(keys) - 1, 1))
        ax.fill_between(eps, lo, hi, alpha=0.18, color=color, linewidth=0)
        group = [r for r in rows
                 if (float(r["c"]), float(r["r"])) == key and r["success"] == "True"]
        if group:
            ax.scatter(column(group, "eps"), column(group, "d_diamond"),
                       s=12, color=color, label=f"c={key[0]:g}, R={int(key[1])}")
    det_eps = column(rows, "eps")
    det = column(rows, "det_achieved")
    order = np.argsort(det_eps)
    ax.plot(det_eps[order], det[order], "k-", lw=0.8, label="unitary synthesis")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("synthesis accuracy eps")
    ax.set_ylabel("remnant channel distance")
    ax.legend(fontsize=7)
    return fig


def _render_fig1_failrate(rows, style):
    cs = sorted({float(r["c"]) for r in rows})
    rs = sorted({float(r["r"]) for r in rows})
    grid = np.full((len(rs), len(cs)), np.nan)
    for i, rv in enumerate(rs):
        for j, cv in enumerate(cs):
            cell = [r for r in rows
                    if float(r["c"]) == cv and float(r["r"]) == rv]
            if cell:
                grid[i, j] = np.mean([r["success"] != "True" for r in cell])
    fig, ax = _new_axes(style)
    im = ax.imshow(grid, origin="lower", aspect="auto", cmap="magma",
                   extent=(min(cs) - 0.5, max(cs) + 0.5,
                           min(rs) - 0.5, max(rs) + 0.5))
    fig.colorbar(im, ax=ax, label="failure rate")
    ax.set_xlabel("shift factor c")
    ax.set_ylabel("radius count R")
    return fig


def ternary_xy(qx, qy, qz):
    """Map simplex points to the plane: q_x, q_y, q_z corners."""
    x = qy + 0.5 * qz
    y = np.sqrt(3.0) / 2.0 * qz
    return x, y


def _render_fig3(rows, style):
    fig, ax = _new_axes(style)
    corners = np.array([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2], [0, 0]])
    ax.plot(corners[:, 0], corners[:, 1], "k-", lw=0.8)
    markers = {"pauli": "o", "depol": "s", "xy": "^", "none": "x"}
    for fam in sorted({r["family"] for r in rows}):
        group = [r for r in rows if r["family"] == fam and r["success"] == "True"]
        if not group:
            continue
        x, y = ternary_xy(column(group, "q_x"), column(group, "q_y"),
                          column(group, "q_z"))
        ax.scatter(x, y, s=14, marker=markers.get(fam, "o"), label=fam,
                   alpha=0.8)
    ax.text(-0.02, -0.04, "q_x", fontsize=8, ha="right")
    ax.text(1.02, -0.04, "q_y", fontsize=8)
    ax.text(0.5, np.sqrt(3) / 2 + 0.02, "q_z", fontsize=8, ha="center")
    ax.set_aspect("equal")
    ax.axis("off")
    ax.legend(fontsize=7, loc="upper right")
    return fig


def _render_fig2(rows, style):
    fig, ax = _new_axes(style)
    ok = _truthy(rows, "success")
    data = [column([r for r, s in zip(rows, ok) if s], "res_crafted"),
            column(rows, "res_uncrafted"),
            column([r for r, s in zip(rows, ok) if s], "d_crafted"),
            column(rows, "d_uncrafted")]
    ax.boxplot(data, tick_labels=["non-Pauli\ncrafted", "non-Pauli\nuncrafted",
                                  "total\ncrafted", "total\nuncrafted"])
    ax.set_yscale("log")
    ax.set_ylabel("channel distance to identity")
    return fig


def _render_fig5(rows, style):
    fig, ax = _new_axes(style)
    keep = [r for r in rows if r["failure"] == ""]
    if not keep:
        raise EmptyInput("no successful trade-off rows")
    acc = column(keep, "final_rate")
    t = column(keep, "tcount_pair_mean")
    ax.scatter(acc, t, s=14, label="feedback-crafted pairs")
    pacc = column(rows, "plain_achieved")
    pt = column(rows, "plain_tcount")
    ax.scatter(pacc, pt, s=14, marker="x", label="plain synthesis")
    span = np.array([min(acc.min(), pacc.min()), max(acc.max(), pacc.max())])
    for slope, ls in ((3.0, ":"), (1.5, "-."), (1.0, "--")):
        ax.plot(span, slope * np.log2(1 / span), ls, lw=0.8, color="gray",
                label=f"slope {slope:g}")
    ax.set_xscale("log")
    ax.set_xlabel("final accuracy")
    ax.set_ylabel("T-count")
    ax.legend(fontsize=7)
    return fig


def _render_whitenoise(rows, style):
    fig, ax = _new_axes(style)
    for eps in sorted({r["eps_coh"] for r in rows}, key=float):
        group = [r for r in rows if r["eps_coh"] == eps]
        layers = column(group, "L")
        dev = column(group, "dev")
        order = np.argsort(layers)
        ax.plot(layers[order], dev[order], "o-", ms=3,
                label=f"eps_coh={float(eps):g}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("layers L")
    ax.set_ylabel("max damping deviation")
    ax.legend(fontsize=7)
    return fig


_RENDERERS = {
    "fig1": _render_fig1,
    "fig1_failrate": _render_fig1_failrate,
    "fig2": _render_fig2,
    "fig3": _render_fig3,
    "fig5": _render_fig5,
    "whitenoise": _render_whitenoise,
}


def render(spec: PlotSpec) -> list:
    """Render the spec to its output path; returns the written paths."""
    rows = []
    for path in spec.inputs:
        rows.extend(read_rows(path))
    fig = _RENDERERS[spec.kind](rows, spec.style)
    fig.savefig(spec.output, metadata={"Software": None})
    plt.close(fig)
    return [spec.output]


def render_array(spec: PlotSpec) -> np.ndarray:
    """Render to an RGBA array (used for deterministic image hashing)."""
    rows = []
    for path in spec.inputs:
        rows.extend(read_rows(path))
    fig = _RENDERERS[spec.kind](rows, spec.style)
    fig.canvas.draw()
    buf = np.asarray(fig.canvas.buffer_rgba()).copy()
    plt.close(fig)
    return buf
