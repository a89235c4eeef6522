"""Deterministic figure rendering and delimited text output.

Figures are drawn with the object-oriented matplotlib API (no pyplot state)
into SVG with a fixed hash salt and no date stamp, so identical inputs give
identical bytes.
"""

from __future__ import annotations

import io
import json
import math

import matplotlib

matplotlib.use("Agg")

from matplotlib.figure import Figure  # noqa: E402
from matplotlib.patches import Circle, Polygon  # noqa: E402

import numpy as np  # noqa: E402

from .regions import OMEGA_GAP, STOLZ_CLOSURE, RegionDescriptor, boundary_points, region_for  # noqa: E402
from .rk_condition import RKParams, torus_constant, torus_exponent  # noqa: E402

FIGURE_CASES = {
    1: RKParams(0.25, 0.25, 2.0),
    2: RKParams(0.5, 0.5, 2.0),
    3: RKParams(0.75, 0.5, 2.0),
}

FIG_PIXELS = 800
FIG_DPI = 72
LIMIT = 1.05
TINT = "#c8d3e6"
BLUE = "#1f4fa0"
CYAN = "#00bcd4"
FIGURE_POINTS = 720

_SVG_RC = {"svg.hashsalt": "rkcond", "svg.fonttype": "none", "path.simplify": False}


def _svg_bytes(fig: Figure) -> bytes:
    buf = io.BytesIO()
    with matplotlib.rc_context(_SVG_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    return buf.getvalue()


def _square_axes(fig: Figure):
    ax = fig.add_axes((0, 0, 1, 1))
    ax.set_xlim(-LIMIT, LIMIT)
    ax.set_ylim(-LIMIT, LIMIT)
    ax.set_aspect("equal")
    ax.set_axis_off()
    return ax


def _xy(points) -> np.ndarray:
    z = np.asarray(points, dtype=np.complex128)
    return np.column_stack([z.real, z.imag])


def figure_layers(params: RKParams, points: int = FIGURE_POINTS, workers: int = 1) -> dict:
    """Polylines making up a region figure.

    ``admissible`` is the white region: the radial-gap set when ``beta < 1`` and
    ``alpha + beta != 1``, the Stolz closure when ``alpha + beta = 1``, the whole
    disk otherwise.  ``stolz_border`` is present when ``alpha + beta > 1``.
    """
    region = region_for(params)
    layers = {"region": region}
    if params.beta >= 1:
        layers["admissible"] = boundary_points(region, points)
        return layers
    if region.variant == STOLZ_CLOSURE and params.alpha + params.beta > 1:
        gap = RegionDescriptor(OMEGA_GAP, q=1.0 / torus_constant(params), a=torus_exponent(params))
        layers["admissible"] = boundary_points(gap, points)
        layers["stolz_border"] = boundary_points(region, points, workers=workers)
    else:
        layers["admissible"] = boundary_points(region, points, workers=workers)
    return layers


def render_region_svg(params: RKParams, points: int = FIGURE_POINTS, workers: int = 1) -> bytes:
    layers = figure_layers(params, points, workers)
    fig = Figure(figsize=(FIG_PIXELS / FIG_DPI, FIG_PIXELS / FIG_DPI), dpi=FIG_DPI)
    ax = _square_axes(fig)
    ax.add_patch(Circle((0, 0), 1.0, facecolor=TINT, edgecolor="none", antialiased=False))
    ax.add_patch(Polygon(_xy(layers["admissible"]), closed=True, facecolor="white",
                         edgecolor="none", antialiased=False))
    ax.add_patch(Circle((0, 0), 1.0, fill=False, edgecolor=BLUE, linewidth=1.5))
    if "stolz_border" in layers:
        xy = _xy(layers["stolz_border"])
        ax.add_patch(Polygon(xy, closed=True, fill=False, edgecolor=CYAN, linewidth=1.5))
    return _svg_bytes(fig)


def render_powers_svg(n_values, power_norms, diff_norms) -> bytes:
    """Log-log plot of ``||T^n||`` and ``||T^{n+1} - T^n||``."""
    fig = Figure(figsize=(FIG_PIXELS / FIG_DPI, 0.75 * FIG_PIXELS / FIG_DPI), dpi=FIG_DPI)
    ax = fig.add_subplot(1, 1, 1)
    n = np.asarray(n_values, dtype=float)
    for vals, colour, label in ((power_norms, BLUE, "||T^n||"), (diff_norms, CYAN, "||T^(n+1) - T^n||")):
        v = np.asarray(vals, dtype=float)
        keep = v > 0
        if keep.any():
            ax.loglog(n[keep], v[keep], color=colour, linewidth=1.2, label=label)
    ax.set_xlabel("n")
    ax.grid(True, which="major", linewidth=0.4)
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    return _svg_bytes(fig)


def fmt(x: float) -> str:
    return f"{x:.17g}"


def boundary_csv(points) -> str:
    """``theta,re,im`` rows; ``theta`` is the polar angle in ``[0, 2 pi)``."""
    lines = ["theta,re,im"]
    for z in points:
        z = complex(z)
        theta = math.atan2(z.imag, z.real) % (2 * math.pi)
        lines.append(f"{fmt(theta)},{fmt(z.real)},{fmt(z.imag)}")
    return "\n".join(lines) + "\n"


def to_jsonable(obj):
    """Complex numbers become ``[re, im]``, non-finite floats become strings, arrays become lists."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(float(obj.real)), to_jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(doc) -> str:
    # json emits the shortest repr that round-trips each double
    return json.dumps(to_jsonable(doc), indent=2, ensure_ascii=False) + "\n"
