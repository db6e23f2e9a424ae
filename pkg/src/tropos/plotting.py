"""SVG rendering of planar tropical regions and circle sets."""

from __future__ import annotations

import io
import math
from fractions import Fraction

import matplotlib
from matplotlib.figure import Figure
from matplotlib.patches import Arc, Circle, Polygon

from .polyhedra import EQ
from .sphere import SphericalSet
from .tropical import TropicalRegion

VIEW = Fraction(7, 2)
SPHERE_RADIUS = 2.0
REGION = "#1f4e9c"
FILL_ALPHA = 0.25


class RenderError(ValueError):
    pass


def _axes(title: str | None):
    fig = Figure(figsize=(4, 4))
    ax = fig.add_axes((0.05, 0.05, 0.9, 0.9))
    v = float(VIEW)
    ax.set_xlim(-v, v)
    ax.set_ylim(-v, v)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.plot([-v, v], [0, 0], color="0.5", lw=0.8, ls="--")
    ax.plot([0, 0], [-v, v], color="0.5", lw=0.8, ls="--")
    if title:
        ax.set_title(title, fontsize=9)
    return fig, ax


def _to_svg(fig) -> str:
    buf = io.StringIO()
    with matplotlib.rc_context({"svg.hashsalt": "tropos", "svg.fonttype": "none"}):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def _draw_region(ax, R: TropicalRegion):
    for cell in R.cells:
        P = cell.polyhedron
        if P.is_empty():
            continue
        pts = [(float(x), float(y)) for x, y in P.vertices_2d(VIEW)]
        dim = P.dimension()
        if dim == 2 and len(pts) >= 3:
            ax.add_patch(Polygon(pts, closed=True, facecolor=REGION, alpha=FILL_ALPHA, edgecolor="none"))
        elif dim >= 1 and len(pts) >= 2:
            (x0, y0), (x1, y1) = pts[0], pts[-1]
            ax.plot([x0, x1], [y0, y1], color=REGION, lw=1.6, solid_capstyle="butt")
        elif pts:
            ax.plot([pts[0][0]], [pts[0][1]], "o", color=REGION, ms=4)


def _draw_region_1d(ax, R: TropicalRegion):
    v = float(VIEW)
    for cell in R.cells:
        P = cell.polyhedron
        if P.is_empty():
            continue
        lo, hi = -v, v
        for c in P.constraints:
            (a,), b = c.a, float(c.b)
            if c.kind == EQ:
                lo = hi = b / a
            elif a > 0:
                lo = max(lo, b / a)
            else:
                hi = min(hi, b / a)
        if lo == hi:
            ax.plot([lo], [0], "o", color=REGION, ms=4)
        else:
            ax.plot([lo, hi], [0, 0], color=REGION, lw=2)


def _angle(d) -> float:
    return math.degrees(math.atan2(float(d[1]), float(d[0])))


def _on_circle(d):
    x, y = float(d[0]), float(d[1])
    r = math.hypot(x, y)
    return SPHERE_RADIUS * x / r, SPHERE_RADIUS * y / r


def _dot(ax, d, closed: bool):
    x, y = _on_circle(d)
    ax.add_patch(Circle((x, y), 0.09, facecolor=REGION if closed else "white",
                        edgecolor=REGION, lw=1.2, zorder=3))


def _draw_sphere(ax, S: SphericalSet):
    ax.add_patch(Circle((0, 0), SPHERE_RADIUS, fill=False, edgecolor="0.75", lw=0.6, ls=":"))
    if S.n == 1:
        pos, neg = S.canonical()
        for d, inside in (((1, 0), pos), ((-1, 0), neg)):
            if inside:
                _dot(ax, d, True)
        return
    full, points, arcs = S.components_2d()
    if full:
        ax.add_patch(Circle((0, 0), SPHERE_RADIUS, fill=False, edgecolor=REGION, lw=2))
        return
    for s, e, sc, ec in arcs:
        t1, t2 = _angle(s), _angle(e)
        if t2 <= t1:
            t2 += 360
        ax.add_patch(Arc((0, 0), 2 * SPHERE_RADIUS, 2 * SPHERE_RADIUS, theta1=t1, theta2=t2,
                         edgecolor=REGION, lw=2))
        _dot(ax, s, sc)
        _dot(ax, e, ec)
    for p in points:
        _dot(ax, p, True)


def render_svg(obj, title: str | None = None) -> str:
    """SVG text for a region or circle set with ``n <= 2``; deterministic for fixed input."""
    if obj.n > 2:
        raise RenderError(f"cannot draw in dimension {obj.n}; only n <= 2 is supported")
    fig, ax = _axes(title)
    if isinstance(obj, TropicalRegion):
        (_draw_region if obj.n == 2 else _draw_region_1d)(ax, obj)
    elif isinstance(obj, SphericalSet):
        _draw_sphere(ax, obj)
    else:
        raise TypeError(f"cannot render {type(obj).__name__}")
    return _to_svg(fig)


def write_svg(obj, path, title: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_svg(obj, title))
