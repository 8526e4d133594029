"""Association diagnostics: weights, support curves, demo data, plots.

Per-observation weights W_i average to the normalized dependence
estimate, so large |W_i| marks the observations that carry the
association; per-component weights do the same for one eigenfunction
pair.  For categorical data the weights collapse onto cells.  The SVG
emitter is fully deterministic: a fixed sample renders to identical
bytes on every run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from ._util import stable_sum
from .dist import empirical_dist
from .estimate import (DegenerateMarginError, PairedSample, _cell_table,
                       _is_constant, _margin_eigensystem)
from .kernel import population_kernel, sample_kernel

__all__ = [
    "AssociationWeights",
    "weights_overall",
    "weights_component",
    "frechet_curves",
    "gen_demo_data",
    "lag_pairs",
    "render_scatter_svg",
    "render_scatter_fig",
    "write_weights_csv",
]


@dataclass(frozen=True)
class AssociationWeights:
    """Weights whose mean (observations) or sum (cells) equals the
    association measure they decompose.

    kind        : "overall" or "component"
    component   : the (k, l) pair for component weights, else None
    per_cell    : values has shape (I, J) over the support grid
                  instead of one entry per observation
    values      : the weights
    normalizer  : sqrt of the product of marginal kappa estimates
    target      : the value the weights reproduce (rho_star or rho_kl)
    x, y        : observation coordinates, or cell supports per axis
    gridlines_x : eigenfunction zero crossings on the x axis
                  (component weights only), likewise gridlines_y
    """

    kind: str
    component: tuple[int, int] | None
    per_cell: bool
    values: np.ndarray
    normalizer: float
    target: float
    x: np.ndarray
    y: np.ndarray
    x_labels: tuple[str, ...] | None = None
    y_labels: tuple[str, ...] | None = None
    gridlines_x: tuple[float, ...] = ()
    gridlines_y: tuple[float, ...] = ()


def _require_nonconstant(s: PairedSample):
    if _is_constant(s.x) or _is_constant(s.y):
        raise DegenerateMarginError("weights undefined for constant margin")


def weights_overall(s: PairedSample, cells: bool = False) -> AssociationWeights:
    """Per-observation (or per-cell) share of the dependence estimate.

    W_i is the i-th row average of the elementwise kernel product over
    the normalizer, so the W_i average exactly to the normalized
    dependence estimate.  With cells=True the weights are aggregated
    onto the support grid, where they sum to the same value.
    """
    _require_nonconstant(s)
    h1 = sample_kernel(s.x, "v_centered").matrix
    h2 = sample_kernel(s.y, "v_centered").matrix
    n = s.n
    norm = math.sqrt((stable_sum(h1 * h1) / (n * n)) * (stable_sum(h2 * h2) / (n * n)))
    target = float(stable_sum(h1 * h2) / (n * n) / norm)
    if not cells:
        values = stable_sum(h1 * h2, axis=1) / n / norm
        return AssociationWeights("overall", None, False, values, norm, target,
                                  s.x, s.y, s.x_labels, s.y_labels)
    dx, dy = empirical_dist(s.x), empirical_dist(s.y)
    table = _cell_table(s, np.searchsorted(dx.support, s.x),
                        np.searchsorted(dy.support, s.y), dx.size, dy.size)
    k1 = population_kernel(dx).matrix
    k2 = population_kernel(dy).matrix
    values = table * (k1 @ table @ k2) / norm
    return AssociationWeights("overall", None, True, values, norm, target,
                              dx.support, dy.support, s.x_labels, s.y_labels)


def _zero_crossings(support: np.ndarray, g: np.ndarray) -> tuple[float, ...]:
    """Zeros of the piecewise-linear extension of g between atoms."""
    out = []
    for i in range(support.size - 1):
        if g[i] * g[i + 1] < 0.0:
            out.append(float(support[i] + g[i] * (support[i + 1] - support[i])
                             / (g[i] - g[i + 1])))
    return tuple(out)


def weights_component(s: PairedSample, k: int, l: int,
                      cells: bool = False) -> AssociationWeights:
    """Weights of one component: products of eigenfunction values.

    W_i = g_1k(x_i) g_2l(y_i) averages to the component correlation;
    the cell version multiplies by the cell proportion and sums to it.
    The reported gridlines are where the two eigenfunctions cross
    zero, so every grid rectangle has a constant weight sign.
    """
    _require_nonconstant(s)
    ex, ix = _margin_eigensystem(s.x)
    ey, iy = _margin_eigensystem(s.y)
    if not 1 <= k <= ex.count or not 1 <= l <= ey.count:
        raise ValueError(f"component ({k}, {l}) is outside the available spectra")
    gx = ex.functions[k - 1]
    gy = ey.functions[l - 1]
    table = _cell_table(s, ix, iy, ex.dist.size, ey.dist.size)
    target = float(gx @ table @ gy)
    norm = math.sqrt(float(ex.eigenvalues @ ex.eigenvalues)
                     * float(ey.eigenvalues @ ey.eigenvalues))
    lines_x = _zero_crossings(ex.dist.support, gx)
    lines_y = _zero_crossings(ey.dist.support, gy)
    if not cells:
        values = gx[ix] * gy[iy]
        return AssociationWeights("component", (k, l), False, values, norm, target,
                                  s.x, s.y, s.x_labels, s.y_labels, lines_x, lines_y)
    values = table * np.outer(gx, gy)
    return AssociationWeights("component", (k, l), True, values, norm, target,
                              ex.dist.support, ey.dist.support,
                              s.x_labels, s.y_labels, lines_x, lines_y)


def _clip_line_to_unit_square(a: float, b: float, c: float):
    """Maximal segment of a x + b y = c inside [0, 1]^2, or None."""
    pts = []
    if b != 0.0:
        for x_edge in (0.0, 1.0):
            y_val = (c - a * x_edge) / b + 0.0
            if 0.0 <= y_val <= 1.0:
                pts.append((x_edge, y_val))
    if a != 0.0:
        for y_edge in (0.0, 1.0):
            x_val = (c - b * y_edge) / a + 0.0
            if 0.0 <= x_val <= 1.0:
                pts.append((x_val, y_edge))
    uniq = []
    for p in pts:
        if all(abs(p[0] - q[0]) > 1e-12 or abs(p[1] - q[1]) > 1e-12 for q in uniq):
            uniq.append(p)
    if len(uniq) < 2:
        return None
    uniq.sort()
    p0, p1 = uniq[0], uniq[-1]
    if math.hypot(p1[0] - p0[0], p1[1] - p0[1]) <= 1e-12:
        return None
    return p0, p1


def frechet_curves(k: int, l: int, sign: str = "+"):
    """Level curves of cos(k pi x) = +/- cos(l pi y) in the unit square.

    The solutions are the lines k x - l y = c and k x + l y = c with c
    running over the even integers for sign "+" and the odd ones for
    sign "-", clipped to the square.  Points exactly on these segments
    are where the (k, l) component correlation of the uniform-grade
    kernel reaches +1 or -1.
    """
    if k < 1 or l < 1:
        raise ValueError("component indices must be at least 1")
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    parity = 0 if sign == "+" else 1
    segments = []
    for b_coef in (-float(l), float(l)):
        lo = math.ceil(min(0.0, b_coef))
        hi = math.floor(k + max(0.0, b_coef))
        for c in range(lo, hi + 1):
            if c % 2 != parity:
                continue
            seg = _clip_line_to_unit_square(float(k), b_coef, float(c))
            if seg is not None:
                segments.append(seg)
    segments.sort()
    return segments


def gen_demo_data(kind: str, n: int, seed: int) -> PairedSample:
    """Reproducible artificial samples with known association shapes.

    a : correlated normal pair with correlation 2/3
    b : noisy parabola (U, (U - 1/2)^2) plus N(0, 1/10) on each axis
    c : (U, Z (1/5 + U)) -- normal with scale growing in u
    d : (U, Z (1/5 + min(U, 1-U))) -- scale largest in the middle

    Draw order is fixed (uniforms first, then normals), so a given
    (kind, n, seed) always produces identical bytes.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    if kind == "a":
        z = rng.standard_normal((n, 2))
        return PairedSample(z[:, 0], (2.0 / 3.0) * z[:, 0] + (math.sqrt(5.0) / 3.0) * z[:, 1])
    if kind == "b":
        u = rng.random(n)
        z = rng.standard_normal((n, 2))
        return PairedSample(u + z[:, 0] / 10.0, (u - 0.5) ** 2 + z[:, 1] / 10.0)
    if kind == "c":
        u = rng.random(n)
        z = rng.standard_normal(n)
        return PairedSample(u, z * (0.2 + u))
    if kind == "d":
        u = rng.random(n)
        z = rng.standard_normal(n)
        return PairedSample(u, z * (0.2 + np.minimum(u, 1.0 - u)))
    raise ValueError(f"unknown demo kind {kind!r}; choose a, b, c or d")


def lag_pairs(series) -> PairedSample:
    """Successive-jump pairs of a time series, arcsinh compressed.

    Pairs arcsinh(x_t - x_{t-1}) with arcsinh(x_{t+1} - x_t); the
    arcsinh tames heavy-tailed jumps while keeping their sign.  Useful
    for scanning a series for volatility clustering.
    """
    v = np.asarray(series, dtype=float)
    if v.ndim != 1 or v.size < 3:
        raise ValueError("need a 1-D series of at least 3 values")
    jumps = np.arcsinh(np.diff(v))
    return PairedSample(jumps[:-1], jumps[1:])


# ---------------------------------------------------------------------------
# Rendering.  The SVG path is the reference output: pure text, fixed
# formatting, no timestamps.  The matplotlib path exists for people who
# want raster/PDF figures and is not byte-stable across versions.

_SVG_SIZE = 480.0
_SVG_MARGIN = 40.0
_DOT_AREA_SHARE = 0.05


def _fmt(value: float) -> str:
    out = f"{value:.4f}"
    return "0.0000" if out == "-0.0000" else out


def _scatter_mapping(values: np.ndarray):
    lo, hi = float(values.min()), float(values.max())
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    span = _SVG_SIZE - 2.0 * _SVG_MARGIN

    def to_px(v):
        return _SVG_MARGIN + (np.asarray(v, dtype=float) - lo) / (hi - lo) * span

    return to_px


def _svg_open(parts):
    parts.append('<svg xmlns="http://www.w3.org/2000/svg" width="480" height="480" '
                 'viewBox="0 0 480 480">')
    parts.append('<rect width="480" height="480" fill="white"/>')
    parts.append('<rect x="40" y="40" width="400" height="400" fill="none" '
                 'stroke="black" stroke-width="1"/>')


def _render_cells_svg(w: AssociationWeights, parts):
    nx, ny = w.values.shape
    span = _SVG_SIZE - 2.0 * _SVG_MARGIN
    cw, ch = span / nx, span / ny
    peak = float(np.max(np.abs(w.values)))
    for a in range(nx):
        for b in range(ny):
            level = 0.5 if peak == 0.0 else 0.5 - 0.5 * w.values[a, b] / peak
            shade = int(round(255.0 * level))
            x0 = _SVG_MARGIN + a * cw
            y0 = _SVG_SIZE - _SVG_MARGIN - (b + 1) * ch
            parts.append(f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(cw)}" '
                         f'height="{_fmt(ch)}" fill="rgb({shade},{shade},{shade})"/>')
    if w.x_labels:
        for a, label in enumerate(w.x_labels[:nx]):
            x0 = _SVG_MARGIN + (a + 0.5) * cw
            parts.append(f'<text x="{_fmt(x0)}" y="456.0000" font-size="11" '
                         f'text-anchor="middle">{escape(str(label))}</text>')
    if w.y_labels:
        for b, label in enumerate(w.y_labels[:ny]):
            y0 = _SVG_SIZE - _SVG_MARGIN - (b + 0.5) * ch
            parts.append(f'<text x="34.0000" y="{_fmt(y0 + 4.0)}" font-size="11" '
                         f'text-anchor="end">{escape(str(label))}</text>')


def _render_dots_svg(w: AssociationWeights, parts):
    to_x = _scatter_mapping(w.x)
    to_y = _scatter_mapping(w.y)
    px = to_x(w.x)
    py = _SVG_SIZE - to_y(w.y)
    total = float(np.sum(np.abs(w.values)))
    span = _SVG_SIZE - 2.0 * _SVG_MARGIN
    budget = _DOT_AREA_SHARE * span * span
    for gx in w.gridlines_x:
        x_px = float(to_x(gx))
        parts.append(f'<line x1="{_fmt(x_px)}" y1="40.0000" x2="{_fmt(x_px)}" '
                     f'y2="440.0000" stroke="gray" stroke-dasharray="4 3"/>')
    for gy in w.gridlines_y:
        y_px = _SVG_SIZE - float(to_y(gy))
        parts.append(f'<line x1="40.0000" y1="{_fmt(y_px)}" x2="440.0000" '
                     f'y2="{_fmt(y_px)}" stroke="gray" stroke-dasharray="4 3"/>')
    for i in range(w.values.size):
        weight = float(w.values[i])
        if weight == 0.0 or total == 0.0:
            continue
        radius = math.sqrt(budget * abs(weight) / total / math.pi)
        style = ('fill="black"' if weight > 0.0
                 else 'fill="white" stroke="black" stroke-width="1"')
        parts.append(f'<circle cx="{_fmt(px[i])}" cy="{_fmt(py[i])}" '
                     f'r="{_fmt(radius)}" {style}/>')


def render_scatter_svg(s: PairedSample, w: AssociationWeights, path) -> None:
    """Write the weight plot as a deterministic standalone SVG.

    Observation weights render as circles with area proportional to
    |W_i| (total dot area 5% of the plot), black for positive, white
    with a black ring for negative, omitted at zero; component plots
    add dashed gridlines at the eigenfunction zero crossings.  Cell
    weights render as a grayscale matrix: mid-gray at zero, linearly
    darker toward +max and lighter toward -max.
    """
    if not w.per_cell and w.values.shape != s.x.shape:
        raise ValueError("weights do not align with the sample")
    parts = []
    _svg_open(parts)
    if w.per_cell:
        _render_cells_svg(w, parts)
    else:
        _render_dots_svg(w, parts)
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def write_weights_csv(w: AssociationWeights, path) -> None:
    """Write weights as CSV with header index,x,y,weight.

    Observation rows carry the observation index and coordinates; cell
    rows carry the row-major cell index and the support values.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("index,x,y,weight\n")
        if w.per_cell:
            ny = w.values.shape[1]
            for a in range(w.values.shape[0]):
                for b in range(ny):
                    fh.write(f"{a * ny + b},{w.x[a]:.17g},{w.y[b]:.17g},"
                             f"{w.values[a, b]:.17g}\n")
        else:
            for i in range(w.values.size):
                fh.write(f"{i},{w.x[i]:.17g},{w.y[i]:.17g},{w.values[i]:.17g}\n")


def render_scatter_fig(s: PairedSample, w: AssociationWeights, path) -> None:
    """Render the same weight plot through matplotlib (png/pdf/...).

    Convenience for reports; the SVG emitter is the byte-stable
    reference output.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 5))
    if w.per_cell:
        peak = float(np.max(np.abs(w.values))) or 1.0
        ax.imshow(w.values.T, origin="lower", cmap="gray_r", vmin=-peak, vmax=peak,
                  extent=(-0.5, w.values.shape[0] - 0.5, -0.5, w.values.shape[1] - 0.5))
        ax.set_xticks(range(w.values.shape[0]))
        ax.set_yticks(range(w.values.shape[1]))
        if w.x_labels:
            ax.set_xticklabels(w.x_labels[: w.values.shape[0]])
        if w.y_labels:
            ax.set_yticklabels(w.y_labels[: w.values.shape[1]])
    else:
        total = float(np.sum(np.abs(w.values))) or 1.0
        area = 4000.0 * np.abs(w.values) / total
        pos = w.values > 0
        ax.scatter(w.x[pos], w.y[pos], s=area[pos], c="black")
        ax.scatter(w.x[~pos], w.y[~pos], s=area[~pos], facecolors="white",
                   edgecolors="black")
        for gx in w.gridlines_x:
            ax.axvline(gx, color="gray", linestyle="--", linewidth=0.8)
        for gy in w.gridlines_y:
            ax.axhline(gy, color="gray", linestyle="--", linewidth=0.8)
    title = "overall weights" if w.kind == "overall" else f"component {w.component} weights"
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
