"""Nyquist curve data and circle-overlay SVG rendering.

The frequency response of a stable rational transfer function is sampled on
a 2000-point logarithmic grid over [1e-3, 1e3] rad/s, augmented with the
critical frequencies found by the gain analysis. The CSV carries the raw
curve; the SVG overlays the curve (positive branch plus conjugate mirror)
with the disk of center (gamma/2, 0) and radius gamma/2 whose containment
is equivalent to the secant-gain bound, marking any sampled violations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotStableError
from .passivity import hinf_gain, secant_gain
from .poly import RationalTransfer, routh_hurwitz

__all__ = [
    "NyquistData",
    "build_nyquist_data",
    "render_nyquist_csv",
    "render_nyquist_svg",
    "emit_nyquist",
]

GRID_POINTS = 2000
OMEGA_LO = 1e-3
OMEGA_HI = 1e3
VIOLATION_RTOL = 1e-9


@dataclass(frozen=True)
class NyquistData:
    """Sampled frequency response plus the circle test outcome.

    ``gamma`` is the circle parameter actually used (may be +inf, in which
    case no circle is drawn and ``violations`` is empty). ``violations``
    lists (omega, re, im, excess) for grid points with
    ``|G(i omega) - gamma/2| > gamma/2`` beyond roundoff.
    """

    omegas: tuple[float, ...]
    re: tuple[float, ...]
    im: tuple[float, ...]
    gamma: float
    gamma_is_default: bool
    violations: tuple[tuple[float, float, float, float], ...]


def _critical_frequencies(G: RationalTransfer) -> list[float]:
    freqs = [0.0]
    cert = secant_gain(G)
    for x, _ in cert.candidates:
        if math.isfinite(x) and x >= 0:
            freqs.append(math.sqrt(x))
    if cert.witness_omega is not None and math.isfinite(cert.witness_omega):
        freqs.append(cert.witness_omega)
    hcert = hinf_gain(G)
    for x, _ in hcert.candidates:
        if math.isfinite(x) and x >= 0:
            freqs.append(math.sqrt(x))
    if hcert.witness_omega is not None and math.isfinite(hcert.witness_omega):
        freqs.append(hcert.witness_omega)
    return freqs


def build_nyquist_data(G: RationalTransfer, gamma: float | None = None) -> NyquistData:
    """Sample the response and test the circle condition.

    ``gamma`` defaults to the computed secant gain. Requires a Hurwitz
    denominator.
    """
    if not routh_hurwitz(G.den).stable:
        raise NotStableError("Nyquist emission requires a Hurwitz denominator")
    gamma_is_default = gamma is None
    if gamma is None:
        gamma = secant_gain(G).gamma
    else:
        gamma = float(gamma)
        if not (gamma > 0):
            raise ValueError("gamma must be positive")

    grid = {float(w) for w in np.logspace(math.log10(OMEGA_LO), math.log10(OMEGA_HI), GRID_POINTS)}
    for w in _critical_frequencies(G):
        grid.add(float(w))
    omegas = sorted(grid)
    re: list[float] = []
    im: list[float] = []
    violations: list[tuple[float, float, float, float]] = []
    for w in omegas:
        z = G(1j * w)
        re.append(z.real)
        im.append(z.imag)
        if math.isfinite(gamma):
            excess = abs(z - gamma / 2.0) - gamma / 2.0
            if excess > VIOLATION_RTOL * max(1.0, gamma):
                violations.append((w, z.real, z.imag, excess))
    return NyquistData(
        omegas=tuple(omegas),
        re=tuple(re),
        im=tuple(im),
        gamma=gamma,
        gamma_is_default=gamma_is_default,
        violations=tuple(violations),
    )


def render_nyquist_csv(data: NyquistData) -> str:
    lines = ["omega,re,im"]
    for w, x, y in zip(data.omegas, data.re, data.im):
        lines.append(f"{w!r},{x!r},{y!r}")
    return "\n".join(lines) + "\n"


def _svg_path(xs, ys, to_px) -> str:
    pts = [to_px(x, y) for x, y in zip(xs, ys)]
    return "M " + " L ".join(f"{px:.2f} {py:.2f}" for px, py in pts)


def render_nyquist_svg(data: NyquistData) -> str:
    """Self-contained 800x800 SVG with equal axis scaling.

    Shows the positive-frequency branch (solid) and its conjugate mirror
    (dashed), the circle when ``gamma`` is finite, and cross markers on
    violating samples.
    """
    size = 800.0
    margin = 60.0
    xs = list(data.re)
    ys = list(data.im) + [-v for v in data.im]
    have_circle = math.isfinite(data.gamma)
    if have_circle:
        xs += [0.0, data.gamma]
        ys += [-data.gamma / 2.0, data.gamma / 2.0]
    xs += [0.0]
    ys += [0.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    span = max(x_hi - x_lo, y_hi - y_lo, 1e-9)
    pad = 0.05 * span
    span += 2 * pad
    x_mid = 0.5 * (x_lo + x_hi)
    y_mid = 0.5 * (y_lo + y_hi)
    scale = (size - 2 * margin) / span

    def to_px(x: float, y: float) -> tuple[float, float]:
        return (
            size / 2.0 + (x - x_mid) * scale,
            size / 2.0 - (y - y_mid) * scale,
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:g}" height="{size:g}" '
        f'viewBox="0 0 {size:g} {size:g}">',
        "<title>Nyquist curve with secant-gain circle</title>",
        f'<rect width="{size:g}" height="{size:g}" fill="white"/>',
    ]
    # axes through the origin of the complex plane
    ox, oy = to_px(0.0, 0.0)
    parts.append(
        f'<line x1="0" y1="{oy:.2f}" x2="{size:g}" y2="{oy:.2f}" '
        'stroke="#bbbbbb" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{ox:.2f}" y1="0" x2="{ox:.2f}" y2="{size:g}" '
        'stroke="#bbbbbb" stroke-width="1"/>'
    )
    if have_circle:
        cx, cy = to_px(data.gamma / 2.0, 0.0)
        r = (data.gamma / 2.0) * scale
        parts.append(
            f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="none" '
            'stroke="#d62728" stroke-width="2"/>'
        )
        parts.append(
            f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3" fill="#d62728"/>'
        )
    parts.append(
        f'<path d="{_svg_path(data.re, data.im, to_px)}" fill="none" '
        'stroke="#1f77b4" stroke-width="2"/>'
    )
    parts.append(
        f'<path d="{_svg_path(data.re, [-v for v in data.im], to_px)}" fill="none" '
        'stroke="#1f77b4" stroke-width="2" stroke-dasharray="6 4"/>'
    )
    for w, x, y, _ in data.violations:
        px, py = to_px(x, y)
        parts.append(
            f'<path d="M {px - 5:.2f} {py - 5:.2f} L {px + 5:.2f} {py + 5:.2f} '
            f'M {px - 5:.2f} {py + 5:.2f} L {px + 5:.2f} {py - 5:.2f}" '
            'stroke="#ff7f0e" stroke-width="2"/>'
        )
    label = (
        f"gamma = {data.gamma:.6g}" if have_circle else "gamma = inf (no circle)"
    )
    if data.gamma_is_default:
        label += "  (computed secant gain)"
    if data.violations:
        label += f"  violations: {len(data.violations)}"
    parts.append(
        f'<text x="{margin:g}" y="{margin / 2:g}" font-family="monospace" '
        f'font-size="16" fill="#333333">{label}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_nyquist(
    G: RationalTransfer, gamma: float | None, out_base
) -> tuple[str, str]:
    """Write ``<out_base>.csv`` and ``<out_base>.svg``; returns their paths.

    A trailing ``.csv`` or ``.svg`` on ``out_base`` is stripped first, so
    passing either filename targets the same pair.
    """
    base = str(out_base)
    for ext in (".csv", ".svg"):
        if base.endswith(ext):
            base = base[: -len(ext)]
            break
    data = build_nyquist_data(G, gamma)
    csv_path = base + ".csv"
    svg_path = base + ".svg"
    with open(csv_path, "w") as fh:
        fh.write(render_nyquist_csv(data))
    with open(svg_path, "w") as fh:
        fh.write(render_nyquist_svg(data))
    return csv_path, svg_path
