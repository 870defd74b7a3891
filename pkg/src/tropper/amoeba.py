"""Numerical amoeba tools for specialised Laurent polynomials.

A specialised polynomial is a plain mapping ``exponent tuple -> complex``.
Everything here works on the real torus ``|z_j| = exp(x_j)`` over a point
``x`` of ``R^n``: the order of the complement component containing ``x``,
the Ronkin function, and a raster picture of the amoeba.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import Inconclusive, OnAmoeba

SpecializedLaurent = Mapping[tuple[int, ...], complex]


def specialize(series, values: Mapping[str, float], degeneration: str = "t") -> dict[tuple[int, ...], complex]:
    """Numerical polynomial from a :class:`~tropper.series.TruncatedSeries`.

    Parameters are replaced by ``values``.  When the series variable is the
    degeneration parameter ``degeneration`` the reduction modulo it is taken
    (terms of positive degree are dropped); otherwise the series variable must
    have a value in ``values`` and is substituted.
    """
    ring = series.ring
    out: dict[tuple[int, ...], complex] = {}
    substitute = ring.t_name != degeneration
    for (lam, tdeg, mono), c in series.terms.items():
        if tdeg and not substitute:
            if tdeg < 0:
                raise ValueError("negative powers of the degeneration parameter have no reduction")
            continue
        v = complex(c)
        if tdeg:
            if ring.t_name not in values:
                raise KeyError(f"no numerical value for {ring.t_name!r}")
            v *= complex(values[ring.t_name]) ** tdeg
        for name, e in mono:
            if name not in values:
                raise KeyError(f"no numerical value for parameter {name!r}")
            v *= complex(values[name]) ** e
        out[lam] = out.get(lam, 0) + v
    return {k: v for k, v in out.items() if v != 0}


def _arrays(f: SpecializedLaurent) -> tuple[np.ndarray, np.ndarray]:
    exps = np.array(sorted(f), dtype=float)
    coeffs = np.array([f[tuple(int(v) for v in e)] for e in exps], dtype=complex)
    return exps, coeffs


def term_moduli(f: SpecializedLaurent, x: Sequence[float]) -> dict[tuple[int, ...], float]:
    return {e: abs(c) * math.exp(float(np.dot(e, x))) for e, c in f.items()}


def _evaluate_grid(f: SpecializedLaurent, x: Sequence[float], thetas: Sequence[np.ndarray]) -> np.ndarray:
    """Values of ``f`` on the tensor grid of angles ``thetas`` over ``x``."""
    grids = np.meshgrid(*thetas, indexing="ij")
    out = np.zeros(grids[0].shape, dtype=complex)
    for e, c in f.items():
        phase = sum(ej * g for ej, g in zip(e, grids))
        out += c * math.exp(float(np.dot(e, x))) * np.exp(1j * phase)
    return out


def lopsided_order(f: SpecializedLaurent, x: Sequence[float]) -> tuple[int, ...] | None:
    """Exponent of a term dominating the sum of all others at ``x``, if any."""
    mods = term_moduli(f, x)
    total = sum(mods.values())
    e, big = max(mods.items(), key=lambda kv: kv[1])
    if big > (total - big) * (1 + 1e-12):
        return e
    return None


def winding_number(f: SpecializedLaurent, x: Sequence[float], axis: int, base: Sequence[float] | None = None,
                   samples: int = 2048) -> float:
    """Winding of ``theta -> f`` along coordinate circle ``axis`` (not rounded)."""
    n = len(x)
    base = list(base) if base is not None else [0.0] * n
    theta = np.linspace(0, 2 * np.pi, samples + 1)
    vals = np.zeros(samples + 1, dtype=complex)
    for e, c in f.items():
        fixed = sum(e[j] * base[j] for j in range(n) if j != axis)
        vals += c * math.exp(float(np.dot(e, x))) * np.exp(1j * (fixed + e[axis] * theta))
    if np.min(np.abs(vals)) == 0:
        raise OnAmoeba("zero on the sampling circle")
    phase = np.unwrap(np.angle(vals))
    return float((phase[-1] - phase[0]) / (2 * np.pi))


def _lipschitz(f: SpecializedLaurent, x: Sequence[float]) -> float:
    return sum(abs(c) * math.exp(float(np.dot(e, x))) * sum(abs(v) for v in e) for e, c in f.items())


def complement_order(f: SpecializedLaurent, x: Sequence[float], n_max: int | None = None) -> tuple[int, ...]:
    """Order ``m`` of the amoeba complement component containing ``x``.

    Raises :class:`OnAmoeba` when the torus over ``x`` meets the zero set and
    :class:`Inconclusive` when sampling cannot separate the two cases.
    """
    x = [float(v) for v in x]
    n = len(x)
    if not f:
        raise OnAmoeba("the zero polynomial vanishes everywhere")
    if any(len(e) != n for e in f):
        raise ValueError("dimension mismatch between polynomial and point")
    if len(f) == 1:
        return next(iter(f))
    lop = lopsided_order(f, x)
    if lop is not None:
        return lop
    if n == 1:
        return _order_1d(f, x[0])
    return _order_nd(f, x, n_max or (1024 if n == 2 else 128))


def _order_1d(f: SpecializedLaurent, x: float) -> tuple[int, ...]:
    lo = min(e[0] for e in f)
    hi = max(e[0] for e in f)
    coeffs = [complex(f.get((d,), 0)) for d in range(hi, lo - 1, -1)]
    roots = np.roots(coeffs)
    logs = np.log(np.abs(roots[roots != 0])) if len(roots) else np.array([])
    scale = max(1.0, abs(x))
    if len(logs) and np.min(np.abs(logs - x)) < 1e-9 * scale:
        raise OnAmoeba(f"a root has modulus exp({x})")
    count = int(np.sum(logs < x)) + int(np.sum(roots == 0))
    m = lo + count
    if len(logs) and np.min(np.abs(logs - x)) < 1e-6 * scale:
        w = winding_number(f, [x], 0, samples=1 << 16)
        if abs(w - m) > 0.25:
            raise Inconclusive("root count and winding quadrature disagree")
    return (m,)


def _refined_minimum(f: SpecializedLaurent, x: Sequence[float], start: Sequence[float]) -> float:
    """Local minimum of ``|f|`` on the torus over ``x``, polished from a grid point."""
    exps, coeffs = _arrays(f)
    mod = coeffs * np.exp(exps @ np.asarray(x, dtype=float))

    def residual(theta):
        v = np.sum(mod * np.exp(1j * (exps @ theta)))
        return np.array([v.real, v.imag])

    theta0 = np.asarray(start, dtype=float)
    res = least_squares(residual, theta0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return float(min(np.hypot(*res.fun), np.hypot(*residual(theta0))))


def _order_nd(f: SpecializedLaurent, x: Sequence[float], n_max: int) -> tuple[int, ...]:
    n = len(x)
    lip = _lipschitz(f, x)
    scale = sum(term_moduli(f, x).values())
    N = 32
    while True:
        thetas = [np.linspace(0, 2 * np.pi, N, endpoint=False)] * n
        vals = np.abs(_evaluate_grid(f, x, thetas))
        lower = float(vals.min()) - lip * math.pi / N
        if lower > 0:
            break
        idx = np.unravel_index(int(np.argmin(vals)), vals.shape)
        if _refined_minimum(f, x, [thetas[j][i] for j, i in enumerate(idx)]) < 1e-9 * scale:
            raise OnAmoeba(f"the torus over {x} meets the zero set")
        if N >= n_max:
            raise Inconclusive(f"cannot certify that the torus over {x} avoids the zero set")
        N *= 2
    samples = int(min(1 << 20, max(256, math.ceil(8 * math.pi * lip / lower))))
    m = []
    for j in range(n):
        w = winding_number(f, x, j, samples=samples)
        r = round(w)
        if abs(w - r) > 0.1:
            raise Inconclusive(f"winding along axis {j} is not near an integer: {w}")
        m.append(int(r))
    return tuple(m)


# ---------------------------------------------------------------------------
# Ronkin function
# ---------------------------------------------------------------------------


def _continuous_phase(F: np.ndarray) -> np.ndarray:
    """Phase of ``F`` continuous along every axis, principal at the origin."""
    if F.ndim == 1:
        ph = np.unwrap(np.angle(np.append(F, F[0])))
        if abs(ph[-1] - ph[0]) > 1e-6:
            raise ValueError("the logarithm has nonzero winding on the torus (wrong order m)")
        return ph[:-1]
    inner = np.unwrap(np.angle(F), axis=-1)
    closing = np.unwrap(np.angle(np.concatenate([F, F[..., :1]], axis=-1)), axis=-1)
    if np.max(np.abs(closing[..., -1] - closing[..., 0])) > 1e-6:
        raise ValueError("the logarithm has nonzero winding on the torus (wrong order m)")
    first = _continuous_phase(F[..., 0])
    return inner + (first - inner[..., 0])[..., None]


def ronkin_numeric(f: SpecializedLaurent, m: Sequence[int], x: Sequence[float], n_start: int = 256,
                   n_max: int | None = None, tol: float = 1e-9) -> complex:
    """Mean of a continuous branch of ``log(z^-m f)`` over the torus over ``x``.

    The branch is principal at angle zero.  Trapezoidal rule with doubling of
    the sample count until two successive values agree to ``tol``.
    """
    x = [float(v) for v in x]
    n = len(x)
    g = {tuple(a - b for a, b in zip(e, m)): c for e, c in f.items()}
    if n_max is None:
        n_max = {1: 4096, 2: 1024}.get(n, 128)
    N = min(n_start, n_max)
    prev = None
    while True:
        thetas = [np.linspace(0, 2 * np.pi, N, endpoint=False)] * n
        F = _evaluate_grid(g, x, thetas)
        if np.min(np.abs(F)) == 0:
            raise OnAmoeba("zero on the sampling torus")
        val = complex(np.mean(np.log(np.abs(F))) + 1j * np.mean(_continuous_phase(F)))
        if prev is not None and abs(val - prev) < tol:
            return val
        if N >= n_max:
            if prev is not None and abs(val - prev) < 1e3 * tol:
                return val
            raise Inconclusive(f"quadrature did not converge: {prev} vs {val}")
        prev = val
        N *= 2


# ---------------------------------------------------------------------------
# raster
# ---------------------------------------------------------------------------


@dataclass
class AmoebaRaster:
    """Grid of Log-space points with a mask of points judged to lie near the amoeba."""

    axes: tuple[np.ndarray, ...]
    mask: np.ndarray

    def to_csv(self) -> str:
        names = ["x", "y", "z"][: len(self.axes)]
        lines = [",".join(names + ["on_amoeba"])]
        if self.mask.size:
            for idx in np.ndindex(self.mask.shape):
                coords = [f"{self.axes[j][i]:.6g}" for j, i in enumerate(idx)]
                lines.append(",".join(coords + [str(int(self.mask[idx]))]))
        return "\n".join(lines) + "\n"

    def to_svg(self, size: int = 400) -> str:
        head = f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">'
        parts = [head, f'<rect width="{size}" height="{size}" fill="white"/>']
        if self.mask.size:
            if self.mask.ndim == 1:
                nx = self.mask.shape[0]
                w = size / nx
                for i in range(nx):
                    if self.mask[i]:
                        parts.append(f'<rect x="{i * w:.3f}" y="{size / 2 - 4}" width="{w:.3f}" height="8" fill="black"/>')
            else:
                nx, ny = self.mask.shape[:2]
                w, h = size / nx, size / ny
                for i in range(nx):
                    for j in range(ny):
                        if self.mask[i, j]:
                            y = size - (j + 1) * h
                            parts.append(f'<rect x="{i * w:.3f}" y="{y:.3f}" width="{w:.3f}" height="{h:.3f}" fill="black"/>')
        parts.append("</svg>")
        return "\n".join(parts) + "\n"


def amoeba_raster(f: SpecializedLaurent, bbox: Sequence[tuple[float, float]], resolution: int = 100,
                  samples: int = 64, threshold: float = 0.05, workers: int = 1) -> AmoebaRaster:
    """Mark grid points whose torus comes close to the zero set.

    A point is marked when the minimum of ``|f|`` over ``samples`` angles per
    coordinate falls below ``threshold`` times the sum of the term moduli.
    With ``workers > 1`` the grid rows are evaluated in a thread pool; the
    result does not depend on the number of workers.
    """
    axes = []
    for lo, hi in bbox:
        if hi <= lo:
            axes.append(np.array([]))
        else:
            axes.append(np.linspace(lo, hi, resolution))
    shape = tuple(len(a) for a in axes)
    mask = np.zeros(shape, dtype=bool)
    if mask.size == 0:
        return AmoebaRaster(tuple(axes), mask)
    n = len(bbox)
    thetas = [np.linspace(0, 2 * np.pi, samples, endpoint=False)] * n

    def mark(idx) -> bool:
        x = [axes[j][i] for j, i in enumerate(idx)]
        vals = np.abs(_evaluate_grid(f, x, thetas))
        scale = sum(term_moduli(f, x).values())
        return bool(vals.min() < threshold * scale)

    indices = list(np.ndindex(shape))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flags = list(pool.map(mark, indices))
    else:
        flags = [mark(idx) for idx in indices]
    for idx, flag in zip(indices, flags):
        mask[idx] = flag
    return AmoebaRaster(tuple(axes), mask)
