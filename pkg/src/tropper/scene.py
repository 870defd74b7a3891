"""Integral affine manifolds with singularities, polyhedral decomposition and wall data.

Every maximal cell carries its own chart ``Z^n``.  A codimension-one cell
``rho`` records, for each adjacent maximal cell, an affine embedding of its
own coordinates (``origin + basis . p``) together with a normal vector
``zeta`` completing the basis to a unimodular one.  The first side listed is
the positive side.  Parallel transport from the positive side to the other
side through a piece of ``rho`` is the linear map fixing the tangent lattice
of ``rho`` and sending ``zeta`` to ``-zeta'`` (standard structure) or to
``-zeta' + m`` where ``m`` is the order of the amoeba complement component of
the slab function at the crossing point (adapted structure).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy

from . import amoeba
from .errors import ForbiddenStratum, OnAmoeba, SceneError
from .exact import IntMatrix, IntVector, MultiplicativeValue, det, kernel_sublattice, matvec
from .geometry import Polytope, Point, as_point, dot
from .series import SeriesRing, TruncatedSeries, normalize_slab
from .walls import Slab, Wall


@dataclass(frozen=True)
class MaximalCell:
    id: str
    polytope: Polytope

    @property
    def dim(self) -> int:
        return self.polytope.dim


@dataclass(frozen=True)
class Side:
    """Embedding of a codimension-one cell into the chart of an adjacent maximal cell."""

    cell: str
    origin: tuple[int, ...]
    basis: tuple[tuple[int, ...], ...]
    normal: tuple[int, ...]

    def frame(self) -> IntMatrix:
        """Columns ``basis | normal`` as a square integer matrix (row-major)."""
        cols = list(self.basis) + [self.normal]
        n = len(self.normal)
        return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))

    def point(self, p: Sequence[Fraction]) -> Point:
        return tuple(Fraction(o) + sum(Fraction(p[j]) * b[i] for j, b in enumerate(self.basis))
                     for i, o in enumerate(self.origin))

    def tangent(self, mu: Sequence[int]) -> IntVector:
        n = len(self.normal)
        return tuple(sum(mu[j] * b[i] for j, b in enumerate(self.basis)) for i in range(n))


@dataclass(frozen=True)
class Piece:
    """Piece of a codimension-one cell; the chart transition may depend on it."""

    id: str
    polytope: Polytope
    normal_image: tuple[int, ...] | None = None


@dataclass(frozen=True)
class Rho:
    """Codimension-one cell with its sides, pieces and Log coordinates."""

    id: str
    polytope: Polytope
    sides: tuple[Side, ...]
    pieces: tuple[Piece, ...]
    log_origin: tuple[Fraction, ...]
    log_scale: Fraction = Fraction(1)
    declared_boundary: bool = False

    @property
    def boundary(self) -> bool:
        return len(self.sides) == 1

    def side(self, cell: str) -> Side:
        for s in self.sides:
            if s.cell == cell:
                return s
        raise SceneError(f"cell {cell!r} is not adjacent to {self.id!r}")

    def other(self, cell: str) -> str:
        if self.boundary:
            raise SceneError(f"{self.id!r} is a boundary cell")
        return self.sides[1].cell if self.sides[0].cell == cell else self.sides[0].cell

    def piece_at(self, p: Sequence[Fraction], strict: bool = False) -> Piece:
        """Piece containing ``p``; with ``strict`` the point must be interior to it."""
        for pc in self.pieces:
            if (pc.polytope.interior_contains(p) if strict else pc.polytope.contains(p)):
                return pc
        if strict:
            raise ForbiddenStratum(f"point {tuple(map(str, p))} of {self.id} lies on a piece boundary")
        raise SceneError(f"point {tuple(map(str, p))} is outside {self.id}")

    def piece(self, pid: str) -> Piece:
        for pc in self.pieces:
            if pc.id == pid:
                return pc
        raise SceneError(f"{self.id!r} has no piece {pid!r}")

    def log_point(self, p: Sequence[Fraction]) -> tuple[float, ...]:
        return tuple(float((Fraction(a) - o) * self.log_scale) for a, o in zip(p, self.log_origin))

    def covector(self, cell: str) -> IntVector:
        """Primitive covector vanishing on the tangent space, positive into ``cell``."""
        s = self.side(cell)
        ker = kernel_sublattice([list(b) for b in s.basis], len(s.normal))
        if len(ker) != 1:
            raise SceneError(f"degenerate tangent basis on {self.id}/{cell}")
        d = ker[0]
        if dot(d, s.normal) < 0:
            d = tuple(-x for x in d)
        return d

    def normal_in(self, cell: str, piece: Piece) -> tuple[int, ...]:
        s = self.side(cell)
        if not self.boundary and cell == self.sides[1].cell and piece.normal_image is not None:
            return piece.normal_image
        return s.normal


def _inverse(M: IntMatrix) -> IntMatrix:
    inv = sympy.Matrix(M).inv()
    if any(not x.is_Integer for x in inv):
        raise SceneError("chart transition is not integral")
    return tuple(tuple(int(x) for x in row) for row in inv.tolist())


def _matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))) for i in range(len(a)))


@dataclass
class Scene:
    """A complete scene: complex, kinks, gluing data, walls, slabs, parameters and cycles."""

    name: str
    dim: int
    cells: dict[str, MaximalCell]
    rhos: dict[str, Rho]
    kinks: dict[tuple[str, str], int]
    gluing: dict[tuple[str, str, str], tuple[MultiplicativeValue, ...]]
    slabs: list[Slab]
    walls: list[Wall]
    params: dict[str, float]
    series_variable: str = "t"
    rho_variables: tuple[str, ...] = ("u",)
    chart_variables: tuple[str, ...] = ("x", "y")
    k: int = 4
    oriented: bool = True
    cycles: dict = field(default_factory=dict)
    loops: list = field(default_factory=list)
    source: str | None = None

    def __post_init__(self):
        self._order_cache: dict = {}
        self._normalized: dict[tuple[str, int], TruncatedSeries] = {}

    # rings ---------------------------------------------------------------
    def slab_ring(self, k: int | None = None) -> SeriesRing:
        return SeriesRing(self.rho_variables, self.series_variable, self.k if k is None else k)

    def chart_ring(self, k: int | None = None) -> SeriesRing:
        return SeriesRing(self.chart_variables, "t", self.k if k is None else k)

    # slabs ---------------------------------------------------------------
    def slab_at(self, rho: str, p: Sequence[Fraction]) -> Slab | None:
        r = self.rhos[rho]
        piece = r.piece_at(p)
        for s in self.slabs:
            if s.rho == rho and s.piece == piece.id and s.covers(p):
                return s
        return None

    def slab(self, sid: str) -> Slab:
        for s in self.slabs:
            if s.id == sid:
                return s
        raise SceneError(f"no slab {sid!r}")

    def slab_function(self, slab: Slab, k: int | None = None, normalized: bool = False) -> TruncatedSeries:
        """Slab function in the slab ring of order ``k``, optionally normalized."""
        ring = self.slab_ring(k)
        f = slab.function.retruncate(ring)
        if not normalized:
            return f
        key = (slab.id, ring.k)
        if key not in self._normalized:
            from .series import find_grading, graded

            grading, _ = find_grading(f, unit=f.constant_key())
            g = normalize_slab(graded(f, grading))
            self._normalized[key] = TruncatedSeries(ring, g.terms)
        return f + self._normalized[key]

    def order_at(self, rho: str, p: Sequence[Fraction]) -> tuple[int, ...]:
        """Order of the amoeba complement component of the slab function at ``p``."""
        key = (rho, tuple(p))
        if key not in self._order_cache:
            slab = self.slab_at(rho, p)
            r = self.rhos[rho]
            if slab is None:
                m = (0,) * (self.dim - 1)
            else:
                poly = amoeba.specialize(slab.function, self.params)
                m = amoeba.complement_order(poly, r.log_point(p))
            self._order_cache[key] = m
        return self._order_cache[key]

    # transport -----------------------------------------------------------
    def transition(self, rho: str, from_cell: str, p: Sequence[Fraction] | None = None,
                   mode: str = "adapted", piece: Piece | None = None) -> IntMatrix:
        """Linear map from the chart of ``from_cell`` to the chart across ``rho``.

        In ``"standard"`` mode ``p`` (if given) must avoid piece boundaries;
        in ``"adapted"`` mode ``p`` is required, must avoid the boundary of
        ``rho`` and the amoeba of the slab function.
        """
        r = self.rhos[rho]
        if r.boundary:
            raise SceneError(f"cannot cross the boundary cell {rho!r}")
        pos, neg = r.sides
        if from_cell not in (pos.cell, neg.cell):
            raise SceneError(f"cell {from_cell!r} is not adjacent to {rho!r}")
        if mode not in ("standard", "adapted"):
            raise ValueError(f"unknown transport mode {mode!r}")
        m: tuple[int, ...] = (0,) * (self.dim - 1)
        if piece is None:
            if p is None:
                if len(r.pieces) != 1:
                    raise SceneError("a point is needed to choose the piece")
                piece = r.pieces[0]
            else:
                p = as_point(p)
                if mode == "standard":
                    piece = r.piece_at(p, strict=True)
                else:
                    if r.polytope.on_boundary(p):
                        raise ForbiddenStratum(f"point {tuple(map(str, p))} lies on the boundary of {rho}")
                    piece = r.piece_at(p)
        if mode == "adapted":
            if p is None:
                raise ValueError("adapted transport needs the crossing point")
            try:
                m = self.order_at(rho, p)
            except OnAmoeba as exc:
                raise ForbiddenStratum(f"crossing point lies on the amoeba: {exc}") from exc
        zeta_prime = r.normal_in(neg.cell, piece)
        image_of_zeta = tuple(-z + t for z, t in zip(zeta_prime, neg.tangent(m)))
        target_cols = list(neg.basis) + [image_of_zeta]
        n = self.dim
        target = tuple(tuple(target_cols[j][i] for j in range(n)) for i in range(n))
        forward = _matmul(target, _inverse(pos.frame()))
        if from_cell == pos.cell:
            return forward
        return _inverse(forward)

    def transport(self, rho: str, from_cell: str, v: Sequence[int], p: Sequence[Fraction] | None = None,
                  mode: str = "adapted") -> IntVector:
        return matvec(self.transition(rho, from_cell, p, mode), v)

    # gluing --------------------------------------------------------------
    def gluing_value(self, cell: str, rho: str, piece: str, xi: Sequence[int]) -> MultiplicativeValue:
        vals = self.gluing.get((cell, rho, piece))
        out = MultiplicativeValue.identity()
        if vals is None:
            return out
        for v, e in zip(vals, xi):
            if e:
                out = out * v ** e
        return out

    def kink(self, rho: str, piece: str) -> int:
        return self.kinks.get((rho, piece), 0)


def parallel_transport(scene: Scene, path: Sequence[tuple[str, str, Sequence]], v: Sequence[int],
                       mode: str = "adapted") -> IntVector:
    """Transport ``v`` along a path given as ``(rho, from_cell, crossing point)`` steps."""
    out = tuple(v)
    for rho, cell, p in path:
        out = scene.transport(rho, cell, out, p, mode)
    return out


def validate_scene(scene: Scene) -> list[str]:
    """Structural checks; returns a list of violations (empty when valid)."""
    problems: list[str] = []
    n = scene.dim
    for c in scene.cells.values():
        if c.dim != n:
            problems.append(f"cell {c.id}: dimension {c.dim} != {n}")
    for r in scene.rhos.values():
        if r.polytope.dim != n - 1:
            problems.append(f"{r.id}: dimension {r.polytope.dim} != {n - 1}")
            continue
        if not 1 <= len(r.sides) <= 2:
            problems.append(f"{r.id}: must have one or two adjacent maximal cells")
        elif len(r.sides) == 1 and not r.declared_boundary:
            problems.append(f"{r.id}: only one adjacent maximal cell but not declared a boundary cell")
        elif len(r.sides) == 2 and r.declared_boundary:
            problems.append(f"{r.id}: declared a boundary cell but has two adjacent maximal cells")
        for s in r.sides:
            if s.cell not in scene.cells:
                problems.append(f"{r.id}: unknown cell {s.cell!r}")
                continue
            if len(s.basis) != n - 1 or any(len(b) != n for b in s.basis) or len(s.normal) != n:
                problems.append(f"{r.id}/{s.cell}: embedding has wrong shape")
                continue
            if abs(det(s.frame())) != 1:
                problems.append(f"{r.id}/{s.cell}: tangent basis and normal are not unimodular")
            cell = scene.cells[s.cell].polytope
            image = [s.point(v) for v in r.polytope.vertices]
            facet = cell.facet_of(image)
            if facet is None:
                problems.append(f"{r.id}/{s.cell}: image is not contained in a facet")
            elif dot(facet[0], s.normal) <= 0:
                problems.append(f"{r.id}/{s.cell}: normal does not point into the cell")
        for pc in r.pieces:
            if not all(r.polytope.contains(v) for v in pc.polytope.vertices):
                problems.append(f"{r.id}/{pc.id}: piece is not contained in the cell")
            if not r.boundary:
                k = scene.kinks.get((r.id, pc.id))
                if k is None:
                    problems.append(f"{r.id}/{pc.id}: missing kink")
                elif k <= 0:
                    problems.append(f"{r.id}/{pc.id}: kink {k} is not positive")
            if pc.normal_image is not None and not r.boundary:
                s1 = r.sides[1]
                if abs(det(_frame(s1.basis, pc.normal_image))) != 1:
                    problems.append(f"{r.id}/{pc.id}: transition normal is not unimodular")
    for (rho, piece) in scene.kinks:
        if rho not in scene.rhos:
            problems.append(f"kink on unknown cell {rho!r}")
    for (cell, rho, piece), vals in scene.gluing.items():
        if rho not in scene.rhos or cell not in scene.cells:
            problems.append(f"gluing data on unknown cells {cell}/{rho}")
        elif len(vals) != n:
            problems.append(f"gluing data {cell}/{rho}/{piece} needs {n} values")
    for s in scene.slabs:
        if s.rho not in scene.rhos:
            problems.append(f"slab {s.id}: unknown cell {s.rho!r}")
            continue
        if s.piece not in {p.id for p in scene.rhos[s.rho].pieces}:
            problems.append(f"slab {s.id}: unknown piece {s.piece!r}")
        if not s.function.terms:
            problems.append(f"slab {s.id}: zero function")
        if scene.rhos[s.rho].boundary:
            problems.append(f"slab {s.id}: lies on a boundary cell")
        missing = {name for key in s.function.terms for name, _ in key[2]} - set(scene.params)
        if s.function.ring.t_name != "t" and s.function.ring.t_name not in scene.params:
            missing.add(s.function.ring.t_name)
        if missing:
            problems.append(f"slab {s.id}: no numerical values for {sorted(missing)}")
    for w in scene.walls:
        if w.cell not in scene.cells:
            problems.append(f"wall {w.id}: unknown cell {w.cell!r}")
            continue
        problems.extend(w.problems())
        poly = scene.cells[w.cell].polytope
        if not all(poly.contains(v) for v in w.carrier.vertices):
            problems.append(f"wall {w.id}: carrier leaves its cell")
    if not scene.oriented:
        problems.append("scene is not oriented (a co-orientation of every codimension-one cell is required)")
    return problems


def _frame(basis, normal) -> IntMatrix:
    cols = list(basis) + [normal]
    n = len(normal)
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))
