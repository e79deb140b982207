"""Block metrics and multiply warped product assembly.

A product structure is a base block plus zero or more fiber blocks, each
fiber scaled by the square of a positive warping function of the base
coordinates.  The assembled metric is exactly block-diagonal: off-block
entries are never computed, and the inverse is taken block by block, so
both stay identically zero off the blocks.

Charts are open coordinate boxes.  Sampling draws from a 10%-inset
sub-box, which keeps evaluation away from chart boundaries (sphere-chart
poles, cube-root singularities pushed to the edge, ...).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fieldexpr
from .fieldexpr import Expr, eval_expr
from .jets import Jet2, Point
from .sampling import SplitMix


class GeometryError(ValueError):
    pass


class SingularMetric(GeometryError):
    pass


class NonPositiveWarping(GeometryError):
    pass


class DimensionMismatch(GeometryError):
    pass


DET_FLOOR = 1e-10


@dataclass(frozen=True)
class BlockMetric:
    """One factor: named coordinates, symmetric metric entries, chart box."""

    label: str
    coords: tuple[str, ...]
    entries: tuple[tuple[Expr, ...], ...]
    box: tuple[tuple[float, float], ...]

    def __post_init__(self):
        d = len(self.coords)
        if len(self.entries) != d or any(len(row) != d for row in self.entries):
            raise DimensionMismatch(f"block {self.label}: entries must be {d}x{d}")
        if len(self.box) != d:
            raise DimensionMismatch(f"block {self.label}: box must cover {d} coordinates")
        for i in range(d):
            for j in range(d):
                if self.entries[i][j] != self.entries[j][i]:
                    raise GeometryError(
                        f"block {self.label}: entries not symmetric at ({i},{j})"
                    )
        for name, (lo, hi) in zip(self.coords, self.box):
            if not lo < hi:
                raise GeometryError(f"block {self.label}: empty box for {name}")
        for row in self.entries:
            for e in row:
                extra = fieldexpr.variables_of(e) - set(self.coords)
                if extra:
                    raise GeometryError(
                        f"block {self.label}: metric entry references {sorted(extra)}"
                    )

    @property
    def dim(self) -> int:
        return len(self.coords)

    def matrix(self, env: dict) -> np.ndarray:
        d = self.dim
        out = np.empty((d, d), dtype=object if _is_jet_env(env, self.coords) else float)
        for i in range(d):
            for j in range(i, d):
                v = eval_expr(self.entries[i][j], env)
                out[i, j] = v
                out[j, i] = v
        return out

    def center(self) -> Point:
        return Point(tuple(0.5 * (lo + hi) for lo, hi in self.box))


def _is_jet_env(env: dict, names) -> bool:
    for name in names:
        return isinstance(env.get(name), Jet2)
    return False


def diagonal_block(label: str, coords, diag_exprs, box) -> BlockMetric:
    d = len(coords)
    zero = fieldexpr.num(0.0)
    entries = tuple(
        tuple(diag_exprs[i] if i == j else zero for j in range(d)) for i in range(d)
    )
    return BlockMetric(label, tuple(coords), entries, tuple(box))


@dataclass(frozen=True)
class ProductStructure:
    """Base x fiber_1 x ... x fiber_m with fiber metrics scaled by warp^2."""

    base: BlockMetric
    fibers: tuple[BlockMetric, ...] = ()
    warps: tuple[Expr, ...] = ()
    coord_names: tuple[str, ...] = field(init=False)
    slices: tuple[slice, ...] = field(init=False)  # base first, then fibers

    def __post_init__(self):
        if len(self.warps) != len(self.fibers):
            raise GeometryError("need exactly one warping per fiber")
        names: list[str] = list(self.base.coords)
        slices = [slice(0, self.base.dim)]
        offset = self.base.dim
        for f in self.fibers:
            slices.append(slice(offset, offset + f.dim))
            names.extend(f.coords)
            offset += f.dim
        if len(set(names)) != len(names):
            raise GeometryError("coordinate names must be unique across blocks")
        for w in self.warps:
            extra = fieldexpr.variables_of(w) - set(self.base.coords)
            if extra:
                raise GeometryError(f"warping references non-base coordinates {sorted(extra)}")
        object.__setattr__(self, "coord_names", tuple(names))
        object.__setattr__(self, "slices", tuple(slices))

    @property
    def total_dim(self) -> int:
        return len(self.coord_names)

    @property
    def blocks(self) -> tuple[BlockMetric, ...]:
        return (self.base,) + self.fibers

    @property
    def box(self) -> tuple[tuple[float, float], ...]:
        out: list[tuple[float, float]] = []
        for b in self.blocks:
            out.extend(b.box)
        return tuple(out)

    @staticmethod
    def single(block: BlockMetric) -> "ProductStructure":
        return ProductStructure(base=block)

    def fiber_structure(self, i: int) -> "ProductStructure":
        return ProductStructure(base=self.fibers[i])

    def base_structure(self) -> "ProductStructure":
        return ProductStructure(base=self.base)

    # block ids: 'base' or 0-based fiber index
    def block_slice(self, block) -> slice:
        if block == "base":
            return self.slices[0]
        return self.slices[int(block) + 1]

    def block_metric(self, block) -> BlockMetric:
        if block == "base":
            return self.base
        return self.fibers[int(block)]

    def block_point(self, p: Point, block) -> Point:
        return Point(tuple(p.coords[self.block_slice(block)]))

    def env(self, p: Point) -> dict:
        self._check_point(p)
        return dict(zip(self.coord_names, p.coords))

    def jet_env(self, p: Point) -> dict:
        self._check_point(p)
        return {name: Jet2.seed(p, k) for k, name in enumerate(self.coord_names)}

    def _check_point(self, p: Point):
        if p.dim != self.total_dim:
            raise DimensionMismatch(
                f"point has {p.dim} coordinates, chart has {self.total_dim}"
            )

    def warp_values(self, p: Point) -> tuple[float, ...]:
        env = self.env(p)
        vals = []
        for w, f in zip(self.warps, self.fibers):
            v = float(eval_expr(w, env))
            if v <= 0.0:
                raise NonPositiveWarping(
                    f"warping for {f.label} evaluates to {v} at {p.coords}"
                )
            vals.append(v)
        return tuple(vals)

    def metric_at(self, p: Point) -> "MetricAt":
        env = self.env(p)
        n = self.total_dim
        g = np.zeros((n, n))
        ginv = np.zeros((n, n))
        sl = self.slices[0]
        base_m = self.base.matrix(env).astype(float)
        g[sl, sl] = base_m
        ginv[sl, sl] = _block_inverse(base_m, self.base.label)
        warp_vals = self.warp_values(p)
        for i, f in enumerate(self.fibers):
            sl = self.slices[i + 1]
            fm = f.matrix(env).astype(float) * warp_vals[i] ** 2
            g[sl, sl] = fm
            ginv[sl, sl] = _block_inverse(fm, f.label)
        return MetricAt(g=g, ginv=ginv, point=p)

    def metric_jet(self, p: Point) -> "MetricJet":
        env = self.jet_env(p)
        n = self.total_dim
        g = np.zeros((n, n))
        dg = np.zeros((n, n, n))
        d2g = np.zeros((n, n, n, n))

        def put(sl, jets_matrix):
            d = jets_matrix.shape[0]
            for a in range(d):
                for b in range(a, d):
                    jet = jets_matrix[a, b]
                    if not isinstance(jet, Jet2):
                        jet = Jet2.constant(jet, n)
                    ia, ib = sl.start + a, sl.start + b
                    g[ia, ib] = g[ib, ia] = jet.value
                    dg[:, ia, ib] = dg[:, ib, ia] = jet.grad
                    d2g[:, :, ia, ib] = d2g[:, :, ib, ia] = jet.hess

        put(self.slices[0], self.base.matrix(env))
        for i, f in enumerate(self.fibers):
            w = eval_expr(self.warps[i], env)
            if not isinstance(w, Jet2):
                w = Jet2.constant(w, n)
            if w.value <= 0.0:
                raise NonPositiveWarping(
                    f"warping for {f.label} evaluates to {w.value} at {p.coords}"
                )
            w2 = w * w
            fm = f.matrix(env)
            scaled = np.empty_like(fm)
            d = f.dim
            for a in range(d):
                for b in range(d):
                    e = fm[a, b]
                    if not isinstance(e, Jet2):
                        e = Jet2.constant(e, n)
                    scaled[a, b] = w2 * e
            put(self.slices[i + 1], scaled)

        ginv = np.zeros((n, n))
        for sl in self.slices:
            ginv[sl, sl] = _block_inverse(g[sl, sl], "block")
        dginv = -np.einsum("ka,dab,bl->dkl", ginv, dg, ginv)
        return MetricJet(g=g, dg=dg, d2g=d2g, ginv=ginv, dginv=dginv, point=p)

    def signature(self, p: Point) -> tuple[int, ...]:
        """Signs of the metric eigenvalues, block by block (+1/-1)."""
        m = self.metric_at(p)
        signs: list[int] = []
        for sl in self.slices:
            vals = np.linalg.eigvalsh(m.g[sl, sl])
            if np.any(np.abs(vals) <= DET_FLOOR):
                raise SingularMetric(f"near-zero metric eigenvalue at {p.coords}")
            signs.extend(1 if v > 0 else -1 for v in vals)
        return tuple(signs)


def _block_inverse(m: np.ndarray, label: str) -> np.ndarray:
    det = float(np.linalg.det(m))
    if abs(det) <= DET_FLOOR:
        raise SingularMetric(f"singular metric block {label} (det={det})")
    return np.linalg.inv(m)


@dataclass(frozen=True)
class MetricAt:
    g: np.ndarray
    ginv: np.ndarray
    point: Point


@dataclass(frozen=True)
class MetricJet:
    g: np.ndarray       # (n, n)
    dg: np.ndarray      # (n, n, n): dg[d, i, j] = d_d g_ij
    d2g: np.ndarray     # (n, n, n, n): d2g[d, e, i, j]
    ginv: np.ndarray
    dginv: np.ndarray   # (n, n, n)
    point: Point


def inner(gm: MetricAt, x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = gm.g.shape[0]
    if x.shape != (n,) or y.shape != (n,):
        raise DimensionMismatch(f"vectors must have {n} components")
    return float(x @ gm.g @ y)


def grad_scalar(ps: ProductStructure, p: Point, h: Expr) -> np.ndarray:
    """Index-raised gradient: (grad h)^k = g^{kl} d_l h on ps's chart."""
    env = ps.jet_env(p)
    extra = fieldexpr.variables_of(h) - set(ps.coord_names)
    if extra:
        raise GeometryError(f"scalar references unknown coordinates {sorted(extra)}")
    j = eval_expr(h, env)
    if not isinstance(j, Jet2):
        return np.zeros(ps.total_dim)
    gm = ps.metric_at(p)
    return gm.ginv @ j.grad


def sample_points(
    ps: ProductStructure,
    count: int,
    rng: SplitMix,
    exclusions: dict[str, list[tuple[float, float]]] | None = None,
) -> list[Point]:
    """Deterministic points from the 10%-inset sub-box, avoiding exclusions."""
    exclusions = exclusions or {}
    box = ps.box
    names = ps.coord_names
    out: list[Point] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 200 * count + 1000:
            raise GeometryError("sampling rejected too many points; check exclusions")
        coords = []
        ok = True
        for name, (lo, hi) in zip(names, box):
            u = rng.uniform()
            v = lo + (0.1 + 0.8 * u) * (hi - lo)
            for (xlo, xhi) in exclusions.get(name, ()):
                if xlo <= v <= xhi:
                    ok = False
            coords.append(v)
        if ok:
            out.append(Point(tuple(coords)))
    return out
