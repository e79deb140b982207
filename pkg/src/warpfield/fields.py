"""Vector fields on product charts.

A :class:`VectorFieldDef` is a lifted field: it lives on one block and
its components reference only that block's coordinates, so it is the
canonical lift of a factor field to the product.  A :class:`ProductField`
is a sum of lifted fields, at most one per block, which is the shape all
the decomposition statements quantify over.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fieldexpr
from .fieldexpr import Expr, eval_expr
from .jets import Jet2, Point
from .metric import GeometryError, ProductStructure
from .sampling import SplitMix


@dataclass(frozen=True)
class VectorFieldDef:
    """Lifted field: block id ('base' or 0-based fiber index) + components."""

    block: object
    components: tuple[Expr, ...]

    def validate(self, ps: ProductStructure) -> None:
        bm = ps.block_metric(self.block)
        if len(self.components) != bm.dim:
            raise GeometryError(
                f"field on {bm.label} needs {bm.dim} components, got {len(self.components)}"
            )
        allowed = set(bm.coords)
        for c in self.components:
            extra = fieldexpr.variables_of(c) - allowed
            if extra:
                raise GeometryError(
                    f"lifted field on {bm.label} references {sorted(extra)}"
                )

    def scaled(self, c: float) -> "VectorFieldDef":
        factor = fieldexpr.num(c)
        return VectorFieldDef(
            self.block,
            tuple(fieldexpr.mul(factor, comp) for comp in self.components),
        )


@dataclass(frozen=True)
class FieldJet:
    """Component values with first and second partials on the product chart."""

    val: np.ndarray  # (n,)
    d: np.ndarray    # (n, n): d[d, k] = d_d V^k
    d2: np.ndarray   # (n, n, n): d2[d, e, k]


@dataclass(frozen=True)
class ProductField:
    parts: tuple[VectorFieldDef, ...]

    def __post_init__(self):
        blocks = [p.block for p in self.parts]
        if len(set(blocks)) != len(blocks):
            raise GeometryError("at most one lifted part per block")

    @staticmethod
    def of(*parts: VectorFieldDef) -> "ProductField":
        return ProductField(tuple(parts))

    def part(self, block) -> VectorFieldDef | None:
        for p in self.parts:
            if p.block == block:
                return p
        return None

    def scaled(self, c: float) -> "ProductField":
        return ProductField(tuple(p.scaled(c) for p in self.parts))

    def plus(self, other: "ProductField") -> "ProductField":
        return ProductField(self.parts + other.parts)

    def values(self, ps: ProductStructure, p: Point) -> np.ndarray:
        env = ps.env(p)
        out = np.zeros(ps.total_dim)
        for part in self.parts:
            sl = ps.block_slice(part.block)
            for k, comp in enumerate(part.components):
                out[sl.start + k] = float(eval_expr(comp, env))
        return out

    def jet(self, ps: ProductStructure, p: Point) -> FieldJet:
        env = ps.jet_env(p)
        n = ps.total_dim
        val = np.zeros(n)
        d = np.zeros((n, n))
        d2 = np.zeros((n, n, n))
        for part in self.parts:
            sl = ps.block_slice(part.block)
            for k, comp in enumerate(part.components):
                j = eval_expr(comp, env)
                if not isinstance(j, Jet2):
                    j = Jet2.constant(j, n)
                col = sl.start + k
                val[col] = j.value
                d[:, col] = j.grad
                d2[:, :, col] = j.hess
        return FieldJet(val=val, d=d, d2=d2)


def lift(vfd: VectorFieldDef) -> ProductField:
    return ProductField.of(vfd)


def synth_field(ps: ProductStructure, block, rng: SplitMix, degree: int = 2) -> VectorFieldDef:
    """Deterministic random polynomial field on one block (generic test data)."""
    bm = ps.block_metric(block)
    comps = []
    for _ in range(bm.dim):
        terms = [fieldexpr.num(round(rng.symmetric(), 3))]
        for name in bm.coords:
            terms.append(fieldexpr.mul(fieldexpr.num(round(rng.symmetric(), 3)),
                                       fieldexpr.var(name)))
        if degree >= 2:
            names = list(bm.coords)
            for i in range(len(names)):
                for j in range(i, len(names)):
                    coeff = fieldexpr.num(round(0.5 * rng.symmetric(), 3))
                    terms.append(fieldexpr.mul(
                        coeff,
                        fieldexpr.mul(fieldexpr.var(names[i]), fieldexpr.var(names[j])),
                    ))
        expr = terms[0]
        for t in terms[1:]:
            expr = fieldexpr.add(expr, t)
        comps.append(expr)
    return VectorFieldDef(block, tuple(comps))
