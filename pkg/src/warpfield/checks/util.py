"""Shared helpers for the registered checks."""

from __future__ import annotations

import numpy as np

from ..connections import Geometry
from ..fieldexpr import eval_expr
from ..fields import ProductField, VectorFieldDef, lift
from ..jets import Jet2, Point
from ..metric import ProductStructure


def embed(ps: ProductStructure, block, vec: np.ndarray) -> np.ndarray:
    out = np.zeros(ps.total_dim)
    out[ps.block_slice(block)] = vec
    return out


def rehome(vfd: VectorFieldDef) -> ProductField:
    """View a lifted field as a field on its own block's structure."""
    return lift(VectorFieldDef("base", vfd.components))


def warp_jet(ps: ProductStructure, i: int, p: Point) -> Jet2:
    j = eval_expr(ps.warps[i], ps.jet_env(p))
    if not isinstance(j, Jet2):
        j = Jet2.constant(j, ps.total_dim)
    return j


def second_directional(fj, jet: Jet2) -> tuple[float, float]:
    """(zeta(h), zeta(zeta(h))) for a field with jet data fj."""
    first = float(fj.val @ jet.grad)
    dfirst = fj.d @ jet.grad + jet.hess @ fj.val
    return first, float(fj.val @ dfirst)


def project_out(ps: ProductStructure, geom_block: Geometry, p_block: Point,
                vec_block: np.ndarray, against_block: np.ndarray) -> np.ndarray | None:
    """Component of vec g-orthogonal to ``against`` inside one block.

    Returns None when ``against`` is null there (cannot project).
    """
    g = geom_block.metric(p_block).g
    denom = float(against_block @ g @ against_block)
    if abs(denom) < 1e-12:
        return None
    coef = float(vec_block @ g @ against_block) / denom
    return vec_block - coef * against_block


def max_entry(m: np.ndarray) -> float:
    return float(np.max(np.abs(m)))
