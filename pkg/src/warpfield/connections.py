"""Connections on a product chart.

The Levi-Civita symbols come from the coordinate formula applied to the
metric jets; one extra differentiation level of the same jets yields
their first partials, which is all the curvature layer needs.  The
torsion-carrying metric connection is the Levi-Civita connection shifted
by a fixed vector field P:

    shifted(X, Y) = lc(X, Y) + pi(Y) X - g(X, Y) P,   pi(.) = g(., P)

which in index form adds ``delta^k_i pi_j - g_ij P^k`` to the symbols.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import FieldJet, ProductField, VectorFieldDef, lift
from .jets import Point
from .metric import DimensionMismatch, MetricAt, MetricJet, ProductStructure

LEVI_CIVITA = "levi_civita"
SEMI_SYMMETRIC = "semi_symmetric"


@dataclass(frozen=True)
class TorsionSpec:
    """Location and components of the connection-shift field P."""

    location: object  # 'zero' | 'base' | 0-based fiber index
    field: VectorFieldDef | None = None

    def __post_init__(self):
        if self.location == "zero":
            if self.field is not None:
                raise ValueError("zero torsion carries no field")
        else:
            if self.field is None:
                raise ValueError("non-zero torsion needs a field")
            if self.field.block != self.location:
                raise ValueError("torsion field must live on its declared block")

    @staticmethod
    def zero() -> "TorsionSpec":
        return TorsionSpec("zero", None)

    @property
    def is_zero(self) -> bool:
        return self.location == "zero"

    def validate(self, ps: ProductStructure) -> None:
        if self.is_zero:
            return
        if self.location != "base":
            idx = int(self.location)
            if not 0 <= idx < len(ps.fibers):
                raise DimensionMismatch(f"torsion fiber index {idx} out of range")
        self.field.validate(ps)

    def restrict_to_block(self) -> "TorsionSpec":
        """The same P viewed on its own block as a standalone manifold."""
        if self.is_zero:
            return self
        return TorsionSpec("base", VectorFieldDef("base", self.field.components))


class Geometry:
    """Per-structure cache of pointwise metric/connection/field data."""

    def __init__(self, ps: ProductStructure, torsion: TorsionSpec | None = None):
        self.ps = ps
        self.torsion = torsion if torsion is not None else TorsionSpec.zero()
        self.torsion.validate(ps)
        self._metric: dict = {}
        self._metric_jet: dict = {}
        self._gamma: dict = {}
        self._gamma_jet: dict = {}
        self._ssm: dict = {}
        self._field_jets: dict = {}

    def metric(self, p: Point) -> MetricAt:
        got = self._metric.get(p.coords)
        if got is None:
            got = self._metric.setdefault(p.coords, self.ps.metric_at(p))
        return got

    def metric_jet(self, p: Point) -> MetricJet:
        got = self._metric_jet.get(p.coords)
        if got is None:
            got = self._metric_jet.setdefault(p.coords, self.ps.metric_jet(p))
        return got

    def christoffel(self, p: Point) -> np.ndarray:
        """Levi-Civita symbols gamma[k, i, j] at p."""
        got = self._gamma.get(p.coords)
        if got is None:
            mj = self.metric_jet(p)
            # t[l, i, j] = d_i g_jl + d_j g_il - d_l g_ij
            tlij = (np.einsum("ijl->lij", mj.dg)
                    + np.einsum("jil->lij", mj.dg)
                    - mj.dg)
            got = 0.5 * np.einsum("kl,lij->kij", mj.ginv, tlij)
            self._gamma[p.coords] = got
        return got

    def christoffel_jet(self, p: Point) -> tuple[np.ndarray, np.ndarray]:
        """(gamma[k,i,j], dgamma[d,k,i,j]) at p."""
        got = self._gamma_jet.get(p.coords)
        if got is None:
            mj = self.metric_jet(p)
            tlij = (np.einsum("ijl->lij", mj.dg)
                    + np.einsum("jil->lij", mj.dg)
                    - mj.dg)
            gamma = 0.5 * np.einsum("kl,lij->kij", mj.ginv, tlij)
            # dt[d, l, i, j] = d_d (d_i g_jl + d_j g_il - d_l g_ij)
            dt = (np.einsum("dijl->dlij", mj.d2g)
                  + np.einsum("djil->dlij", mj.d2g)
                  - mj.d2g)
            dgamma = 0.5 * (np.einsum("dkl,lij->dkij", mj.dginv, tlij)
                            + np.einsum("kl,dlij->dkij", mj.ginv, dt))
            got = (gamma, dgamma)
            self._gamma_jet[p.coords] = got
        return got

    # ---- torsion field data ----

    def p_vector(self, p: Point) -> np.ndarray:
        if self.torsion.is_zero:
            return np.zeros(self.ps.total_dim)
        return lift(self.torsion.field).values(self.ps, p)

    def pi_covector(self, p: Point) -> np.ndarray:
        return self.metric(p).g @ self.p_vector(p)

    def pi_of(self, p: Point, x: np.ndarray) -> float:
        return float(np.asarray(x, dtype=float) @ self.pi_covector(p))

    def ssm_gamma(self, p: Point) -> np.ndarray:
        """Symbols of the shifted metric connection at p."""
        got = self._ssm.get(p.coords)
        if got is None:
            gamma = self.christoffel(p).copy()
            if not self.torsion.is_zero:
                n = self.ps.total_dim
                pv = self.p_vector(p)
                piv = self.pi_covector(p)
                gm = self.metric(p)
                gamma = (gamma
                         + np.einsum("ki,j->kij", np.eye(n), piv)
                         - np.einsum("ij,k->kij", gm.g, pv))
            self._ssm[p.coords] = gamma
            got = gamma
        return got

    def gamma_of(self, p: Point, kind: str) -> np.ndarray:
        if kind == LEVI_CIVITA:
            return self.christoffel(p)
        if kind == SEMI_SYMMETRIC:
            return self.ssm_gamma(p)
        raise ValueError(f"unknown connection kind {kind!r}")

    def field_jet(self, field: ProductField, p: Point) -> FieldJet:
        key = (field, p.coords)
        got = self._field_jets.get(key)
        if got is None:
            got = self._field_jets.setdefault(key, field.jet(self.ps, p))
        return got

    def field_values(self, field, p: Point) -> np.ndarray:
        if isinstance(field, ProductField):
            return self.field_jet(field, p).val
        return np.asarray(field, dtype=float)


def as_field_jet(geom: Geometry, field, p: Point) -> FieldJet:
    if isinstance(field, ProductField):
        return geom.field_jet(field, p)
    vec = np.asarray(field, dtype=float)
    n = geom.ps.total_dim
    if vec.shape != (n,):
        raise DimensionMismatch(f"vector must have {n} components")
    return FieldJet(val=vec, d=np.zeros((n, n)), d2=np.zeros((n, n, n)))


def covariant_derivative(
    geom: Geometry, x, z, p: Point, kind: str = LEVI_CIVITA
) -> np.ndarray:
    """(nabla_x z)^k = x^i d_i z^k + gamma^k_ij x^i z^j at p.

    ``x`` and ``z`` are product fields or constant chart vectors; a
    constant vector is the coordinate extension with zero derivatives.
    """
    xv = geom.field_values(x, p)
    zj = as_field_jet(geom, z, p)
    gamma = geom.gamma_of(p, kind)
    return xv @ zj.d + np.einsum("kij,i,j->k", gamma, xv, zj.val)


def lie_bracket(geom: Geometry, x, y, p: Point) -> np.ndarray:
    """[x, y]^k = x^i d_i y^k - y^i d_i x^k at p."""
    xj = as_field_jet(geom, x, p)
    yj = as_field_jet(geom, y, p)
    return xj.val @ yj.d - yj.val @ xj.d


def torsion_of(geom: Geometry, x, y, p: Point, kind: str = SEMI_SYMMETRIC) -> np.ndarray:
    """nabla_x y - nabla_y x - [x, y] at p."""
    return (covariant_derivative(geom, x, y, p, kind)
            - covariant_derivative(geom, y, x, p, kind)
            - lie_bracket(geom, x, y, p))


def compat_residual(geom: Geometry, p: Point, x, y, z,
                    kind: str = SEMI_SYMMETRIC) -> float:
    """|x(g(y,z)) - g(nabla_x y, z) - g(y, nabla_x z)| for constant y, z."""
    mj = geom.metric_jet(p)
    xv = geom.field_values(x, p)
    yv = geom.field_values(y, p)
    zv = geom.field_values(z, p)
    lead = np.einsum("d,dij,i,j->", xv, mj.dg, yv, zv)
    dy = covariant_derivative(geom, xv, yv, p, kind)
    dz = covariant_derivative(geom, xv, zv, p, kind)
    return abs(float(lead - dy @ mj.g @ zv - yv @ mj.g @ dz))


def divergence(geom: Geometry, field: ProductField, p: Point) -> float:
    """div V = d_k V^k + gamma^k_km V^m (Levi-Civita trace of nabla V)."""
    fj = as_field_jet(geom, field, p)
    gamma = geom.christoffel(p)
    return float(np.trace(fj.d) + np.einsum("kkm,m->", gamma, fj.val))
