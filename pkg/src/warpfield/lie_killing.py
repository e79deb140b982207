"""Lie derivatives of the metric and the Killing-type residual checks.

Two independent evaluation routes are kept side by side everywhere:

* the connection route, ``g(nabla_X zeta, Y) + g(nabla_Y zeta, X)``, and
  its second-order analogue built from nested covariant derivatives;
* the coordinate route, ``zeta^c d_c g_ab + d_a zeta^c g_cb +
  d_b zeta^c g_ac``, applied once or twice.

The residual checks aggregate over coordinate-basis pairs, which is
complete for a symmetric bilinear form; random test vectors are kept for
the quadratic-form reformulations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connections import (
    LEVI_CIVITA,
    SEMI_SYMMETRIC,
    Geometry,
    as_field_jet,
    covariant_derivative,
)
from .curvature import riemann, riemann_quad
from .jets import Point
from .sampling import SplitMix

KILLING = "killing"
SSM_KILLING = "ssm_killing"
TWO_KILLING = "two_killing"


@dataclass(frozen=True)
class KillingResidual:
    kind: str
    max_abs: float
    mean_abs: float
    samples: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_abs <= self.tolerance

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def _nabla_grid(geom: Geometry, zeta, p: Point, kind: str) -> np.ndarray:
    """w[a, k] = (nabla_{e_a} zeta)^k for the chosen connection."""
    zj = as_field_jet(geom, zeta, p)
    gamma = geom.gamma_of(p, kind)
    return zj.d + np.einsum("kaj,j->ak", gamma, zj.val)


def lie_matrix(geom: Geometry, zeta, p: Point) -> np.ndarray:
    """(L_zeta g)(e_a, e_b) from the Levi-Civita route."""
    wg = _nabla_grid(geom, zeta, p, LEVI_CIVITA) @ geom.metric(p).g
    return wg + wg.T


def ssm_lie_matrix(geom: Geometry, zeta, p: Point) -> np.ndarray:
    """Shifted-connection Lie derivative of g on the coordinate basis."""
    wg = _nabla_grid(geom, zeta, p, SEMI_SYMMETRIC) @ geom.metric(p).g
    return wg + wg.T


def lie_metric(geom: Geometry, zeta, x, y, p: Point,
               kind: str = LEVI_CIVITA) -> float:
    """g(nabla_x zeta, y) + g(nabla_y zeta, x) for constant x, y."""
    g = geom.metric(p).g
    xv = geom.field_values(x, p)
    yv = geom.field_values(y, p)
    dx = covariant_derivative(geom, xv, zeta, p, kind)
    dy = covariant_derivative(geom, yv, zeta, p, kind)
    return float(dx @ g @ yv + dy @ g @ xv)


def lie_matrix_direct(geom: Geometry, zeta, p: Point) -> np.ndarray:
    """Coordinate-route (L_zeta g)_ab; independent of the connection code."""
    mj = geom.metric_jet(p)
    zj = as_field_jet(geom, zeta, p)
    return (np.einsum("c,cab->ab", zj.val, mj.dg)
            + zj.d @ mj.g
            + (zj.d @ mj.g).T)


def _lie_of_tensor(h: np.ndarray, dh: np.ndarray, zj) -> np.ndarray:
    """One coordinate-route Lie step applied to a 2-tensor with jets."""
    return (np.einsum("c,cab->ab", zj.val, dh)
            + np.einsum("ac,cb->ab", zj.d, h)
            + np.einsum("bc,ac->ab", zj.d, h))


def lie_lie_matrix_nested(geom: Geometry, zeta, p: Point) -> np.ndarray:
    """(L_zeta L_zeta g)_ab by applying the coordinate formula twice."""
    mj = geom.metric_jet(p)
    zj = as_field_jet(geom, zeta, p)
    h = (np.einsum("c,cab->ab", zj.val, mj.dg)
         + zj.d @ mj.g
         + (zj.d @ mj.g).T)
    dh = (np.einsum("mc,cab->mab", zj.d, mj.dg)
          + np.einsum("c,mcab->mab", zj.val, mj.d2g)
          + np.einsum("mac,cb->mab", zj.d2, mj.g)
          + np.einsum("ac,mcb->mab", zj.d, mj.dg)
          + np.einsum("mbc,ac->mab", zj.d2, mj.g)
          + np.einsum("bc,mac->mab", zj.d, mj.dg))
    return _lie_of_tensor(h, dh, zj)


def lie_lie_matrix(geom: Geometry, zeta, p: Point) -> np.ndarray:
    """Second Lie derivative of g from nested covariant derivatives.

    With x, y extended as coordinate fields:
      (L L g)(x, y) = g(nabla_zeta nabla_x zeta - nabla_[zeta,x] zeta, y)
                      + (x <-> y) + 2 g(nabla_x zeta, nabla_y zeta).
    """
    mj = geom.metric_jet(p)
    zj = as_field_jet(geom, zeta, p)
    gamma, dgamma = geom.christoffel_jet(p)

    # w[a, k] = (nabla_{e_a} zeta)^k and its partials dw[m, a, k]
    w = zj.d + np.einsum("kaj,j->ak", gamma, zj.val)
    dw = (np.einsum("mak->mak", zj.d2)
          + np.einsum("mkaj,j->mak", dgamma, zj.val)
          + np.einsum("kaj,mj->mak", gamma, zj.d))

    # nabla_zeta w_a
    nzw = (np.einsum("m,mak->ak", zj.val, dw)
           + np.einsum("kmj,m,aj->ak", gamma, zj.val, w))
    # v_a = [zeta, e_a] = -d_a zeta; nabla_{v_a} zeta
    v = -zj.d
    nvz = (np.einsum("ai,ik->ak", v, zj.d)
           + np.einsum("kij,ai,j->ak", gamma, v, zj.val))

    g = geom.metric(p).g
    first = (nzw - nvz) @ g
    return first + first.T + 2.0 * (w @ g @ w.T)


# ---- residual checks ----


def _aggregate(kind: str, values: list[float], samples: int, tol: float) -> KillingResidual:
    arr = np.abs(np.asarray(values, dtype=float))
    return KillingResidual(
        kind=kind,
        max_abs=float(arr.max()) if arr.size else 0.0,
        mean_abs=float(arr.mean()) if arr.size else 0.0,
        samples=samples,
        tolerance=tol,
    )


def killing_residual(geom: Geometry, zeta, points: list[Point],
                     tol: float = 1e-8) -> KillingResidual:
    vals = [np.max(np.abs(lie_matrix(geom, zeta, p))) for p in points]
    return _aggregate(KILLING, vals, len(points), tol)


def ssm_killing_residual(geom: Geometry, zeta, points: list[Point],
                         tol: float = 1e-8) -> KillingResidual:
    vals = [np.max(np.abs(ssm_lie_matrix(geom, zeta, p))) for p in points]
    return _aggregate(SSM_KILLING, vals, len(points), tol)


def two_killing_residual(geom: Geometry, zeta, points: list[Point],
                         tol: float = 1e-7) -> KillingResidual:
    vals = [np.max(np.abs(lie_lie_matrix(geom, zeta, p))) for p in points]
    return _aggregate(TWO_KILLING, vals, len(points), tol)


def quadratic_form_max(geom: Geometry, zeta, points: list[Point], rng: SplitMix,
                       kind: str = LEVI_CIVITA, draws: int = 32) -> float:
    """max |g(nabla_x zeta, x)| over random test vectors (x-quantified form)."""
    worst = 0.0
    n = geom.ps.total_dim
    for p in points:
        if kind == LEVI_CIVITA:
            m = lie_matrix(geom, zeta, p)
        else:
            m = ssm_lie_matrix(geom, zeta, p)
        for _ in range(draws):
            x = np.array(rng.vector(n))
            worst = max(worst, 0.5 * abs(float(x @ m @ x)))
    return worst


@dataclass(frozen=True)
class HomothetyResult:
    homothetic: bool
    factor: float
    factor_stddev: float
    max_residual: float

    @property
    def verdict(self) -> str:
        return "homothetic" if self.homothetic else "not_homothetic"


def homothety_check(geom: Geometry, zeta, points: list[Point],
                    tol: float = 1e-8, stddev_tol: float = 1e-6) -> HomothetyResult:
    """Least-squares fit of (L_zeta g) against g; accept when the fit is
    tight at every point and the fitted factor is stable across points."""
    factors = []
    residuals = []
    for p in points:
        g = geom.metric(p).g
        m = lie_matrix(geom, zeta, p)
        denom = float(np.sum(g * g))
        c = float(np.sum(m * g)) / denom
        factors.append(c)
        residuals.append(float(np.max(np.abs(m - c * g))))
    factors = np.asarray(factors)
    mean_c = float(factors.mean())
    std_c = float(factors.std())
    max_res = float(np.max(residuals))
    ok = max_res <= tol and std_c <= stddev_tol
    return HomothetyResult(ok, mean_c, std_c, max_res)


def nabla_zeta_zeta(geom: Geometry, zeta, p: Point) -> tuple[np.ndarray, np.ndarray]:
    """The field w = nabla_zeta zeta at p: (values, partials dw[m, k])."""
    zj = as_field_jet(geom, zeta, p)
    gamma, dgamma = geom.christoffel_jet(p)
    w = zj.val @ zj.d + np.einsum("kij,i,j->k", gamma, zj.val, zj.val)
    dw = (np.einsum("i,mik->mk", zj.val, zj.d2)
          + np.einsum("mi,ik->mk", zj.d, zj.d)
          + np.einsum("mkij,i,j->mk", dgamma, zj.val, zj.val)
          + np.einsum("kij,mi,j->mk", gamma, zj.d, zj.val)
          + np.einsum("kij,i,mj->mk", gamma, zj.val, zj.d))
    return w, dw


def eq22_residual(geom: Geometry, zeta, x: np.ndarray, p: Point) -> float:
    """Gap in R(z, x, x, z) = g(nabla_x z, nabla_x z) + g(nabla_x nabla_z z, x)."""
    curv = riemann(geom, p)
    zv = geom.field_values(zeta, p)
    lhs = riemann_quad(curv, zv, x)
    g = geom.metric(p).g
    nxz = covariant_derivative(geom, x, zeta, p)
    w, dw = nabla_zeta_zeta(geom, zeta, p)
    gamma = geom.christoffel(p)
    nxw = x @ dw + np.einsum("kij,i,j->k", gamma, x, w)
    rhs = float(nxz @ g @ nxz) + float(nxw @ g @ x)
    return abs(lhs - rhs)


def constant_length_stddev(geom: Geometry, zeta, points: list[Point]) -> float:
    vals = []
    for p in points:
        zv = geom.field_values(zeta, p)
        vals.append(float(zv @ geom.metric(p).g @ zv))
    return float(np.std(np.asarray(vals)))
