"""Identity checks: connection decompositions, Lie-derivative
decompositions and the frame-trace formula, each comparing a
product-level computation against an independently assembled
factor-level right-hand side."""

from __future__ import annotations

import numpy as np

from ..connections import (
    LEVI_CIVITA,
    SEMI_SYMMETRIC,
    compat_residual,
    covariant_derivative,
    divergence,
    torsion_of,
)
from ..curvature import frame_of_matrix, trace_nabla
from ..fields import ProductField, lift
from ..lie_killing import (
    lie_lie_matrix,
    lie_lie_matrix_nested,
    lie_matrix,
    lie_matrix_direct,
    ssm_lie_matrix,
)
from ..suite import CheckSpec, Outcome, RunContext, residual_outcome
from .util import embed, max_entry, rehome, second_directional, warp_jet


def _has_fibers(mf):
    return len(mf.structure.fibers) >= 1


def _multi_fiber(mf):
    return len(mf.structure.fibers) >= 2


def _torsion_base(mf):
    return mf.torsion.location == "base"


def _torsion_fiber(mf):
    return isinstance(mf.torsion.location, int)


# ---- section 2 axioms ----


def _axiom_torsion(ctx: RunContext) -> Outcome:
    geom = ctx.geom
    rng = ctx.rng("axiom-torsion")
    n = ctx.ps.total_dim
    pts = ctx.points()
    vals = []
    draws = max(1, 256 // len(pts))
    count = 0
    for p in pts:
        for _ in range(draws):
            x = np.array(rng.vector(n))
            y = np.array(rng.vector(n))
            t = torsion_of(geom, x, y, p)
            expected = geom.pi_of(p, y) * x - geom.pi_of(p, x) * y
            vals.append(max_entry(t - expected))
            count += 1
    return residual_outcome(vals, ctx.tol.alg, samples=count)


def _axiom_compat(ctx: RunContext) -> Outcome:
    geom = ctx.geom
    rng = ctx.rng("axiom-compat")
    n = ctx.ps.total_dim
    pts = ctx.points()
    vals = []
    draws = max(1, 256 // len(pts))
    count = 0
    for p in pts:
        for _ in range(draws):
            x = np.array(rng.vector(n))
            y = np.array(rng.vector(n))
            z = np.array(rng.vector(n))
            vals.append(compat_residual(geom, p, x, y, z, kind=SEMI_SYMMETRIC))
            count += 1
    return residual_outcome(vals, ctx.tol.alg, samples=count)


# ---- connection decomposition items ----
# Item evaluators return the max residual at one point; the registered
# checks aggregate them over the sample set.


class _Decomp:
    """Synthesized lifted test fields and factor geometries for one run."""

    def __init__(self, ctx: RunContext, label: str):
        self.ctx = ctx
        self.ps = ctx.ps
        self.xb = ctx.synth("base", label + ":XB")
        self.yb = ctx.synth("base", label + ":YB")
        self.xi = [ctx.synth(i, f"{label}:X{i}") for i in range(len(self.ps.fibers))]
        self.yi = [ctx.synth(i, f"{label}:Y{i}") for i in range(len(self.ps.fibers))]

    def fiber_pairs(self):
        return list(range(len(self.ps.fibers)))


def _grad_warp(ctx: RunContext, i: int, p) -> np.ndarray:
    """Product-level index-raised gradient of the i-th warp (base block)."""
    wj = warp_jet(ctx.ps, i, p)
    gm = ctx.geom.metric(p)
    return gm.ginv @ wj.grad


def _item_base_base(ctx, d: _Decomp, p, kind: str, base_geom) -> float:
    lhs = covariant_derivative(ctx.geom, lift(d.xb), lift(d.yb), p, kind)
    pb = ctx.ps.block_point(p, "base")
    if kind == SEMI_SYMMETRIC and _torsion_fiber(ctx.mf):
        # base part shifts by -g_B(XB, YB) P when the shift lives on a fiber
        gb = base_geom.metric(pb).g
        sl = ctx.ps.block_slice("base")
        xbv = ctx.geom.field_values(lift(d.xb), p)[sl]
        ybv = ctx.geom.field_values(lift(d.yb), p)[sl]
        full = (embed(ctx.ps, "base",
                      covariant_derivative(base_geom, rehome(d.xb), rehome(d.yb),
                                           pb, LEVI_CIVITA))
                - float(xbv @ gb @ ybv) * ctx.geom.p_vector(p))
    else:
        full = embed(ctx.ps, "base",
                     covariant_derivative(base_geom, rehome(d.xb), rehome(d.yb),
                                          pb, kind))
    return max_entry(lhs - full)


def _item_mixed(ctx, d: _Decomp, p, kind: str) -> float:
    """nabla_{XB} Yi against the warp-ratio formula (plus fiber-shift term)."""
    worst = 0.0
    xbv = ctx.geom.field_values(lift(d.xb), p)
    for i in d.fiber_pairs():
        lhs = covariant_derivative(ctx.geom, lift(d.xb), lift(d.yi[i]), p, kind)
        wj = warp_jet(ctx.ps, i, p)
        yiv = ctx.geom.field_values(lift(d.yi[i]), p)
        rhs = (float(xbv @ wj.grad) / wj.value) * yiv
        if kind == SEMI_SYMMETRIC and _torsion_fiber(ctx.mf):
            rhs = rhs + ctx.geom.pi_of(p, yiv) * xbv
        worst = max(worst, max_entry(lhs - rhs))
    return worst


def _item_mixed_swapped(ctx, d: _Decomp, p, kind: str) -> float:
    """nabla_{Yi} XB against the warp-ratio formula (plus base-shift term)."""
    worst = 0.0
    xbv = ctx.geom.field_values(lift(d.xb), p)
    for i in d.fiber_pairs():
        lhs = covariant_derivative(ctx.geom, lift(d.yi[i]), lift(d.xb), p, kind)
        wj = warp_jet(ctx.ps, i, p)
        yiv = ctx.geom.field_values(lift(d.yi[i]), p)
        coeff = float(xbv @ wj.grad) / wj.value
        if kind == SEMI_SYMMETRIC and _torsion_base(ctx.mf):
            coeff += ctx.geom.pi_of(p, xbv)
        worst = max(worst, max_entry(lhs - coeff * yiv))
    return worst


def _item_cross_fiber(ctx, d: _Decomp, p, kind: str) -> float:
    """nabla_{Xi} Yj for i != j: zero, or pi(Yj) Xi under a fiber shift."""
    worst = 0.0
    for i in d.fiber_pairs():
        for j in d.fiber_pairs():
            if i == j:
                continue
            lhs = covariant_derivative(ctx.geom, lift(d.xi[i]), lift(d.yi[j]), p, kind)
            rhs = np.zeros(ctx.ps.total_dim)
            if kind == SEMI_SYMMETRIC and _torsion_fiber(ctx.mf):
                yjv = ctx.geom.field_values(lift(d.yi[j]), p)
                xiv = ctx.geom.field_values(lift(d.xi[i]), p)
                rhs = ctx.geom.pi_of(p, yjv) * xiv
            worst = max(worst, max_entry(lhs - rhs))
    return worst


def _item_diagonal(ctx, d: _Decomp, p, kind: str) -> float:
    """nabla_{Xi} Yi: fiber connection minus the grad-warp and shift terms."""
    worst = 0.0
    for i in d.fiber_pairs():
        lhs = covariant_derivative(ctx.geom, lift(d.xi[i]), lift(d.yi[i]), p, kind)
        wj = warp_jet(ctx.ps, i, p)
        pi_ = ctx.ps.block_point(p, i)
        fgeom = ctx.fiber_geom(i)
        gi = fgeom.metric(pi_).g
        sl = ctx.ps.block_slice(i)
        xiv = ctx.geom.field_values(lift(d.xi[i]), p)
        yiv = ctx.geom.field_values(lift(d.yi[i]), p)
        gixy = float(xiv[sl] @ gi @ yiv[sl])
        nab_i = covariant_derivative(fgeom, rehome(d.xi[i]), rehome(d.yi[i]),
                                     pi_, LEVI_CIVITA)
        rhs = -wj.value * gixy * _grad_warp(ctx, i, p) + embed(ctx.ps, i, nab_i)
        if kind == SEMI_SYMMETRIC:
            rhs = rhs - wj.value ** 2 * gixy * ctx.geom.p_vector(p)
            if _torsion_fiber(ctx.mf):
                rhs = rhs + ctx.geom.pi_of(p, yiv) * xiv
        worst = max(worst, max_entry(lhs - rhs))
    return worst


def _decomp_check(item_fn, kind_for, base_geom_for, label):
    def run(ctx: RunContext) -> Outcome:
        d = _Decomp(ctx, label)
        kind = kind_for
        vals = []
        for p in ctx.points():
            if base_geom_for == "ssm":
                vals.append(item_fn(ctx, d, p, kind, ctx.base_geom_ssm))
            elif base_geom_for == "lc":
                vals.append(item_fn(ctx, d, p, kind, ctx.base_geom))
            else:
                vals.append(item_fn(ctx, d, p, kind))
        return residual_outcome(vals, ctx.tol.alg)

    return run


def _lc_item(item_fn, label):
    """Same item evaluators against the torsion-free product connection."""

    def run(ctx: RunContext) -> Outcome:
        d = _Decomp(ctx, label)
        vals = []
        for p in ctx.points():
            if item_fn is _item_base_base:
                vals.append(item_fn(ctx, d, p, LEVI_CIVITA, ctx.base_geom))
            else:
                vals.append(item_fn(ctx, d, p, LEVI_CIVITA))
        return residual_outcome(vals, ctx.tol.alg)

    return run


# ---- Lie-derivative decompositions ----


def _zeta_parts(ctx: RunContext, label: str):
    parts = [ctx.synth("base", label + ":zB")]
    for i in range(len(ctx.ps.fibers)):
        parts.append(ctx.synth(i, f"{label}:z{i}"))
    return parts


def _factor_lie_matrices(ctx: RunContext, parts, p, base_kind: str):
    """Base and fiber Lie-derivative matrices of the lifted parts."""
    pb = ctx.ps.block_point(p, "base")
    if base_kind == SEMI_SYMMETRIC:
        mb = ssm_lie_matrix(ctx.base_geom_ssm, rehome(parts[0]), pb)
    else:
        mb = lie_matrix(ctx.base_geom, rehome(parts[0]), pb)
    mi = []
    for i in range(len(ctx.ps.fibers)):
        pi_ = ctx.ps.block_point(p, i)
        mi.append(lie_matrix(ctx.fiber_geom(i), rehome(parts[i + 1]), pi_))
    return mb, mi


def _lie_rhs_p_zero(ctx: RunContext, parts, p) -> np.ndarray:
    """Factor assembly of (L_zeta g) with no connection shift."""
    n = ctx.ps.total_dim
    rhs = np.zeros((n, n))
    mb, mi = _factor_lie_matrices(ctx, parts, p, LEVI_CIVITA)
    slb = ctx.ps.block_slice("base")
    rhs[slb, slb] = mb
    zbv = ctx.geom0.field_values(lift(parts[0]), p)
    for i in range(len(ctx.ps.fibers)):
        sl = ctx.ps.block_slice(i)
        wj = warp_jet(ctx.ps, i, p)
        gi = ctx.fiber_geom(i).metric(ctx.ps.block_point(p, i)).g
        zbf = float(zbv @ wj.grad)
        rhs[sl, sl] += wj.value ** 2 * mi[i] + 2.0 * wj.value * zbf * gi
    return rhs


def _lie_rhs_shift_base(ctx: RunContext, parts, p) -> np.ndarray:
    """Factor assembly of the shifted Lie derivative, base-located P."""
    n = ctx.ps.total_dim
    rhs = np.zeros((n, n))
    mb, mi = _factor_lie_matrices(ctx, parts, p, SEMI_SYMMETRIC)
    slb = ctx.ps.block_slice("base")
    rhs[slb, slb] = mb
    piv = ctx.geom.pi_covector(p)
    zbv = ctx.geom.field_values(lift(parts[0]), p)
    pizb = float(zbv @ piv)
    for i in range(len(ctx.ps.fibers)):
        sl = ctx.ps.block_slice(i)
        wj = warp_jet(ctx.ps, i, p)
        gi = ctx.fiber_geom(i).metric(ctx.ps.block_point(p, i)).g
        ziv = ctx.geom.field_values(lift(parts[i + 1]), p)[sl]
        zbf = float(zbv @ wj.grad)
        rhs[sl, sl] += (wj.value ** 2 * mi[i]
                        + 2.0 * (wj.value * zbf + wj.value ** 2 * pizb) * gi)
        gz = wj.value ** 2 * (gi @ ziv)
        rhs[sl, slb] -= np.outer(gz, piv[slb])
        rhs[slb, sl] -= np.outer(piv[slb], gz)
    return rhs


def _lie_rhs_shift_fiber(ctx: RunContext, parts, p) -> np.ndarray:
    """Factor assembly of the shifted Lie derivative, fiber-located P."""
    n = ctx.ps.total_dim
    rhs = np.zeros((n, n))
    mb, mi = _factor_lie_matrices(ctx, parts, p, LEVI_CIVITA)
    slb = ctx.ps.block_slice("base")
    rhs[slb, slb] = mb
    g_full = ctx.geom.metric(p).g
    zeta = ProductField(tuple(parts))
    z_full = ctx.geom.field_values(zeta, p)
    gz_full = g_full @ z_full
    piv = ctx.geom.pi_covector(p)
    zbv = ctx.geom.field_values(lift(parts[0]), p)
    for i in range(len(ctx.ps.fibers)):
        sl = ctx.ps.block_slice(i)
        wj = warp_jet(ctx.ps, i, p)
        gi = ctx.fiber_geom(i).metric(ctx.ps.block_point(p, i)).g
        ziv = ctx.geom.field_values(lift(parts[i + 1]), p)
        zbf = float(zbv @ wj.grad)
        rhs[sl, sl] += wj.value ** 2 * mi[i] + 2.0 * wj.value * zbf * gi
        rhs += 2.0 * ctx.geom.pi_of(p, ziv) * g_full
        pi_i = np.zeros(n)
        pi_i[sl] = piv[sl]
        rhs -= np.outer(gz_full, pi_i) + np.outer(pi_i, gz_full)
    return rhs


def _lie_decomposition_check(rhs_fn, use_shift: bool, label: str):
    def run(ctx: RunContext) -> Outcome:
        parts = _zeta_parts(ctx, label)
        zeta = ProductField(tuple(parts))
        geom = ctx.geom if use_shift else ctx.geom0
        vals = []
        for p in ctx.points():
            lhs = (ssm_lie_matrix(geom, zeta, p) if use_shift
                   else lie_matrix(geom, zeta, p))
            vals.append(max_entry(lhs - rhs_fn(ctx, parts, p)))
        return residual_outcome(vals, ctx.tol.two)

    return run


# ---- quadratic-form decompositions ----


def _quad_lhs(ctx, geom, zeta, x, p, kind) -> float:
    g = geom.metric(p).g
    return float(covariant_derivative(geom, x, zeta, p, kind) @ g @ x)


def _factor_quads(ctx, parts, x, p, base_kind):
    """g_B(nabla^B_{XB} zB, XB) and the fiber analogues, for one x."""
    pb = ctx.ps.block_point(p, "base")
    xb = x[ctx.ps.block_slice("base")]
    bgeom = ctx.base_geom_ssm if base_kind == SEMI_SYMMETRIC else ctx.base_geom
    gb = bgeom.metric(pb).g
    qb = float(covariant_derivative(bgeom, xb, rehome(parts[0]), pb,
                                    base_kind) @ gb @ xb)
    qi = []
    ni = []
    for i in range(len(ctx.ps.fibers)):
        pi_ = ctx.ps.block_point(p, i)
        fgeom = ctx.fiber_geom(i)
        gi = fgeom.metric(pi_).g
        xi = x[ctx.ps.block_slice(i)]
        qi.append(float(covariant_derivative(fgeom, xi, rehome(parts[i + 1]),
                                             pi_, LEVI_CIVITA) @ gi @ xi))
        ni.append(float(xi @ gi @ xi))
    return qb, qi, ni


def _quad_decomposition_check(shift_location: str, label: str):
    """Eq-19-style diagonal decompositions for each shift location."""

    def run(ctx: RunContext) -> Outcome:
        parts = _zeta_parts(ctx, label)
        zeta = ProductField(tuple(parts))
        rng = ctx.rng("quad:" + label)
        n = ctx.ps.total_dim
        use_shift = shift_location in ("base", "fiber")
        geom = ctx.geom if use_shift else ctx.geom0
        kind = SEMI_SYMMETRIC if use_shift else LEVI_CIVITA
        base_kind = SEMI_SYMMETRIC if shift_location == "base" else LEVI_CIVITA
        vals = []
        for p in ctx.points():
            zbv = geom.field_values(lift(parts[0]), p)
            for _ in range(4):
                x = np.array(rng.vector(n))
                lhs = _quad_lhs(ctx, geom, zeta, x, p, kind)
                qb, qi, nxi = _factor_quads(ctx, parts, x, p, base_kind)
                rhs = qb
                for i in range(len(ctx.ps.fibers)):
                    wj = warp_jet(ctx.ps, i, p)
                    zbf = float(zbv @ wj.grad)
                    rhs += wj.value ** 2 * qi[i] + wj.value * zbf * nxi[i]
                if shift_location == "base":
                    piv = geom.pi_covector(p)
                    pizb = float(zbv @ piv)
                    pixb = float(embed(ctx.ps, "base",
                                       x[ctx.ps.block_slice("base")]) @ piv)
                    for i in range(len(ctx.ps.fibers)):
                        wj = warp_jet(ctx.ps, i, p)
                        sl = ctx.ps.block_slice(i)
                        gi = ctx.fiber_geom(i).metric(ctx.ps.block_point(p, i)).g
                        ziv = geom.field_values(lift(parts[i + 1]), p)[sl]
                        gixz = float(x[sl] @ gi @ ziv)
                        rhs += (wj.value ** 2 * pizb * nxi[i]
                                - wj.value ** 2 * pixb * gixz)
                elif shift_location == "fiber":
                    piv = geom.pi_covector(p)
                    g_full = geom.metric(p).g
                    z_full = geom.field_values(zeta, p)
                    nx_full = float(x @ g_full @ x)
                    gxz = float(x @ g_full @ z_full)
                    for i in range(len(ctx.ps.fibers)):
                        sl = ctx.ps.block_slice(i)
                        ziv = geom.field_values(lift(parts[i + 1]), p)
                        pixi = float(piv[sl] @ x[sl])
                        rhs += ctx.geom.pi_of(p, ziv) * nx_full - pixi * gxz
                vals.append(abs(lhs - rhs))
        return residual_outcome(vals, ctx.tol.two)

    return run


# ---- second Lie derivative decomposition (Eq 25 shape) ----


def _eq25_check(label: str):
    def run(ctx: RunContext) -> Outcome:
        parts = _zeta_parts(ctx, label)
        zeta = ProductField(tuple(parts))
        vals = []
        for p in ctx.points():
            lhs = lie_lie_matrix(ctx.geom0, zeta, p)
            n = ctx.ps.total_dim
            rhs = np.zeros((n, n))
            pb = ctx.ps.block_point(p, "base")
            rhs[ctx.ps.block_slice("base"), ctx.ps.block_slice("base")] = (
                lie_lie_matrix(ctx.base_geom, rehome(parts[0]), pb))
            zbj = ctx.geom0.field_jet(lift(parts[0]), p)
            for i in range(len(ctx.ps.fibers)):
                sl = ctx.ps.block_slice(i)
                pi_ = ctx.ps.block_point(p, i)
                fgeom = ctx.fiber_geom(i)
                gi = fgeom.metric(pi_).g
                lli = lie_lie_matrix(fgeom, rehome(parts[i + 1]), pi_)
                li = lie_matrix(fgeom, rehome(parts[i + 1]), pi_)
                wj = warp_jet(ctx.ps, i, p)
                zbf, zbzbf = second_directional(zbj, wj)
                rhs[sl, sl] += (wj.value ** 2 * lli
                                + 4.0 * wj.value * zbf * li
                                + 2.0 * wj.value * zbzbf * gi
                                + 2.0 * zbf ** 2 * gi)
            vals.append(max_entry(lhs - rhs))
        return residual_outcome(vals, ctx.tol.second_order)

    return run


# ---- frame trace decomposition (Eq 27 shape) ----


def _block_trace(geom_block, vfd, p_block) -> float:
    g = geom_block.metric(p_block).g
    frame, eps = frame_of_matrix(g)
    total = 0.0
    for a in range(frame.shape[0]):
        w = covariant_derivative(geom_block, frame[a], rehome(vfd), p_block,
                                 LEVI_CIVITA)
        total += eps[a] * float(w @ g @ w)
    return total


def _eq27_check(label: str):
    def run(ctx: RunContext) -> Outcome:
        vals = []
        combos = [_zeta_parts(ctx, label), _zeta_parts(ctx, label + "2")]
        for parts in combos:
            zeta = ProductField(tuple(parts))
            for p in ctx.points():
                lhs = trace_nabla(ctx.geom0, zeta, p)
                pb = ctx.ps.block_point(p, "base")
                rhs = _block_trace(ctx.base_geom, parts[0], pb)
                gb = ctx.base_geom.metric(pb).g
                zbj = ctx.geom0.field_jet(lift(parts[0]), p)
                for i in range(len(ctx.ps.fibers)):
                    pi_ = ctx.ps.block_point(p, i)
                    fgeom = ctx.fiber_geom(i)
                    gi = fgeom.metric(pi_).g
                    sl = ctx.ps.block_slice(i)
                    ziv = ctx.geom0.field_values(lift(parts[i + 1]), p)[sl]
                    wj = warp_jet(ctx.ps, i, p)
                    zbf = float(zbj.val @ wj.grad)
                    gradf_b = np.linalg.solve(gb, wj.grad[ctx.ps.block_slice("base")])
                    gf2 = float(gradf_b @ gb @ gradf_b)
                    ni = gi.shape[0]
                    rhs += (_block_trace(fgeom, parts[i + 1], pi_)
                            + 2.0 * float(ziv @ gi @ ziv) * gf2
                            + ni / wj.value ** 2 * zbf ** 2
                            + 2.0 * zbf / wj.value
                            * divergence(fgeom, rehome(parts[i + 1]), pi_))
                vals.append(abs(lhs - rhs))
        return residual_outcome(vals, ctx.tol.trace)

    return run


# ---- first/second Lie derivative route agreement ----


def _lie_route_check(ctx: RunContext) -> Outcome:
    vals = []
    combos = [ProductField(tuple(_zeta_parts(ctx, "route")))]
    combos += list(ctx.field_combos().values())
    for zeta in combos[:8]:
        for p in ctx.points():
            vals.append(max_entry(lie_matrix(ctx.geom0, zeta, p)
                                  - lie_matrix_direct(ctx.geom0, zeta, p)))
    return residual_outcome(vals, ctx.tol.two)


def _lie_lie_route_check(ctx: RunContext) -> Outcome:
    vals = []
    combos = [ProductField(tuple(_zeta_parts(ctx, "route2")))]
    combos += list(ctx.field_combos().values())
    for zeta in combos[:6]:
        for p in ctx.points():
            vals.append(max_entry(lie_lie_matrix(ctx.geom0, zeta, p)
                                  - lie_lie_matrix_nested(ctx.geom0, zeta, p)))
    return residual_outcome(vals, ctx.tol.two)


def build() -> list[CheckSpec]:
    any_mf = lambda mf: True
    specs = [
        CheckSpec("Eq2", "Eq2", "2", "axiom",
                  "torsion of the shifted connection has the two-term form",
                  any_mf, _axiom_torsion),
        CheckSpec("NablaBarG", "NablaBarG", "2", "axiom",
                  "the shifted connection is metric",
                  any_mf, _axiom_compat),
        CheckSpec("Lemma3.3", "Lemma3.3", "3", "identity",
                  "connection route of the metric Lie derivative matches the "
                  "coordinate route", any_mf, _lie_route_check),
        CheckSpec("Prop6.2", "Prop6.2", "6", "identity",
                  "nested-covariant route of the second Lie derivative "
                  "matches the twice-applied coordinate route",
                  any_mf, _lie_lie_route_check),
    ]

    # connection decomposition items
    base_shift = lambda mf: _has_fibers(mf) and _torsion_base(mf)
    fiber_shift = lambda mf: _has_fibers(mf) and _torsion_fiber(mf)
    base_shift_multi = lambda mf: _multi_fiber(mf) and _torsion_base(mf)
    fiber_shift_multi = lambda mf: _multi_fiber(mf) and _torsion_fiber(mf)
    warped1_base = lambda mf: len(mf.structure.fibers) == 1 and _torsion_base(mf)
    warped1_fiber = lambda mf: len(mf.structure.fibers) == 1 and _torsion_fiber(mf)

    def d_item(fn, base_geom_for=None, label="d"):
        return _decomp_check(fn, SEMI_SYMMETRIC, base_geom_for, label)

    items_base = [
        ("1", _item_base_base, "ssm", "base-tangent arguments reduce to the base connection"),
        ("2", _item_mixed, None, "mixed base-fiber derivative is the warp ratio"),
        ("3", _item_mixed_swapped, None, "swapped mixed derivative adds the shift pairing"),
        ("4", _item_cross_fiber, None, "derivatives across distinct fibers vanish"),
        ("5", _item_diagonal, None, "fiber-diagonal derivative decomposes"),
    ]
    for suffix, fn, bg, title in items_base:
        applies = base_shift_multi if suffix == "4" else base_shift
        specs.append(CheckSpec(f"Lemma4.1.{suffix}", "Lemma4.1", "4", "identity",
                               title, applies, d_item(fn, bg, "L41")))
    for suffix, fn, bg, title in [
        ("1", _item_base_base, "ssm", items_base[0][3]),
        ("2", _item_mixed, None, items_base[1][3]),
        ("3", _item_mixed_swapped, None, items_base[2][3]),
        ("4", _item_diagonal, None, items_base[4][3]),
    ]:
        specs.append(CheckSpec(f"Lemma3.1.{suffix}", "Lemma3.1", "3", "identity",
                               title, warped1_base, d_item(fn, bg, "L31")))

    items_fiber = [
        ("1", _item_base_base, "lc", "base-tangent arguments shift by the fiber field"),
        ("2", _item_mixed, None, "mixed derivative adds the shift pairing"),
        ("3", _item_mixed_swapped, None, "swapped mixed derivative is the warp ratio"),
        ("4a", _item_cross_fiber, None, "cross-fiber derivative is the shift pairing"),
        ("4b", _item_diagonal, None, "fiber-diagonal derivative decomposes"),
    ]
    for suffix, fn, bg, title in items_fiber:
        applies = fiber_shift_multi if suffix == "4a" else fiber_shift
        specs.append(CheckSpec(f"Lemma4.2.{suffix}", "Lemma4.2", "4", "identity",
                               title, applies, d_item(fn, bg, "L42")))
    for suffix, fn, bg, title in [
        ("1", _item_base_base, "lc", items_fiber[0][3]),
        ("2", _item_mixed, None, items_fiber[1][3]),
        ("3", _item_mixed_swapped, None, items_fiber[2][3]),
        ("4", _item_diagonal, None, items_fiber[4][3]),
    ]:
        specs.append(CheckSpec(f"Lemma3.2.{suffix}", "Lemma3.2", "3", "identity",
                               title, warped1_fiber, d_item(fn, bg, "L32")))

    lc_items = [
        ("1", _item_base_base, "torsion-free base-tangent reduction"),
        ("2a", _item_mixed, "torsion-free mixed derivative is the warp ratio"),
        ("2b", _item_mixed_swapped, "torsion-free swapped mixed derivative"),
        ("4a", _item_cross_fiber, "torsion-free cross-fiber derivative vanishes"),
        ("4b", _item_diagonal, "torsion-free fiber-diagonal decomposition"),
    ]
    for suffix, fn, title in lc_items:
        applies = _multi_fiber if suffix == "4a" else _has_fibers
        specs.append(CheckSpec(f"Lemma6.7.{suffix}", "Lemma6.7", "6", "identity",
                               title, applies, _lc_item(fn, "L67")))

    # Lie decompositions
    specs += [
        CheckSpec("Prop4.3", "Prop4.3", "4", "identity",
                  "shifted Lie derivative of g decomposes (base shift)",
                  base_shift, _lie_decomposition_check(_lie_rhs_shift_base, True, "E14")),
        CheckSpec("Prop4.4", "Prop4.4", "4", "identity",
                  "shifted Lie derivative of g decomposes (fiber shift)",
                  fiber_shift, _lie_decomposition_check(_lie_rhs_shift_fiber, True, "E15")),
        CheckSpec("Prop3.13", "Prop3.13", "3", "identity",
                  "single-fiber shifted Lie decomposition (base shift)",
                  warped1_base, _lie_decomposition_check(_lie_rhs_shift_base, True, "E10")),
        CheckSpec("Prop3.14", "Prop3.14", "3", "identity",
                  "single-fiber shifted Lie decomposition (fiber shift)",
                  warped1_fiber, _lie_decomposition_check(_lie_rhs_shift_fiber, True, "E11")),
        CheckSpec("Prop5.1", "Prop5.1", "5", "identity",
                  "Lie derivative of g decomposes with no shift",
                  _has_fibers, _lie_decomposition_check(_lie_rhs_p_zero, False, "E18")),
        CheckSpec("Cor4.5", "Cor4.5", "4", "identity",
                  "quadratic form of the shifted derivative decomposes (base shift)",
                  base_shift, _quad_decomposition_check("base", "E16")),
        CheckSpec("Cor4.6", "Cor4.6", "4", "identity",
                  "quadratic form of the shifted derivative decomposes (fiber shift)",
                  fiber_shift, _quad_decomposition_check("fiber", "E17")),
        CheckSpec("Cor3.15", "Cor3.15", "3", "identity",
                  "single-fiber quadratic decomposition (base shift)",
                  warped1_base, _quad_decomposition_check("base", "E12")),
        CheckSpec("Cor3.16", "Cor3.16", "3", "identity",
                  "single-fiber quadratic decomposition (fiber shift)",
                  warped1_fiber, _quad_decomposition_check("fiber", "E13")),
        CheckSpec("Cor5.2", "Cor5.2", "5", "identity",
                  "quadratic Lie decomposition with no shift",
                  _has_fibers, _quad_decomposition_check("none", "E19")),
        CheckSpec("Prop6.8", "Prop6.8", "6", "identity",
                  "second Lie derivative of g decomposes",
                  _has_fibers, _eq25_check("E25")),
        CheckSpec("Prop6.12", "Prop6.12", "6", "identity",
                  "frame trace of (nabla zeta)^2 decomposes into five terms",
                  _has_fibers, _eq27_check("E27")),
    ]
    return specs
