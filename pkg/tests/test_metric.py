import math

import numpy as np
import pytest

from warpfield import fieldexpr as fe
from warpfield.connections import Geometry, divergence
from warpfield.fields import VectorFieldDef, lift
from warpfield.jets import Point, fd_jet
from warpfield.metric import (
    DimensionMismatch,
    NonPositiveWarping,
    ProductStructure,
    SingularMetric,
    diagonal_block,
    grad_scalar,
    inner,
    sample_points,
)
from warpfield.sampling import SplitMix

ONE = fe.num(1.0)
NEG = fe.num(-1.0)


def interval(sign=1.0, box=(0.25, 1.75)):
    return diagonal_block("base", ("t",), (fe.num(sign),), (box,))


def flat2(label="fiber.1", coords=("x", "y")):
    return diagonal_block(label, coords, (ONE, ONE), ((-1.0, 1.0), (-1.0, 1.0)))


def grw(warp_src="exp(t)", box=(-0.75, 0.75)):
    warp = fe.parse_expr(warp_src, ("t",))
    return ProductStructure(base=interval(-1.0, box), fibers=(flat2(),),
                            warps=(warp,))


class TestAssembly:
    def test_lorentzian_warped_metric_at_origin(self):
        ps = grw()
        m = ps.metric_at(Point((0.0, 0.2, -0.1)))
        assert np.allclose(np.diag(m.g), [-1.0, 1.0, 1.0])
        assert np.allclose(m.g @ m.ginv, np.eye(3), atol=1e-12)

    def test_unit_warp_gives_direct_product(self):
        ps = ProductStructure(base=interval(), fibers=(flat2(),), warps=(ONE,))
        m = ps.metric_at(Point((1.0, 0.3, 0.4)))
        assert np.array_equal(m.g, np.diag([1.0, 1.0, 1.0]))

    def test_power_law_scaling(self):
        # warp (t^2) -> fiber block scaled by t^4 = 81 at t = 3
        warp = fe.parse_expr("t^2", ("t",))
        ps = ProductStructure(base=interval(1.0, (0.5, 4.0)), fibers=(flat2(),),
                              warps=(warp,))
        m = ps.metric_at(Point((3.0, 0.1, 0.2)))
        assert m.g[1, 1] == pytest.approx(81.0, abs=1e-12)

    def test_off_block_entries_exactly_zero(self):
        ps = grw()
        m = ps.metric_at(Point((0.3, 0.2, -0.1)))
        assert m.g[0, 1] == 0.0 and m.g[0, 2] == 0.0
        assert m.ginv[0, 1] == 0.0 and m.ginv[0, 2] == 0.0

    def test_nonpositive_warping_rejected(self):
        warp = fe.parse_expr("t", ("t",))
        ps = ProductStructure(base=interval(1.0, (-1.0, 1.0)),
                              fibers=(flat2(),), warps=(warp,))
        with pytest.raises(NonPositiveWarping):
            ps.metric_at(Point((-0.5, 0.0, 0.0)))

    def test_singular_metric_rejected(self):
        zero = fe.num(0.0)
        block = diagonal_block("base", ("x",), (zero,), ((-1.0, 1.0),))
        ps = ProductStructure.single(block)
        with pytest.raises(SingularMetric):
            ps.metric_at(Point((0.2,)))

    def test_signature_of_product(self):
        ps = grw()
        assert ps.signature(Point((0.1, 0.0, 0.0))) == (-1, 1, 1)

    def test_duplicate_coordinates_rejected(self):
        from warpfield.metric import GeometryError

        with pytest.raises(GeometryError):
            ProductStructure(base=interval(),
                             fibers=(diagonal_block("f", ("t",), (ONE,),
                                                    ((-1, 1),)),),
                             warps=(ONE,))


class TestMetricJet:
    def test_exponential_warp_derivative(self):
        # g_xx = e^{2t}: d_t g_xx = 2 at t = 0
        ps = grw()
        mj = ps.metric_jet(Point((0.0, 0.2, -0.1)))
        assert mj.dg[0, 1, 1] == pytest.approx(2.0, abs=1e-12)

    def test_constant_blocks_have_zero_derivatives(self):
        ps = ProductStructure(base=interval(), fibers=(flat2(),), warps=(ONE,))
        mj = ps.metric_jet(Point((1.0, 0.3, 0.4)))
        assert not mj.dg.any()
        assert not mj.d2g.any()

    def test_power_law_fiber_derivative(self):
        # f = phi^p with phi = t, p = 2: d_t g_xx = 2 p phi^{2p-1} phi'
        warp = fe.parse_expr("t^2", ("t",))
        ps = ProductStructure(base=interval(1.0, (0.5, 4.0)), fibers=(flat2(),),
                              warps=(warp,))
        t = 1.3
        mj = ps.metric_jet(Point((t, 0.1, 0.2)))
        assert mj.dg[0, 1, 1] == pytest.approx(4.0 * t ** 3, rel=1e-12)

    def test_jets_match_finite_differences(self):
        ps = grw()
        rng = SplitMix(11)
        for p in sample_points(ps, 8, rng):
            mj = ps.metric_jet(p)
            for i in range(3):
                for j in range(3):
                    fd = fd_jet(lambda q, i=i, j=j: ps.metric_at(q).g[i, j], p)
                    gtol = 1e-6 * (1.0 + np.max(np.abs(mj.dg[:, i, j])))
                    htol = 1e-4 * (1.0 + np.max(np.abs(mj.d2g[:, :, i, j])))
                    assert np.max(np.abs(mj.dg[:, i, j] - fd.grad)) <= gtol
                    assert np.max(np.abs(mj.d2g[:, :, i, j] - fd.hess)) <= htol

    def test_inverse_derivative_identity(self):
        # d(g^{-1}) = -g^{-1} dg g^{-1}
        ps = grw()
        p = Point((0.2, 0.1, -0.3))
        mj = ps.metric_jet(p)
        for d in range(3):
            expected = -mj.ginv @ mj.dg[d] @ mj.ginv
            assert np.allclose(mj.dginv[d], expected, atol=1e-12)


class TestInnerAndGrad:
    def test_lorentzian_inner(self):
        ps = grw()
        m = ps.metric_at(Point((0.0, 0.0, 0.0)))
        dt = np.array([1.0, 0.0, 0.0])
        assert inner(m, dt, dt) == -1.0

    def test_inner_with_zero(self):
        ps = grw()
        m = ps.metric_at(Point((0.0, 0.0, 0.0)))
        assert inner(m, np.array([0.3, -0.2, 0.5]), np.zeros(3)) == 0.0

    def test_warped_fiber_inner(self):
        ps = grw(box=(-0.5, 1.5))
        m = ps.metric_at(Point((1.0, 0.0, 0.0)))
        dx = np.array([0.0, 1.0, 0.0])
        assert inner(m, dx, dx) == pytest.approx(math.e ** 2, rel=1e-12)

    def test_inner_symmetric_and_dim_checked(self):
        ps = grw()
        m = ps.metric_at(Point((0.1, 0.2, 0.3)))
        rng = SplitMix(3)
        x = np.array(rng.vector(3))
        y = np.array(rng.vector(3))
        assert inner(m, x, y) == inner(m, y, x)
        with pytest.raises(DimensionMismatch):
            inner(m, np.zeros(2), np.zeros(3))

    def test_euclidean_gradient(self):
        ps = ProductStructure.single(interval(1.0))
        g = grad_scalar(ps, Point((0.7,)), fe.parse_expr("t", ("t",)))
        assert np.allclose(g, [1.0])

    def test_lorentzian_gradient_sign(self):
        ps = ProductStructure.single(interval(-1.0))
        g = grad_scalar(ps, Point((0.7,)), fe.parse_expr("t", ("t",)))
        assert np.allclose(g, [-1.0])

    def test_constant_gradient_vanishes(self):
        ps = ProductStructure.single(interval(1.0))
        g = grad_scalar(ps, Point((0.7,)), fe.num(5.0))
        assert not g.any()


class TestDivergence:
    def setup_method(self):
        self.geom = Geometry(ProductStructure.single(flat2("base", ("x", "y"))))

    def test_coordinate_divergence(self):
        v = lift(VectorFieldDef("base", (fe.parse_expr("x", ("x", "y")),
                                         fe.num(0.0))))
        assert divergence(self.geom, v, Point((0.3, 0.4))) == pytest.approx(1.0)

    def test_rotation_is_divergence_free(self):
        v = lift(VectorFieldDef("base", (fe.parse_expr("-y", ("x", "y")),
                                         fe.parse_expr("x", ("x", "y")))))
        assert divergence(self.geom, v, Point((0.3, 0.4))) == pytest.approx(0.0)

    def test_dilation_divergence(self):
        v = lift(VectorFieldDef("base", (fe.parse_expr("x", ("x", "y")),
                                         fe.parse_expr("y", ("x", "y")))))
        p = Point((0.3, 0.4))
        assert divergence(self.geom, v, p) == pytest.approx(2.0)
        # cross-check against central differences of the component functions
        fd0 = fd_jet(lambda q: q.coords[0], p)
        fd1 = fd_jet(lambda q: q.coords[1], p)
        assert fd0.grad[0] + fd1.grad[1] == pytest.approx(2.0, abs=1e-9)


class TestSampling:
    def test_points_stay_in_inset_box(self):
        ps = grw()
        pts = sample_points(ps, 64, SplitMix(5))
        for p in pts:
            for v, (lo, hi) in zip(p.coords, ps.box):
                width = hi - lo
                assert lo + 0.1 * width <= v <= lo + 0.9 * width

    def test_exclusions_respected(self):
        ps = ProductStructure.single(interval(1.0))
        pts = sample_points(ps, 200, SplitMix(5), {"t": [(0.4, 0.6)]})
        assert all(not (0.4 <= p.coords[0] <= 0.6) for p in pts)

    def test_deterministic(self):
        ps = grw()
        a = sample_points(ps, 16, SplitMix(9))
        b = sample_points(ps, 16, SplitMix(9))
        assert [p.coords for p in a] == [q.coords for q in b]
