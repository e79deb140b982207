"""Registry-level properties: census, vacuity, negative controls and
cross-manifest behaviour of the checks."""

import numpy as np
import pytest

from warpfield.cli import corpus_dir
from warpfield.fields import ProductField
from warpfield.lie_killing import lie_lie_matrix
from warpfield.manifest import load_manifest
from warpfield.suite import (
    REQUIRED_RESULTS,
    RunContext,
    default_registry,
    run_checks,
)


@pytest.fixture(scope="module")
def registry():
    return default_registry()


@pytest.fixture(scope="module")
def corpus():
    return {p.stem: load_manifest(p) for p in sorted(corpus_dir().glob("*.wm"))}


@pytest.fixture(scope="module")
def corpus_results(registry, corpus):
    out = {}
    for name, mf in corpus.items():
        out[name] = run_checks(registry, mf, registry.specs, samples=24)
    return out


class TestCensus:
    def test_every_required_result_is_registered(self, registry):
        covered = registry.results_covered()
        missing = [r for r in REQUIRED_RESULTS if r not in covered]
        assert missing == []

    def test_registered_results_are_required_or_axioms(self, registry):
        extras = registry.results_covered() - set(REQUIRED_RESULTS)
        assert extras == {"Eq2", "NablaBarG"}

    def test_ids_unique(self, registry):
        ids = [s.id for s in registry.specs]
        assert len(ids) == len(set(ids))

    def test_equation_aliases_resolve(self, registry):
        for eq in [f"Eq{k}" for k in range(1, 30)]:
            assert registry.select(eq)

    def test_every_result_conclusive_somewhere(self, registry, corpus_results):
        """No numbered statement is inconclusive across the whole corpus."""
        conclusive = set()
        for results in corpus_results.values():
            for r in results:
                if r.verdict in ("pass", "fail"):
                    conclusive.add(r.result)
        missing = [r for r in REQUIRED_RESULTS if r not in conclusive]
        assert missing == []


class TestNoVacuousPass:
    def test_passes_carry_enough_samples(self, corpus_results):
        for name, results in corpus_results.items():
            for r in results:
                if r.verdict == "pass":
                    assert r.samples >= 24, (name, r.check, r.samples)

    def test_inconclusive_is_never_pass(self, corpus_results):
        for results in corpus_results.values():
            for r in results:
                assert r.verdict in ("pass", "fail", "inconclusive")


class TestExpectedVerdicts:
    def test_clean_manifests_have_no_failures(self, corpus_results):
        controls = {"grw_poly", "kasner_bad"}
        for name, results in corpus_results.items():
            if name in controls:
                continue
            fails = [r.check for r in results if r.verdict == "fail"]
            assert fails == [], (name, fails)

    def test_grw_negative_control(self, corpus_results):
        by_check = {r.check: r for r in corpus_results["grw_poly"]}
        assert by_check["Prop3.20"].verdict == "fail"
        assert by_check["Prop3.20"].max_abs >= 1e-2

    def test_kasner_negative_control(self, corpus_results):
        by_check = {r.check: r for r in corpus_results["kasner_bad"]}
        assert by_check["Prop6.17"].verdict == "fail"
        assert by_check["Prop6.15"].verdict == "fail"
        # the well-formed instance passes both
        good = {r.check: r for r in corpus_results["kasner"]}
        assert good["Prop6.17"].verdict == "pass"
        assert good["Prop6.15"].verdict == "pass"

    def test_kasner_shape_check_passes_even_when_perturbed(self, corpus_results):
        # the exponent perturbation keeps the power-law form itself valid
        bad = {r.check: r for r in corpus_results["kasner_bad"]}
        assert bad["Def6.16"].verdict == "pass"

    def test_registry_passes_per_manifest(self, corpus_results):
        # a few spot checks that key statements are verified where expected
        grw = {r.check: r.verdict for r in corpus_results["grw_exp"]}
        assert grw["Prop3.20"] == "pass"
        assert grw["Lemma3.1.3"] == "pass"
        assert grw["Prop3.13"] == "pass"
        mw3 = {r.check: r.verdict for r in corpus_results["mw3_fib"]}
        assert mw3["Lemma4.2.4a"] == "pass"
        assert mw3["Prop4.4"] == "pass"
        assert mw3["Prop6.12"] == "pass"
        kas = {r.check: r.verdict for r in corpus_results["kasner"]}
        assert kas["Cor6.10.2"] == "pass"
        assert kas["Cor6.11.2"] == "pass"
        tor = {r.check: r.verdict for r in corpus_results["torus2"]}
        assert tor["Thm6.13.1"] == "pass"
        assert tor["Thm6.14.2"] == "pass"
        assert tor["Lemma6.6"] == "pass"


class TestSufficiencyNegativeControls:
    """Violating exactly one hypothesis must break the conclusion."""

    def test_uncompensated_base_field_fails(self, corpus):
        # grw_poly: the warp is not shift-compensated; the designated
        # configuration fails the product check
        mf = corpus["grw_poly"]
        ctx = RunContext(mf, samples=24)
        from warpfield.checks.killing import _witness_grw

        out = _witness_grw(ctx)
        assert out.verdict == "fail"
        assert out.max_abs >= 1e-2

    def test_skipping_the_orthogonal_projection_fails(self, corpus):
        # Prop3.17.2-style instance without the orthogonality restriction
        mf = corpus["grw_exp"]
        ctx = RunContext(mf, samples=16)
        from warpfield.connections import SEMI_SYMMETRIC, covariant_derivative

        zeta = ctx.named_field("zeta_rot")
        worst = 0.0
        rng = ctx.rng("negctl")
        for p in ctx.points():
            x = np.zeros(ctx.ps.total_dim)
            x[0] = 1.0
            x[1:] = np.array(rng.vector(2))
            g = ctx.geom.metric(p).g
            q = covariant_derivative(ctx.geom, x, zeta, p, SEMI_SYMMETRIC) @ g @ x
            worst = max(worst, abs(q))
        assert worst > 1e-3

    def test_unannihilated_warp_breaks_lift(self, corpus):
        # torus_warp: the x-translation does not annihilate the warp
        mf = corpus["torus_warp"]
        ctx = RunContext(mf, samples=16)
        from warpfield.lie_killing import lie_matrix

        zeta = ProductField((mf.fields["zeta_bx"], mf.fields["zeta_cv"]))
        worst = max(float(np.max(np.abs(lie_matrix(ctx.geom0, zeta, p))))
                    for p in ctx.points())
        assert worst > 1e-3

    def test_homothetic_non_isometry_breaks_second_order_sum(self, corpus):
        # mw2_riem: replacing the fiber isometry by the dilation (a
        # homothety, not second-order) breaks the unconditional sum rule
        mf = corpus["mw2_riem"]
        ctx = RunContext(mf, samples=16)
        zeta = ProductField((mf.fields["zeta_dil1"], mf.fields["zeta_cw2"]))
        worst = max(float(np.max(np.abs(lie_lie_matrix(ctx.geom0, zeta, p))))
                    for p in ctx.points())
        assert worst > 1e-2

    def test_coupled_warp_with_wrong_homothety_factor(self, corpus):
        # kasner: the dilation has factor 2, which violates the coupling
        # condition satisfied by the factor-0 isometries
        mf = corpus["kasner"]
        ctx = RunContext(mf, samples=16)
        from warpfield.checks.twokilling import _eq26_residual_max

        zb = mf.fields["zeta_cbrt"]
        assert _eq26_residual_max(ctx, zb, 0, 0.0) <= 1e-9
        assert _eq26_residual_max(ctx, zb, 0, 2.0) > 1e-2

    def test_exp_family_demonstrates_hypothesis_is_load_bearing(self):
        """A homothetic (non-second-order) fiber field satisfying the
        warp-coupling condition still fails to extend: the second-order
        hypothesis on the fiber field cannot be dropped."""
        lam, a, b = -0.75, 1.0, 0.0
        text = f"""
[base]
dim = 1
coords = t
g.t.t = 1
box.t = 1.0, 2.0

[fiber.1]
dim = 2
coords = x, y
g.x.x = 1
g.y.y = 1
box.x = -1, 1
box.y = -1, 1
warp = exp({lam}*cbrt(t)^2)

[torsion]
location = zero

[field.zeta_cbrt]
location = base
comp.t = cbrt(t)

[field.zeta_dil]
location = fiber.1
comp.x = {-lam * a / 3.0}*x
comp.y = {-lam * a / 3.0}*y
"""
        from warpfield.manifest import parse_manifest

        mf = parse_manifest(text, "exp_family")
        ctx = RunContext(mf, samples=24)
        from warpfield.checks.twokilling import (
            _eq28_residual_max,
            _fiber_homothety,
        )

        hom = _fiber_homothety(ctx, mf.fields["zeta_dil"])
        assert hom.homothetic
        c1 = -2.0 * lam * a / 3.0
        assert hom.factor == pytest.approx(c1, abs=1e-9)
        # the coupling condition holds exactly for this warp family
        assert _eq28_residual_max(ctx, 0, hom.factor, a, b) <= 1e-9
        # yet the combined field is not second-order Killing
        zeta = ProductField((mf.fields["zeta_cbrt"], mf.fields["zeta_dil"]))
        worst = max(float(np.max(np.abs(lie_lie_matrix(ctx.geom0, zeta, p))))
                    for p in ctx.points())
        assert worst > 1e-3


class TestUnrestrictedQuantifierDiagnostics:
    """The printed statements quantified over arbitrary vectors fail off
    the condition cone; the registry's restrictions are load-bearing."""

    def test_away_fiber_isometry_fails_on_mixed_vectors(self, corpus):
        mf = corpus["mw2_fib"]
        ctx = RunContext(mf, samples=8)
        from warpfield.connections import SEMI_SYMMETRIC, covariant_derivative

        zeta = ctx.named_field("zeta_rot1")
        worst = 0.0
        rng = ctx.rng("diag49")
        for p in ctx.points():
            x = np.array(rng.vector(ctx.ps.total_dim))
            g = ctx.geom.metric(p).g
            q = covariant_derivative(ctx.geom, x, zeta, p, SEMI_SYMMETRIC) @ g @ x
            worst = max(worst, abs(q))
        assert worst > 1e-3

    def test_shift_parallel_fiber_field_fails_even_on_its_cone(self, corpus):
        # a fiber field parallel to the shift cannot be shifted-Killing
        # along base-pure directions
        mf = corpus["mw2_fib"]
        ctx = RunContext(mf, samples=8)
        from warpfield.connections import SEMI_SYMMETRIC, covariant_derivative

        zeta = ctx.named_field("zeta_w")
        p = ctx.points()[0]
        x = np.zeros(ctx.ps.total_dim)
        x[0] = 1.0
        g = ctx.geom.metric(p).g
        q = covariant_derivative(ctx.geom, x, zeta, p, SEMI_SYMMETRIC) @ g @ x
        assert abs(q) > 1e-3


class TestDeterminism:
    def test_identical_runs_identical_results(self, registry, corpus):
        mf = corpus["grw_exp"]
        a = run_checks(registry, mf, registry.specs, samples=16)
        b = run_checks(registry, mf, registry.specs, samples=16)
        assert a == b

    def test_seed_changes_samples_not_verdicts(self, registry, corpus):
        mf = corpus["grw_exp"]
        a = run_checks(registry, mf, registry.specs, samples=16, seed=1)
        b = run_checks(registry, mf, registry.specs, samples=16, seed=2)
        assert [r.verdict for r in a] == [r.verdict for r in b]


class TestSelection:
    def test_select_by_result_prefix(self, registry):
        specs = registry.select("Lemma4.1")
        assert {s.id for s in specs} == {
            "Lemma4.1.1", "Lemma4.1.2", "Lemma4.1.3", "Lemma4.1.4", "Lemma4.1.5"}

    def test_select_by_equation_alias(self, registry):
        assert [s.id for s in registry.select("Eq27")] == ["Prop6.12"]

    def test_unknown_token(self, registry):
        with pytest.raises(KeyError):
            registry.select("Prop9.99")
