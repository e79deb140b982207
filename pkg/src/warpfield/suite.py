"""Check registry infrastructure.

Every numbered statement in the verified catalog is represented by one
or more registered checks (sub-items get suffixed ids such as
``Lemma4.1.3``).  A check runs against one manifest and produces a
:class:`CheckResult` with a pass / fail / inconclusive verdict;
``inconclusive`` means the manifest admits no configuration satisfying
the statement's hypotheses, and is never reported as a pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connections import Geometry
from .fields import ProductField, VectorFieldDef, lift, synth_field
from .jets import Point
from .manifest import Manifest
from .metric import sample_points
from .sampling import DEFAULT_SAMPLES, DEFAULT_SEED, SplitMix, subseed

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Tolerances:
    alg: float = 1e-8        # first-order identities
    two: float = 1e-7        # second-derivative identities
    fd: float = 1e-6         # jet vs finite differences
    trace: float = 1e-6      # frame-trace decomposition
    second_order: float = 1e-6   # second Lie-derivative decomposition
    sym: float = 1e-12       # bilinear symmetry
    hyp: float = 1e-9        # hypothesis residual gate


@dataclass(frozen=True)
class Outcome:
    verdict: str
    max_abs: float = 0.0
    mean_abs: float = 0.0
    samples: int = 0
    tolerance: float = 0.0
    note: str = ""


def residual_outcome(values, tol: float, samples: int | None = None,
                     note: str = "") -> Outcome:
    arr = np.abs(np.asarray(list(values), dtype=float))
    if arr.size == 0:
        return Outcome(INCONCLUSIVE, note=note or "no admissible samples")
    return Outcome(
        PASS if float(arr.max()) <= tol else FAIL,
        max_abs=float(arr.max()),
        mean_abs=float(arr.mean()),
        samples=samples if samples is not None else int(arr.size),
        tolerance=tol,
        note=note,
    )


def inconclusive(note: str) -> Outcome:
    return Outcome(INCONCLUSIVE, note=note)


@dataclass(frozen=True)
class CheckResult:
    check: str
    result: str
    manifest: str
    verdict: str
    max_abs: float
    mean_abs: float
    samples: int
    tolerance: float
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @property
    def failed(self) -> bool:
        return self.verdict == FAIL


@dataclass(frozen=True)
class CheckSpec:
    id: str
    result: str       # the numbered statement this check belongs to
    section: str
    kind: str         # identity | sufficiency | necessity | equivalence |
                      # definition | witness | builder | modeled | axiom
    title: str
    applies: object   # Manifest -> bool
    run: object       # RunContext -> Outcome


class RunContext:
    """Per-(manifest, run-config) bundle of cached geometry and sampling."""

    def __init__(self, mf: Manifest, samples: int = DEFAULT_SAMPLES,
                 seed: int = DEFAULT_SEED, tol: Tolerances = Tolerances()):
        self.mf = mf
        self.ps = mf.structure
        self.ts = mf.torsion
        self.samples = samples
        self.seed = seed
        self.tol = tol
        self.geom = Geometry(self.ps, self.ts)
        self.geom0 = Geometry(self.ps)
        self.base_geom = Geometry(self.ps.base_structure())
        if self.ts.location == "base":
            self.base_geom_ssm = Geometry(self.ps.base_structure(),
                                          self.ts.restrict_to_block())
        else:
            self.base_geom_ssm = self.base_geom
        self.fiber_geoms = [Geometry(self.ps.fiber_structure(i))
                            for i in range(len(self.ps.fibers))]
        self._points: dict[str, list[Point]] = {}

    # ---- sampling ----

    def rng(self, label: str) -> SplitMix:
        return SplitMix(subseed(self.seed, self.mf.name, label))

    def points(self, label: str = "points", n: int | None = None) -> list[Point]:
        key = f"{label}:{n}"
        if key not in self._points:
            self._points[key] = sample_points(
                self.ps, n or self.samples, self.rng("points:" + label),
                self.mf.exclusions)
        return self._points[key]

    def block_points(self, pts: list[Point], block) -> list[Point]:
        return [self.ps.block_point(p, block) for p in pts]

    # ---- fields ----

    def synth(self, block, label: str, degree: int = 2) -> VectorFieldDef:
        return synth_field(self.ps, block, self.rng(f"synth:{label}"), degree)

    def synth_product(self, label: str, degree: int = 2) -> ProductField:
        parts = [self.synth("base", label + ":base", degree)]
        for i in range(len(self.ps.fibers)):
            parts.append(self.synth(i, f"{label}:fiber{i}", degree))
        return ProductField(tuple(parts))

    def named_field(self, name: str) -> ProductField:
        return lift(self.mf.fields[name])

    def fields_on(self, block) -> dict[str, VectorFieldDef]:
        return {name: f for name, f in self.mf.fields.items() if f.block == block}

    def field_combos(self, max_parts: int = 3) -> dict[str, ProductField]:
        """Named manifest fields plus pairwise cross-block sums."""
        combos = {name: lift(f) for name, f in self.mf.fields.items()}
        names = sorted(self.mf.fields)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                fa, fb = self.mf.fields[a], self.mf.fields[b]
                if fa.block != fb.block:
                    combos[f"{a}+{b}"] = ProductField((fa, fb))
        return combos

    def fiber_geom(self, i: int) -> Geometry:
        return self.fiber_geoms[i]


class Registry:
    def __init__(self, specs: list[CheckSpec], aliases: dict[str, str]):
        self.specs = list(specs)
        self.by_id = {s.id: s for s in self.specs}
        if len(self.by_id) != len(self.specs):
            raise ValueError("duplicate check ids in registry")
        self.aliases = dict(aliases)

    def results_covered(self) -> set[str]:
        return {s.result for s in self.specs}

    def select(self, token: str) -> list[CheckSpec]:
        """Resolve one --props token to check specs (id, result or alias)."""
        token = self.aliases.get(token, token)
        if token == "all":
            return list(self.specs)
        hits = [s for s in self.specs if s.id == token or s.result == token]
        if not hits:
            raise KeyError(f"unknown check id {token!r}")
        return hits

    def select_many(self, tokens) -> list[CheckSpec]:
        seen: dict[str, CheckSpec] = {}
        for token in tokens:
            for s in self.select(token):
                seen[s.id] = s
        return [s for s in self.specs if s.id in seen]


def run_checks(registry: Registry, mf: Manifest, specs: list[CheckSpec],
               samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
               tol: Tolerances = Tolerances(),
               explicit: bool = False) -> list[CheckResult]:
    """Run the given checks against one manifest, ordered by check id.

    Checks whose shape predicate rejects the manifest are reported as
    inconclusive when explicitly selected and silently skipped otherwise.
    """
    ctx = RunContext(mf, samples=samples, seed=seed, tol=tol)
    results: list[CheckResult] = []
    for spec in sorted(specs, key=lambda s: s.id):
        if not spec.applies(mf):
            if explicit:
                results.append(CheckResult(
                    check=spec.id, result=spec.result, manifest=mf.name,
                    verdict=INCONCLUSIVE, max_abs=0.0, mean_abs=0.0,
                    samples=0, tolerance=0.0,
                    note="manifest shape does not admit this check"))
            continue
        out = spec.run(ctx)
        results.append(CheckResult(
            check=spec.id, result=spec.result, manifest=mf.name,
            verdict=out.verdict, max_abs=out.max_abs, mean_abs=out.mean_abs,
            samples=out.samples, tolerance=out.tolerance, note=out.note))
    return results


# Numbered statements the registry must cover (census contract).
REQUIRED_RESULTS = (
    "Lemma3.1", "Lemma3.2", "Lemma3.3", "Def3.4", "Def3.5", "Def3.6",
    "Lemma3.7", "Lemma3.8", "Remark3.9", "Prop3.10", "Remark3.11",
    "Example3.12", "Prop3.13", "Prop3.14", "Cor3.15", "Cor3.16",
    "Prop3.17", "Prop3.18", "Def3.19", "Prop3.20", "Prop3.21", "Prop3.22",
    "Def3.23", "Prop3.24",
    "Lemma4.1", "Lemma4.2", "Prop4.3", "Prop4.4", "Cor4.5", "Cor4.6",
    "Prop4.7", "Prop4.8", "Prop4.9", "Prop4.10",
    "Prop5.1", "Cor5.2", "Prop5.3", "Prop5.4",
    "Def6.1", "Prop6.2", "Cor6.3", "Lemma6.4", "Cor6.5", "Lemma6.6",
    "Lemma6.7", "Prop6.8", "Cor6.9", "Cor6.10", "Cor6.11", "Prop6.12",
    "Thm6.13", "Thm6.14", "Prop6.15", "Def6.16", "Prop6.17",
)

EQUATION_ALIASES = {
    "Eq1": "Eq2", "Eq3": "NablaBarG",
    "Eq4": "Lemma3.3", "Eq5": "Def3.4", "Eq6": "Def3.5", "Eq7": "Def3.6",
    "Eq8": "Lemma3.7", "Eq9": "Lemma3.8",
    "Eq10": "Prop3.13", "Eq11": "Prop3.14", "Eq12": "Cor3.15",
    "Eq13": "Cor3.16", "Eq14": "Prop4.3", "Eq15": "Prop4.4",
    "Eq16": "Cor4.5", "Eq17": "Cor4.6", "Eq18": "Prop5.1", "Eq19": "Cor5.2",
    "Eq20": "Def6.1", "Eq21": "Prop6.2", "Eq22": "Cor6.3", "Eq23": "Cor6.5",
    "Eq24": "Lemma6.6", "Eq25": "Prop6.8", "Eq26": "Cor6.10",
    "Eq27": "Prop6.12", "Eq28": "Prop6.15", "Eq29": "Prop6.17",
}


def default_registry() -> Registry:
    from .checks import build_specs

    return Registry(build_specs(), EQUATION_ALIASES)
