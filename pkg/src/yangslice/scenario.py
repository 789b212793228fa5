"""Scenario files, suite runners and canonical serialisation of results.

Scenarios and reports are JSON documents with sorted keys; exact rationals
are written as ``"num/den"`` strings (integers as plain ``"n"``).
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

from . import cartan, gklo, minors
from .cartan import CartanError, Coweight, build_cartan, parse_type
from .diffop import DiffOp
from .poly import Poly, RatFunc, format_monomial, to_q

SCENARIO_SCHEMA = "yangslice-scenario/1"
REPORT_SCHEMA = "yangslice-report/1"

SUITES = (
    "relations", "quotient", "proof-identities", "grading", "classical",
    "casimir", "root-vectors", "minors", "kleinian", "hilbert",
)
MAX_ORDER = 16


class ScenarioError(ValueError):
    """Invalid scenario content."""


# ---------------------------------------------------------------------------
# serialisation


def q_str(x) -> str:
    q = to_q(x)
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def poly_json(p: Poly) -> list:
    return [[format_monomial(m), q_str(cf)] for m, cf in p.sorted_terms()]


def ratfunc_json(f: RatFunc) -> dict:
    return {
        "num": poly_json(f.num),
        "den": [[str(form), e] for form, e in f.den],
    }


def diffop_json(x: DiffOp) -> list:
    return [
        {"beta": [[i, k, e] for (i, k), e in m], "coeff": ratfunc_json(f)}
        for m, f in sorted(x.terms.items())
    ]


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# scenarios


@dataclass
class Scenario:
    name: str
    type_label: str
    lam: dict
    mu: dict
    orientation: Any = "default"
    c: Any = "symbolic"
    order: int = 8
    suites: tuple = ("relations",)
    seed: int = 0
    serre: int = 3
    also_reversed: bool = True
    classical_pairs: int = 100
    options: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "schema": SCENARIO_SCHEMA,
            "name": self.name,
            "type": self.type_label,
            "lambda": self.lam,
            "mu": self.mu,
            "orientation": self.orientation,
            "c": self.c,
            "order": self.order,
            "suites": list(self.suites),
            "seed": self.seed,
            "serre": self.serre,
            "also_reversed": self.also_reversed,
            "classical_pairs": self.classical_pairs,
            "options": self.options,
        }


def _coweight(cd, data: Any, what: str) -> Coweight:
    if not isinstance(data, dict) or len(data) != 1:
        raise ScenarioError(f"{what} must be an object with exactly one of 'fund' or 'coroot'")
    (kind, coords), = data.items()
    if not isinstance(coords, list) or len(coords) != cd.rank:
        raise ScenarioError(f"{what}.{kind} must list {cd.rank} coordinates")
    try:
        if kind == "fund":
            return Coweight.from_fund(cd, [int(x) for x in coords])
        if kind == "coroot":
            return Coweight.from_coroot(cd, [Fraction(str(x)) for x in coords])
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"bad coordinates in {what}: {exc}") from exc
    raise ScenarioError(f"{what}: unknown coordinate system {kind!r}")


def scenario_from_json(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    schema = data.get("schema", SCENARIO_SCHEMA)
    if schema != SCENARIO_SCHEMA:
        raise ScenarioError(f"unsupported scenario schema {schema!r}")
    for key in ("type", "lambda", "mu"):
        if key not in data:
            raise ScenarioError(f"scenario is missing {key!r}")
    suites = data.get("suites", ["relations"])
    if suites == "all":
        suites = list(SUITES)
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise ScenarioError(f"unknown suites {unknown}")
    sc = Scenario(
        name=str(data.get("name", "scenario")),
        type_label=str(data["type"]),
        lam=data["lambda"],
        mu=data["mu"],
        orientation=data.get("orientation", "default"),
        c=data.get("c", "symbolic"),
        order=int(data.get("order", 8)),
        suites=tuple(suites),
        seed=int(data.get("seed", 0)),
        serre=int(data.get("serre", 3)),
        also_reversed=bool(data.get("also_reversed", True)),
        classical_pairs=int(data.get("classical_pairs", 100)),
        options=dict(data.get("options", {})),
    )
    validate(sc)
    return sc


@dataclass
class Resolved:
    """A validated scenario with its root datum and coweights."""

    scenario: Scenario
    cd: cartan.CartanDatum
    lam: Coweight
    mu: Coweight
    c_values: dict | None


def resolve(sc: Scenario) -> Resolved:
    try:
        letter, rank = parse_type(sc.type_label)
        cd = build_cartan(letter, rank)
    except CartanError as exc:
        raise ScenarioError(str(exc)) from exc
    if sc.orientation == "reversed":
        cd = cd.reversed()
    elif isinstance(sc.orientation, list):
        try:
            cd = cd.with_orientation([tuple(a) for a in sc.orientation])
        except (CartanError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad orientation: {exc}") from exc
    elif sc.orientation != "default":
        raise ScenarioError("orientation must be 'default', 'reversed' or an arrow list")
    lam = _coweight(cd, sc.lam, "lambda")
    mu = _coweight(cd, sc.mu, "mu")
    try:
        sd = cartan.shift_data(cd, lam, mu)
    except CartanError as exc:
        raise ScenarioError(str(exc)) from exc
    c_values = None
    if sc.c != "symbolic":
        if not isinstance(sc.c, dict):
            raise ScenarioError("c must be 'symbolic' or an object mapping nodes to value lists")
        c_values = {}
        for i in cd.nodes:
            vals = sc.c.get(str(i), [])
            if len(vals) != sd.lam_i(i):
                raise ScenarioError(f"c for node {i} needs {sd.lam_i(i)} values, got {len(vals)}")
            try:
                c_values[i] = [to_q(str(v)) for v in vals]
            except (ValueError, ZeroDivisionError) as exc:
                raise ScenarioError(f"bad value of c at node {i}: {exc}") from exc
    return Resolved(sc, cd, lam, mu, c_values)


def validate(sc: Scenario) -> None:
    if not 1 <= sc.order <= MAX_ORDER:
        raise ScenarioError(f"order must be between 1 and {MAX_ORDER}")
    if sc.serre < 1:
        raise ScenarioError("serre range must be positive")
    resolve(sc)


def load_scenario(ref: str) -> Scenario:
    """Load a scenario from a path or by bundled name."""
    path = Path(ref)
    if path.exists():
        text = path.read_text()
    else:
        name = ref if ref.endswith(".json") else ref + ".json"
        res = resources.files("yangslice").joinpath("scenarios", name)
        if not res.is_file():
            raise ScenarioError(f"no scenario file or bundled scenario named {ref!r}")
        text = res.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
    return scenario_from_json(data)


def bundled_scenarios() -> list[str]:
    folder = resources.files("yangslice").joinpath("scenarios")
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def acceptance_matrix(order: int = 6) -> list[Scenario]:
    """The relation-matrix scenarios: A2, A3 (numeric c), B2, C2, G2.

    ``lambda - mu`` is one simple coroot or a sum of two, ``mu`` is zero or a
    fundamental coweight; only dominant ``lambda`` are kept.  Each scenario is
    listed once per orientation.
    """
    out = []
    for label in ("A2", "A3", "B2", "C2", "G2"):
        letter, rank = parse_type(label)
        cd = build_cartan(letter, rank)
        mus = [[0] * rank] + [[1 if k == i else 0 for k in range(rank)] for i in range(rank)]
        nus = [[i] for i in range(rank)] + [list(p) for p in itertools.combinations_with_replacement(range(rank), 2)]
        for mu in mus:
            for nu in nus:
                v = [0] * rank
                for i in nu:
                    v[i] += 1
                lam = Coweight.from_fund(cd, mu) + Coweight.from_coroot(cd, v)
                if not lam.dominant:
                    continue
                for orient in ("default", "reversed"):
                    c: Any = "symbolic"
                    if label == "A3":
                        sd = cartan.shift_data(cd, lam, Coweight.from_fund(cd, mu))
                        c = {str(i): [f"{i + r}/3" for r in range(1, sd.lam_i(i) + 1)] for i in cd.nodes}
                    name = f"{label}_mu{''.join(map(str, mu))}_nu{''.join(map(str, v))}_{orient}"
                    out.append(Scenario(
                        name=name, type_label=label, lam={"fund": list(lam.fund)}, mu={"fund": mu},
                        orientation=orient, c=c, order=order, suites=("relations",), also_reversed=False,
                    ))
    return out


# ---------------------------------------------------------------------------
# suite runners


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list = field(default_factory=list)  # list of {"check": ..., "detail": ...}
    info: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks += 1
        if not ok:
            self.failures.append({"check": name, "detail": detail})

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": self.checks, "failures": self.failures, "info": self.info}


def build(res: Resolved, *, reversed_orientation: bool = False) -> gklo.GKLOContext:
    cd = res.cd.reversed() if reversed_orientation else res.cd
    lam = Coweight.from_fund(cd, res.lam.fund)
    mu = Coweight.from_fund(cd, res.mu.fund)
    return gklo.build_context(cd, lam, mu, res.c_values, res.scenario.order)


def _relations_worker(payload):
    """Evaluate a chunk of relation cells in a worker process."""
    scenario_json, reversed_orientation, cells = payload
    res = resolve(scenario_from_json(scenario_json))
    ctx = build(res, reversed_orientation=reversed_orientation)
    report = gklo.verify_relations(ctx, cells=cells)
    return [(e.family, e.index, e.passed, str(e.residual), e.error) for e in report.entries]


def run_relations(res: Resolved, ctx: gklo.GKLOContext, result: SuiteResult, jobs: int, label: str,
                  reversed_orientation: bool) -> None:
    ranges = gklo.RelationRanges(serre=res.scenario.serre)
    cells = gklo.relation_cells(ctx, ranges)
    if jobs > 1 and len(cells) > 1:
        from concurrent.futures import ProcessPoolExecutor

        chunks = [cells[k::jobs] for k in range(jobs)]
        payloads = [(res.scenario.to_json(), reversed_orientation, ch) for ch in chunks if ch]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = [row for part in pool.map(_relations_worker, payloads) for row in part]
    else:
        report = gklo.verify_relations(ctx, cells=cells)
        rows = [(e.family, e.index, e.passed, str(e.residual), e.error) for e in report.entries]
    rows.sort(key=lambda r: (gklo.FAMILIES.index(r[0]), repr(r[1])))
    counts: dict = {}
    for family, index, ok, residual, error in rows:
        slot = counts.setdefault(family, [0, 0])
        slot[0] += 1
        slot[1] += ok
        result.add(f"{label}{family}{list(index) if not isinstance(index, list) else index}", ok,
                   "" if ok else (error or f"residual {residual}"))
    result.info[f"{label}families"] = {k: {"cells": v[0], "passed": v[1]} for k, v in sorted(counts.items())}


def run_suite(name: str, res: Resolved, ctx: gklo.GKLOContext, jobs: int = 1) -> SuiteResult:
    sc = res.scenario
    out = SuiteResult(name)
    t0 = time.perf_counter()
    if name == "relations":
        run_relations(res, ctx, out, jobs, "", False)
        if sc.also_reversed and res.cd.edges:
            rctx = build(res, reversed_orientation=True)
            run_relations(res, rctx, out, jobs, "reversed:", True)
    elif name == "quotient":
        for item in gklo.quotient_facts(ctx):
            out.add(item.name, item.passed, item.detail)
    elif name == "proof-identities":
        for item in gklo.verify_proof_identities(ctx):
            out.add(item.name, item.passed, item.detail)
    elif name == "grading":
        for e in gklo.grading_check(ctx):
            out.add(f"{e.series}[{e.node}]^({e.index})", e.passed,
                    "" if e.passed else f"degree {e.degree}, expected {e.expected}, "
                                        f"homogeneous under the quoted beta weights: {e.quoted_homogeneous}")
        out.info["beta_weights_consistent"] = {str(k): v for k, v in gklo.beta_weights(ctx.symbolic_twin()).items()}
        out.info["beta_weights_quoted"] = {str(k): v for k, v in gklo.beta_weights(ctx.symbolic_twin(), "quoted").items()}
    elif name == "classical":
        for item in gklo.classical_check(ctx, sc.classical_pairs, sc.seed):
            out.add(item.name, item.passed, item.detail)
    elif name == "casimir":
        try:
            value = gklo.sl2_casimir(ctx)
        except AssertionError as exc:
            out.add("casimir image is a scalar", False, str(exc))
            out.seconds = time.perf_counter() - t0
            return out
        target = _casimir_target(ctx)
        out.info["image"] = ratfunc_json(value)
        out.info["expected"] = ratfunc_json(target)
        z_free = all(v[0] != 1 for v in value.variables())
        out.add("casimir image is a scalar", z_free, "" if z_free else f"image depends on z: {value}")
        out.add("casimir image equals 2c^(2) - c^(1)^2/2 + h^2/2", value == target,
                "" if value == target else f"image is {value}")
    elif name == "root-vectors":
        _run_root_vectors(ctx, out)
    elif name == "minors":
        mo = sc.options.get("minors", {})
        order = int(mo.get("order", 4))
        for item in [minors.det_construction_check(minors.build_sl(2, order))]:
            out.add(item.name, item.passed, item.detail)
        for group in (minors.oracle_suite(order), minors.jacobi_suite(int(mo.get("jacobi_samples", 50)), order, sc.seed),
                      minors.det_ideal_check(min(order, 3)), minors.phi_bracket_check(order)):
            for item in group:
                out.add(item.name, item.passed, item.detail)
    elif name == "kleinian":
        for n in sc.options.get("kleinian", {}).get("n", [0, 1, 2, 3]):
            for item in minors.verify_kleinian(int(n), seed=sc.seed):
                out.add(f"n={n}: {item.name}", item.passed, item.detail)
    elif name == "hilbert":
        horder = int(sc.options.get("hilbert", {}).get("order", 8))
        hs = cartan.hilbert_count_slice(ctx.cd, ctx.mu, horder)
        pbw = cartan.count_pbw_monomials(ctx.cd, ctx.mu, horder)
        out.info["hilbert"] = hs
        out.add("hilbert count equals PBW count", hs == pbw, "" if hs == pbw else f"{hs} vs {pbw}")
        if all(x == 0 for x in ctx.mu.fund):
            prod = cartan._product_coefficients([0] + [ctx.cd.dim] * horder, horder)
            out.add("mu = 0 gives prod (1 - q^i)^-dim", hs == prod)
    else:  # pragma: no cover - guarded by validation
        raise ScenarioError(f"unknown suite {name}")
    out.seconds = time.perf_counter() - t0
    return out


def _casimir_target(ctx: gklo.GKLOContext) -> RatFunc:
    cc = ctx.c_coefficients(1)
    h = Poly.var((0,))
    return RatFunc.from_poly(cc[2].scale(2) - (cc[1] * cc[1]).scale(Fraction(1, 2)) + (h * h).scale(Fraction(1, 2)))


def _run_root_vectors(ctx: gklo.GKLOContext, out: SuiteResult) -> None:
    """Exact h-division of the root-vector recursion for non-simple roots."""
    nonzero = {}
    for root in ctx.cd.positive_roots:
        if sum(root) == 1:
            continue
        shift = gklo.mu_star_pairing(ctx, root)
        jobs = [("E", r) for r in range(1, min(3, ctx.order) + 1)]
        jobs += [("F", s) for s in range(shift + 1, shift + 3) if s - shift <= ctx.order]
        for sign, r in jobs:
            label = f"{sign}{list(root)}^({r})"
            try:
                val = gklo.root_vector_image(ctx, sign, root, r)
            except Exception as exc:  # noqa: BLE001 - recorded as a failure
                out.add(f"{label} divisible by h", False, f"{type(exc).__name__}: {exc}")
                continue
            out.add(f"{label} divisible by h", True)
            nonzero[label] = not val.set_h_zero().is_zero()
    out.info["nonzero_at_h0"] = nonzero


def applicable(name: str, res: Resolved) -> str | None:
    """Reason a suite cannot run for this scenario, or ``None``."""
    if name == "casimir":
        if res.cd.label != "A1" or list(res.lam.coroot) != [1] or list(res.mu.fund) != [0]:
            return "the casimir suite needs type A1 with lambda = alpha, mu = 0"
    return None


def run_scenario(sc: Scenario, jobs: int = 1) -> tuple[dict, dict]:
    """Run all selected suites; returns ``(report, timings)``."""
    res = resolve(sc)
    for name in sc.suites:
        reason = applicable(name, res)
        if reason:
            raise ScenarioError(reason)
    t0 = time.perf_counter()
    ctx = build(res)
    timings = {"build": time.perf_counter() - t0}
    suites = {}
    for name in sc.suites:
        result = run_suite(name, res, ctx, jobs)
        suites[name] = result.to_json()
        timings[name] = result.seconds
    report = {
        "schema": REPORT_SCHEMA,
        "scenario": sc.to_json(),
        "environment": {
            "order": sc.order,
            "seed": sc.seed,
            "orientation": sc.orientation,
            "arrows": sorted([list(a) for a in res.cd.orientation]),
            "c_mode": "symbolic" if res.c_values is None else "numeric",
        },
        "shift_data": {"m": list(ctx.sd.m), "lambda_i": list(ctx.sd.lam), "mu_i": list(ctx.sd.mu)},
        "suites": suites,
        "passed": all(s["passed"] for s in suites.values()),
    }
    return report, timings


# ---------------------------------------------------------------------------
# dumps


def dump_images(sc: Scenario) -> dict:
    res = resolve(sc)
    ctx = build(res)
    nodes = {}
    for i in ctx.cd.nodes:
        nodes[str(i)] = {
            "A": [ratfunc_json(ctx.A[i].coeff(s)) for s in range(ctx.order + 1)],
            "H": [ratfunc_json(ctx.H[i].coeff(s)) for s in range(ctx.order + 1)],
            "E": [diffop_json(ctx.E[i].coeff(s)) for s in range(1, ctx.order + 1)],
            "F_shifted": [diffop_json(ctx.F[i].coeff(s)) for s in range(1, ctx.order + 1)],
        }
    return {"schema": REPORT_SCHEMA + "#images", "scenario": sc.name, "order": sc.order,
            "note": "E and F are stored without the d_i^(-1/2) factor; F_shifted[s-1] is F^(s + mu_i)",
            "nodes": nodes}


def dump_rseries(sc: Scenario) -> dict:
    res = resolve(sc)
    ctx = build(res)
    return {"schema": REPORT_SCHEMA + "#rseries", "scenario": sc.name, "order": sc.order,
            "nodes": {str(i): [ratfunc_json(ctx.r[i].coeff(s)) for s in range(ctx.order + 1)]
                      for i in ctx.cd.nodes}}


def report_schema() -> dict:
    """JSON Schema (draft 2020-12) of the structured report."""
    suite = {
        "type": "object",
        "required": ["passed", "checks", "failures", "info"],
        "properties": {
            "passed": {"type": "boolean"},
            "checks": {"type": "integer", "minimum": 0},
            "failures": {"type": "array", "items": {
                "type": "object", "required": ["check", "detail"],
                "properties": {"check": {"type": "string"}, "detail": {"type": "string"}}}},
            "info": {"type": "object"},
        },
    }
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": REPORT_SCHEMA,
        "type": "object",
        "required": ["schema", "scenario", "environment", "shift_data", "suites", "passed"],
        "properties": {
            "schema": {"const": REPORT_SCHEMA},
            "scenario": {"type": "object"},
            "environment": {"type": "object", "required": ["order", "seed", "orientation", "arrows", "c_mode"]},
            "shift_data": {"type": "object", "required": ["m", "lambda_i", "mu_i"]},
            "suites": {"type": "object", "additionalProperties": suite},
            "passed": {"type": "boolean"},
        },
    }
