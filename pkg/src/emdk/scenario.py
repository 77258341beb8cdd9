"""Scenario files: loading, validation, and task execution.

A scenario is a JSON document validated against ``schemas/scenario.schema.json``.
Running it produces a plain ``dict`` report that validates against
``schemas/report.schema.json``.  Nothing in the report depends on wall time or
the host, so identical inputs give identical reports.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import jsonschema
import numpy as np

from .exterior import COMBOS, PForm
from .fields import Velocity, boost_matrix, decompose_F, decompose_G, plane_wave, poynting_s
from .media import (
    Z_BASIS,
    ClassifyOptions,
    ConstitutiveZ,
    Verdict,
    build_anisotropic,
    build_from_zeta,
    build_isotropic,
    classify_intrinsic,
    is_self_adjoint,
    post_invariant,
    post_invariant_zeta,
    spatial_map,
    zeta_from_rest,
)
from .sem import abraham_tensor, minkowski_sym_tensor
from .selftest import run_selftest
from .variation import FD_STEP, CoframeVariation, DegenerateMetric, verify_variation

TASKS = ("decompose", "sem_abraham", "sem_minkowski", "post_invariant", "classify",
         "verify_variation", "selftest")
VARIATION_TOL = 1e-7
LEX_2 = "".join(f"{a}{b}," for a, b in COMBOS[2]).rstrip(",")
LEX_3 = "".join(f"{a}{b}{c}," for a, b, c in COMBOS[3]).rstrip(",")

CONVENTIONS = {
    "signature": "(-,+,+,+), eta = diag(-1, 1, 1, 1)",
    "orientation": "vol = e^0 ^ e^1 ^ e^2 ^ e^3, *1 = vol",
    "hodge": "a ^ *b = <a, b> vol; ** = (-1)^(p+1) on p-forms",
    "two_form_basis": "field and excitation components in lexicographic order " + LEX_2,
    "three_form_basis": "drive-form components in lexicographic order " + LEX_3,
    "constitutive_basis": "6x6 constitutive matrices act on 2-forms ordered "
                          + ",".join(f"{a}{b}" for a, b in Z_BASIS),
    "one_form_basis": "1-form components on (e^0, e^1, e^2, e^3)",
    "velocities": "rapidity 3-vectors w, V = (cosh|w|, sinh|w| w/|w|)",
    "tensor_normalisation": "T_ab with T_00 = (E.D + H.B)/2 in the comoving frame",
    "units": {"c": 1.0, "eps0": None},
}


class ScenarioError(ValueError):
    """Invalid scenario; ``where`` locates the problem (line/column or JSON path)."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


def _schema(name: str) -> dict:
    text = resources.files("emdk").joinpath("schemas", name).read_text(encoding="utf-8")
    return json.loads(text)


def scenario_schema() -> dict:
    return _schema("scenario.schema.json")


def report_schema() -> dict:
    return _schema("report.schema.json")


def _path(err: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in err.absolute_path]
    return "/" + "/".join(parts) if parts else "/"


def validate_document(doc, schema: dict) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        # descend into the most specific failing branch
        while err.context:
            err = jsonschema.exceptions.best_match(err.context)
        raise ScenarioError(err.message, _path(err))


def parse_scenario(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    validate_document(doc, scenario_schema())
    _check_finite(doc, "")
    return doc


def load_scenario(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(exc.strerror or str(exc), str(path)) from None
    return parse_scenario(text)


def _check_finite(node, where: str):
    # json accepts 1e999 as inf
    if isinstance(node, float) and not np.isfinite(node):
        raise ScenarioError("number is not finite", where or "/")
    if isinstance(node, dict):
        for k, v in node.items():
            _check_finite(v, f"{where}/{k}")
    elif isinstance(node, list):
        for i, v in enumerate(node):
            _check_finite(v, f"{where}/{i}")


# ---------------------------------------------------------------------------
# building objects


@dataclass
class RunOptions:
    seed: int | None = None
    fd_step: float = FD_STEP
    tol_classify: float = 1e-10
    strict: bool = False
    only: tuple[str, ...] | None = None  # replaces the scenario's task list


def _velocity(doc: dict, key: str) -> Velocity:
    return Velocity.from_rapidity(doc.get(key, [0.0, 0.0, 0.0]))


def build_medium(spec: dict, V: Velocity) -> ConstitutiveZ:
    kind = spec["kind"]
    try:
        if kind == "vacuum":
            Z = build_isotropic(1.0, 1.0, V)
        elif kind == "isotropic":
            Z = build_isotropic(spec["eps"], spec["mu"], V)
        elif kind == "anisotropic":
            Z = build_anisotropic(spatial_map(spec["eps"], V), spatial_map(spec["mu_inv"], V), V)
        elif kind == "zeta":
            z = zeta_from_rest(V, spec["zde"], spec.get("zdb"), spec.get("zhe"), spec.get("zhb"))
            Z = build_from_zeta(z, tol=1e-10)
        else:
            Z = ConstitutiveZ(np.array(spec["matrix"], dtype=float))
    except ValueError as exc:
        raise ScenarioError(str(exc), "/medium") from None
    ok, violation = is_self_adjoint(Z, tol=1e-10)
    if not ok:
        raise ScenarioError(f"medium is not self-adjoint (violation {violation:.3g})", "/medium")
    return Z


def build_field(spec: dict) -> tuple[PForm, np.ndarray]:
    point = np.array(spec.get("point", [0.0, 0.0, 0.0, 0.0]), dtype=float)
    if spec["kind"] in ("components", "uniform"):
        return PForm(2, spec["components"]), point
    if not np.linalg.norm(spec["direction"]) > 0:
        raise ScenarioError("direction must be non-zero", "/field/direction")
    try:
        wave = plane_wave(spec["direction"], spec["polarization"], spec.get("amplitude", 1.0),
                          spec.get("phase", 0.0))
    except (ValueError, FloatingPointError) as exc:
        raise ScenarioError(str(exc), "/field") from None
    return wave(point), point


# ---------------------------------------------------------------------------
# report helpers


def _labelled(components, frame: str, basis: str) -> dict:
    return {"frame": frame, "basis": basis, "components": np.asarray(components, dtype=float).tolist()}


def _comoving(T: np.ndarray, V: Velocity) -> np.ndarray:
    # frame vectors of the comoving frame are the columns of the boost
    L = boost_matrix(V.rapidity())
    return L.T @ T @ L


def _frame_names(V: Velocity, U: Velocity) -> dict:
    return {
        "global": "global orthonormal frame (Minkowski coordinates)",
        "comoving": "rest frame of the medium velocity, reached by a pure boost with rapidity "
                    + json.dumps(np.round(V.rapidity(), 15).tolist()),
        "observer": "rest frame of the observer, reached by a pure boost with rapidity "
                    + json.dumps(np.round(U.rapidity(), 15).tolist()),
    }


@dataclass
class TaskOutcome:
    result: dict
    failed: bool = False


@dataclass
class Context:
    doc: dict
    opts: RunOptions
    Z: ConstitutiveZ
    F: PForm
    V: Velocity
    U: Velocity
    eps0: float

    @property
    def seed(self) -> int:
        if self.opts.seed is not None:
            return self.opts.seed
        return int(self.doc.get("seed", 0))


def _task_decompose(ctx: Context) -> TaskOutcome:
    G = ctx.Z(ctx.F)
    fe, gd = decompose_F(ctx.F, ctx.U), decompose_G(G, ctx.U)
    L = boost_matrix(ctx.U.rapidity())
    # 1-form components in the observer rest frame: alpha_a' = alpha_b L^b_a
    rest = lambda a: (a.components @ L)[1:]
    out = {"task": "decompose", "observer_rapidity": ctx.U.rapidity().tolist()}
    for name, form in (("e", fe.e), ("b", fe.b), ("d", gd.e), ("h", gd.b)):
        out[name] = _labelled(form.components, "global", "e^0,e^1,e^2,e^3")
        out[name + "_vector"] = _labelled(rest(form), "observer", "spatial x,y,z")
    s = poynting_s(ctx.F, G, ctx.U)
    out["s"] = _labelled(s.components, "global", "e^0,e^1,e^2,e^3")
    return TaskOutcome(out)


def _tensor_result(name: str, T: np.ndarray, ctx: Context, extra: dict | None = None) -> TaskOutcome:
    out = {"task": name}
    out["tensor"] = _labelled(T, "global", "T_ab, a = row, b = column")
    out["tensor_comoving"] = _labelled(_comoving(T, ctx.V), "comoving", "T_ab, a = row, b = column")
    out["asymmetry"] = float(np.max(np.abs(T - T.T)))
    if extra:
        out.update(extra)
    return TaskOutcome(out)


def _task_sem_abraham(ctx: Context) -> TaskOutcome:
    return _tensor_result("sem_abraham", abraham_tensor(ctx.F, ctx.Z, ctx.V).components, ctx)


def _task_sem_minkowski(ctx: Context) -> TaskOutcome:
    return _tensor_result("sem_minkowski", minkowski_sym_tensor(ctx.F, ctx.Z).components, ctx)


def _task_post_invariant(ctx: Context) -> TaskOutcome:
    chi = post_invariant(ctx.Z)
    chi_blocks = post_invariant_zeta(ctx.Z, ctx.V)
    return TaskOutcome({
        "task": "post_invariant",
        "chi": chi,
        "chi_from_blocks": chi_blocks,
        "agreement": abs(chi - chi_blocks),
    })


def _task_classify(ctx: Context) -> TaskOutcome:
    opts = ClassifyOptions(tol=ctx.opts.tol_classify, seed=ctx.seed, extra_restarts=2)
    res = classify_intrinsic(ctx.Z, opts)
    return TaskOutcome({
        "task": "classify",
        "verdict": res.verdict.value,
        "best_rapidity": res.best_w.tolist(),
        "residual": res.residual,
        "relative_residual": res.relative_residual,
        "lower_bound": res.lower_bound,
        "restarts": len(res.restarts),
        "converged_restarts": sum(r.converged for r in res.restarts),
    }, failed=res.verdict is Verdict.UNDECIDED)


def _task_verify_variation(ctx: Context) -> TaskOutcome:
    edot = ctx.doc.get("variation", {}).get("edot")
    if edot is None:
        edot = np.random.default_rng(ctx.seed).uniform(-1.0, 1.0, (4, 4))
    try:
        chk = verify_variation(ctx.Z, ctx.F, ctx.V, CoframeVariation(np.asarray(edot, dtype=float)),
                               h=ctx.opts.fd_step)
    except DegenerateMetric as exc:
        return TaskOutcome({"task": "verify_variation", "error": str(exc), "fd_step": ctx.opts.fd_step,
                            "passed": False}, failed=True)
    passed = chk.residual <= VARIATION_TOL
    return TaskOutcome({
        "task": "verify_variation",
        "edot": _labelled(edot, "global", "row a holds the components of edot^a on e^0..e^3"),
        "lambda_dot": chk.lhs,
        "edot_wedge_tau": chk.rhs,
        "residual": chk.residual,
        "threshold": VARIATION_TOL,
        "fd_step": ctx.opts.fd_step,
        "passed": bool(passed),
    }, failed=ctx.opts.strict and not passed)


def _task_selftest(ctx: Context) -> TaskOutcome:
    res = run_selftest(seed=ctx.seed)
    return TaskOutcome(selftest_report(res), failed=not res.passed)


def selftest_report(res) -> dict:
    return {
        "task": "selftest",
        "checks": {k: {"max_error": v, "threshold": res.thresholds[k], "passed": bool(v <= res.thresholds[k])}
                   for k, v in res.checks.items()},
        "failures": res.failures,
        "passed": bool(res.passed),
    }


RUNNERS = {
    "decompose": _task_decompose,
    "sem_abraham": _task_sem_abraham,
    "sem_minkowski": _task_sem_minkowski,
    "post_invariant": _task_post_invariant,
    "classify": _task_classify,
    "verify_variation": _task_verify_variation,
    "selftest": _task_selftest,
}


def conventions(eps0: float) -> dict:
    out = json.loads(json.dumps(CONVENTIONS))
    out["units"]["eps0"] = eps0
    return out


def run_scenario(doc: dict, opts: RunOptions | None = None, name: str | None = None) -> tuple[dict, bool]:
    """Execute the listed tasks in order; returns ``(report, numerical_failure)``."""
    opts = opts or RunOptions()
    V = _velocity(doc, "medium_velocity")
    U = _velocity(doc, "observer")
    eps0 = float(doc.get("units", {}).get("eps0", 1.0))
    Z = build_medium(doc["medium"], V)
    if eps0 != 1.0:
        Z = ConstitutiveZ(eps0 * Z.matrix)
    F, point = build_field(doc["field"])
    ctx = Context(doc, opts, Z, F, V, U, eps0)
    tasks = list(doc["tasks"]) if opts.only is None else list(opts.only)
    results, failed = [], False
    for t in tasks:
        outcome = RUNNERS[t](ctx)
        results.append(outcome.result)
        failed = failed or outcome.failed
    report = {
        "conventions": conventions(eps0),
        "frames": _frame_names(V, U),
        "scenario": name if name is not None else doc.get("name"),
        "seed": ctx.seed,
        "medium": {
            "kind": doc["medium"]["kind"],
            "matrix": _labelled(Z.matrix, "global", "constitutive_basis"),
            "medium_rapidity": V.rapidity().tolist(),
        },
        "field": {"F": _labelled(F.components, "global", "two_form_basis"), "point": point.tolist()},
        "results": results,
        "status": "numerical_failure" if failed else "ok",
    }
    return report, failed
